"""Packaged example data: a 90 cm humanoid description, a kicking motion
and the three benchmark constraint scenarios."""

import json
from importlib import resources


def fixture_path(name):
    """Filesystem path of a packaged fixture file."""
    return str(resources.files(__package__) / name)


def load_json(name):
    with (resources.files(__package__) / name).open("r") as fh:
        return json.load(fh)
