"""Robot parameterisation for the reduced five-mass humanoid.

The robot is four limbs plus a combined trunk+head mass.  Each limb is a
triangle with fixed link lengths (c upper, a lower) and a variable
extension; the limb mass sits at a point fixed by two distribution
parameters.  See limb_ik for how the triangle maps to joint angles.
"""

import json
import math
from dataclasses import dataclass, field

Vec3 = tuple[float, float, float]


class SpecError(ValueError):
    """Robot description failed validation."""


@dataclass(frozen=True)
class DistributionParams:
    """Limb mass location parameters.

    p_s sections the lower link from the knee/elbow toward the limb end;
    p_l is the fraction of the origin->section vector at which the mass
    sits.  A uniform-density triangle has p_s=1/2, p_l=2/3.
    """

    p_s: float
    p_l: float

    def __post_init__(self):
        if not (0.0 <= self.p_s <= 1.0 and 0.0 <= self.p_l <= 1.0):
            raise SpecError("distribution parameters must lie in [0, 1]")


@dataclass(frozen=True)
class InverseDistributionParams:
    """Same mass point located from the limb end instead of the origin."""

    p_si: float
    p_li: float


def derive_inverse_params(dist):
    """Inverse distribution parameters from the forward ones.

    In barycentric terms the mass is
        M = (1-p_l) O + p_l (1-p_s) K + p_l p_s A
    so locating it from the limb end A through a section point
    T = K + p_si (O - K) gives the closed forms below.  The degenerate
    case p_l*p_s = 1 (mass exactly at the limb end) is rejected.
    """
    p_s, p_l = dist.p_s, dist.p_l
    p_li = 1.0 - p_l * p_s
    if p_li <= 0.0:
        raise SpecError("mass at the limb end: p_l * p_s must be < 1")
    return InverseDistributionParams(p_si=(1.0 - p_l) / p_li, p_li=p_li)


@dataclass(frozen=True)
class LimbSpec:
    """One limb: link lengths, mass, distribution, end-frame offset."""

    c: float                 # upper link length [m]
    a: float                 # lower link length [m]
    mass: float              # [kg]
    dist: DistributionParams
    dist_inv: InverseDistributionParams
    end_offset: Vec3 = (0.0, 0.0, 0.0)  # end frame -> tip joint (ankle) [m]

    def __post_init__(self):
        if self.c <= 0.0 or self.a <= 0.0:
            raise SpecError("link lengths must be positive")
        if self.mass < 0.0:
            raise SpecError("limb mass must be non-negative")
        want = derive_inverse_params(self.dist)
        if (abs(want.p_si - self.dist_inv.p_si) > 1e-12
                or abs(want.p_li - self.dist_inv.p_li) > 1e-12):
            raise SpecError("inverse distribution parameters are inconsistent")

    def mass_point(self, origin, knee, end):
        """Limb mass position in the triangle (origin, knee, end)."""
        p_s, p_l = self.dist.p_s, self.dist.p_l
        w_o = 1.0 - p_l
        w_k = p_l * (1.0 - p_s)
        w_a = p_l * p_s
        return (w_o * origin[0] + w_k * knee[0] + w_a * end[0],
                w_o * origin[1] + w_k * knee[1] + w_a * end[1],
                w_o * origin[2] + w_k * knee[2] + w_a * end[2])

    def max_mass_reach(self):
        """Mass distance from the limb origin at full extension."""
        return self.dist.p_l * (self.c + self.dist.p_s * self.a)


def make_limb(c, a, mass, p_s, p_l, end_offset=(0.0, 0.0, 0.0)):
    dist = DistributionParams(p_s=p_s, p_l=p_l)
    return LimbSpec(c=c, a=a, mass=mass, dist=dist,
                    dist_inv=derive_inverse_params(dist),
                    end_offset=tuple(end_offset))


@dataclass(frozen=True)
class RobotSpec:
    """Five-mass robot: trunk plus (left, right) legs and arms."""

    trunk_mass: float
    trunk_offset: Vec3       # base frame -> trunk+head mass [m]
    hip_width: float
    shoulder_offset: Vec3    # base frame -> left shoulder; right mirrors y
    legs: tuple              # (left, right) LimbSpec
    arms: tuple              # (left, right) LimbSpec
    joint_limits: dict = field(default_factory=dict)  # name -> (lo, hi) [rad]

    def __post_init__(self):
        if self.trunk_mass <= 0.0:
            raise SpecError("trunk mass must be positive")
        if self.hip_width <= 0.0:
            raise SpecError("hip width must be positive")
        for leg in self.legs:
            if leg.mass <= 0.0:
                raise SpecError("leg masses must be positive")

    @property
    def total_mass(self):
        return (self.trunk_mass + self.legs[0].mass + self.legs[1].mass
                + self.arms[0].mass + self.arms[1].mass)


@dataclass(frozen=True)
class LowerUpperMasses:
    """Dumbbell masses: legs below, trunk plus arms above."""

    m_l: float
    m_u: float

    @property
    def total(self):
        return self.m_l + self.m_u


def aggregate_masses(spec):
    return LowerUpperMasses(
        m_l=spec.legs[0].mass + spec.legs[1].mass,
        m_u=spec.trunk_mass + spec.arms[0].mass + spec.arms[1].mass)


# ---------------------------------------------------------------------------
# robot spec documents

_LIMB_KEYS = ("side", "mass", "c", "a", "p_s", "p_l")


def load_robot_spec(source):
    """Parse and validate a robot spec document (JSON text, dict or path).

    Units are meters, kilograms and radians throughout.  Stored inverse
    distribution parameters, if present, must agree with the recomputed
    ones to 1e-12.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if "{" not in text:
            with open(text, "r") as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("robot spec is not valid JSON: %s" % exc) from exc

    try:
        trunk = doc["trunk"]
        trunk_mass = float(trunk["mass"])
        trunk_offset = _vec3(trunk["offset"], "trunk.offset")
        hip_width = float(doc["hip_width"])
        shoulder_offset = _vec3(doc["shoulder_offset"], "shoulder_offset")
        legs = _limb_pair(doc["legs"], "legs")
        arms = _limb_pair(doc["arms"], "arms")
    except KeyError as exc:
        raise SpecError("missing field: %s" % exc) from exc

    limits = {}
    for entry in doc.get("joint_limits", []):
        try:
            name = entry["name"]
            lo, hi = float(entry["min"]), float(entry["max"])
        except KeyError as exc:
            raise SpecError("joint limit entry missing %s" % exc) from exc
        if lo > hi:
            raise SpecError("joint limit %s has min > max" % name)
        limits[name] = (lo, hi)

    return RobotSpec(trunk_mass=trunk_mass, trunk_offset=trunk_offset,
                     hip_width=hip_width, shoulder_offset=shoulder_offset,
                     legs=legs, arms=arms, joint_limits=limits)


def _vec3(value, label):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise SpecError("%s must be a 3-vector" % label)
    return tuple(float(x) for x in value)


def _limb_pair(entries, label):
    if len(entries) != 2:
        raise SpecError("%s must list exactly a left and a right limb" % label)
    by_side = {}
    for entry in entries:
        for key in _LIMB_KEYS:
            if key not in entry:
                raise SpecError("%s entry missing field %r" % (label, key))
        side = entry["side"]
        if side not in ("left", "right") or side in by_side:
            raise SpecError("%s sides must be one left and one right" % label)
        limb = make_limb(
            c=float(entry["c"]), a=float(entry["a"]),
            mass=float(entry["mass"]),
            p_s=float(entry["p_s"]), p_l=float(entry["p_l"]),
            end_offset=_vec3(entry.get("end_offset", (0.0, 0.0, 0.0)),
                             "%s.end_offset" % label))
        if "p_si" in entry or "p_li" in entry:
            p_si = float(entry.get("p_si", limb.dist_inv.p_si))
            p_li = float(entry.get("p_li", limb.dist_inv.p_li))
            if (abs(p_si - limb.dist_inv.p_si) > 1e-12
                    or abs(p_li - limb.dist_inv.p_li) > 1e-12):
                raise SpecError(
                    "%s %s: stored inverse parameters disagree with the "
                    "distribution parameters" % (label, side))
        by_side[side] = limb
    return (by_side["left"], by_side["right"])


_BLEND_CACHE = {}


def interpolate_limbs(left, right, w_left=0.5):
    """Linear blend of two limbs (lengths, mass, distribution params).

    Memoised on the (immutable) inputs: the blend sits on the per-pose
    hot path but only ever changes with the robot.
    """
    key = (id(left), id(right), w_left)
    hit = _BLEND_CACHE.get(key)
    if hit is not None and hit[0] is left and hit[1] is right:
        return hit[2]
    w = w_left
    lerp = lambda x, y: w * x + (1.0 - w) * y
    blended = make_limb(
        c=lerp(left.c, right.c), a=lerp(left.a, right.a),
        mass=lerp(left.mass, right.mass),
        p_s=lerp(left.dist.p_s, right.dist.p_s),
        p_l=lerp(left.dist.p_l, right.dist.p_l),
        end_offset=tuple(lerp(x, y)
                         for x, y in zip(left.end_offset, right.end_offset)))
    if len(_BLEND_CACHE) > 256:
        _BLEND_CACHE.clear()
    _BLEND_CACHE[key] = (left, right, blended)
    return blended
