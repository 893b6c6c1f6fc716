"""Analytic whole-body pose and motion generation for humanoid robots
using a reduced five-mass model: feet, CoM and composite-rigid-body
inertia in, 20 joint angles out, with an exact point-mass oracle to
verify every result."""

from .feasibility import FootFrames, InfeasibleError
from .model import RobotSpec, SpecError, aggregate_masses, load_robot_spec
from .motion import JointTrajectory, Keyframe, Motion, render_trajectory, \
    sample_motion
from .posegen import JOINT_NAMES, ConstraintSet, PoseSolution, generate_pose

__version__ = "0.1.0"

__all__ = [
    "ConstraintSet", "FootFrames", "InfeasibleError", "JointTrajectory",
    "JOINT_NAMES", "Keyframe", "Motion", "PoseSolution", "RobotSpec",
    "SpecError", "aggregate_masses", "generate_pose", "load_robot_spec",
    "render_trajectory", "sample_motion", "__version__",
]
