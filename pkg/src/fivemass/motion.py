"""Keyframe motions and trajectory rendering.

Position and scalar channels interpolate with clamped cubic splines
(zero end velocity), or linearly when the motion asks for it; rotation
channels interpolate spherically between keyframes.  Rendering samples
the motion on a fixed-rate grid, inclusive of both endpoints, and solves
a whole-body pose per sample.
"""

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import geom, posegen
from .feasibility import FootFrames
from .posegen import ConstraintSet


@dataclass(frozen=True)
class Keyframe:
    t: float
    constraints: ConstraintSet


@dataclass
class Motion:
    name: str
    keyframes: tuple
    interpolation: str = "cubic"
    _sampler: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.keyframes) < 2:
            raise ValueError("a motion needs at least two keyframes")
        times = [kf.t for kf in self.keyframes]
        if any(t < 0.0 for t in times):
            raise ValueError("keyframe times must be non-negative")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")

    @property
    def t_start(self):
        return self.keyframes[0].t

    @property
    def t_end(self):
        return self.keyframes[-1].t


@dataclass(frozen=True)
class TrajectoryFrame:
    t: float
    joints: tuple
    status: str


@dataclass(frozen=True)
class JointTrajectory:
    rate: float
    frames: tuple

    @property
    def error_count(self):
        return sum(1 for f in self.frames
                   if f.status == posegen.STATUS_INFEASIBLE)


class _Sampler:
    def __init__(self, motion):
        kfs = motion.keyframes
        self.times = np.array([kf.t for kf in kfs])
        cs = [kf.constraints for kf in kfs]
        values = np.array([
            list(c.com) + list(c.feet.f_l) + list(c.feet.f_r)
            + [c.i_z, c.i_psi, c.resolved_psi_i()]
            for c in cs])
        if motion.interpolation == "linear":
            self._eval = lambda t: np.array(
                [np.interp(t, self.times, values[:, j])
                 for j in range(values.shape[1])])
        else:
            spline = CubicSpline(self.times, values, bc_type="clamped")
            self._eval = spline
        self.q_ri = [geom.quat_from_matrix(c.r_i) for c in cs]
        self.q_fl = [geom.quat_from_matrix(c.feet.r_fl) for c in cs]
        self.q_fr = [geom.quat_from_matrix(c.feet.r_fr) for c in cs]
        if all(c.trunk_tilt is not None for c in cs):
            self.tilts = [geom.unit(c.trunk_tilt) for c in cs]
        else:
            self.tilts = None

    def _segment(self, t):
        i = bisect.bisect_right(self.times, t) - 1
        i = min(max(i, 0), len(self.times) - 2)
        u = (t - self.times[i]) / (self.times[i + 1] - self.times[i])
        return i, min(max(u, 0.0), 1.0)

    def sample(self, t):
        t = min(max(t, self.times[0]), self.times[-1])
        v = self._eval(t)
        i, u = self._segment(t)
        r_i = geom.matrix_from_quat(geom.quat_slerp(self.q_ri[i],
                                                    self.q_ri[i + 1], u))
        r_fl = geom.matrix_from_quat(geom.quat_slerp(self.q_fl[i],
                                                     self.q_fl[i + 1], u))
        r_fr = geom.matrix_from_quat(geom.quat_slerp(self.q_fr[i],
                                                     self.q_fr[i + 1], u))
        tilt = None
        if self.tilts is not None:
            tilt = geom.dir_slerp(self.tilts[i], self.tilts[i + 1], u)
        return ConstraintSet(
            com=(float(v[0]), float(v[1]), float(v[2])),
            feet=FootFrames(
                f_l=(float(v[3]), float(v[4]), float(v[5])),
                f_r=(float(v[6]), float(v[7]), float(v[8])),
                r_fl=r_fl, r_fr=r_fr),
            r_i=r_i, i_z=max(0.0, float(v[9])), i_psi=max(0.0, float(v[10])),
            psi_i=float(v[11]), trunk_tilt=tilt)


def sample_motion(motion, t):
    """Constraints at time t; out-of-range times clamp to the ends."""
    if motion._sampler is None:
        motion._sampler = _Sampler(motion)
    return motion._sampler.sample(t)


def frame_times(motion, rate):
    n = int(math.floor((motion.t_end - motion.t_start) * rate + 1e-9)) + 1
    return [motion.t_start + k / rate for k in range(n)]


def render_trajectory(motion, rate, spec, **solve_kwargs):
    """Solve a pose per sample; infeasible frames are kept and flagged."""
    frames = []
    for t in frame_times(motion, rate):
        constraints = sample_motion(motion, t)
        solution = posegen.generate_pose(spec, constraints, **solve_kwargs)
        frames.append(TrajectoryFrame(t=t, joints=solution.joint_vector,
                                      status=solution.report.status))
    return JointTrajectory(rate=float(rate), frames=tuple(frames))
