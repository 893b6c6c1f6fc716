"""Whole-body pose generation pipeline.

The public interface takes feet and CoM in a world frame; internally all
geometry runs in the CoM frame (CoM at the origin) and results are
translated back.  Constraint priority falls out of the procedural order:
the CoM is always met when a pose exists, the inertia orientation is
given up only by preconditioning or the surface-slide search, and the
tilting magnitude is the first thing sacrificed.
"""

import math
import time
from dataclasses import dataclass, replace

from . import feasibility, geom, limb_ik, model, reduction
from .feasibility import FootFrames
from .geom import Mat3, Vec3

LEG_JOINT_COUNT = 6
ARM_JOINT_COUNT = 4

#: Order of the emitted 20-joint vector.
JOINT_NAMES = tuple(
    ["%s_%s" % (side, name)
     for side in ("l", "r") for name in limb_ik.LegJoints.FIELDS]
    + ["%s_%s" % (side, name)
       for side in ("l", "r") for name in limb_ik.ArmJoints.FIELDS])

STATUS_EXACT = "exact"
STATUS_INERTIA_ADJUSTED = "inertia_adjusted"
STATUS_COM_ONLY = "com_only"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class ConstraintSet:
    """One pose request.  Feet and CoM are world-frame; psi_i defaults to
    the fused yaw of the requested inertia orientation."""

    com: Vec3
    feet: FootFrames
    r_i: Mat3
    i_z: float
    i_psi: float = 0.0
    psi_i: float = None
    trunk_tilt: Vec3 = None

    def __post_init__(self):
        if self.i_z < 0.0 or self.i_psi < 0.0:
            raise ValueError("inertia requests must be non-negative")

    def resolved_psi_i(self):
        if self.psi_i is not None:
            return self.psi_i
        return geom.fused_yaw(self.r_i)


@dataclass
class BaseFrame:
    h_m: Vec3
    r_b: Mat3
    psi_t: float


@dataclass
class MassLayout:
    """Cartesian positions of the five point masses plus derived frames."""

    m_t: Vec3
    m_ll: Vec3
    m_rl: Vec3
    m_la: Vec3
    m_ra: Vec3
    h_m: Vec3
    lower: Vec3   # barycenter of the leg masses
    upper: Vec3   # barycenter of trunk and arm masses


@dataclass
class SolveReport:
    status: str
    iterations: int = 0
    residual: float = 0.0
    adjusted_r_i: Mat3 = None
    adjusted_i_z: float = None
    flags: tuple = ()
    solve_time_us: float = 0.0
    diagnostics: str = None


@dataclass
class PoseSolution:
    legs: tuple    # (left, right) LegJoints
    arms: tuple    # (left, right) ArmJoints
    layout: MassLayout
    base: BaseFrame
    report: SolveReport

    @property
    def joint_vector(self):
        vals = []
        for leg in self.legs:
            vals.extend(getattr(leg, f) for f in limb_ik.LegJoints.FIELDS)
        for arm in self.arms:
            vals.extend(getattr(arm, f) for f in limb_ik.ArmJoints.FIELDS)
        return tuple(vals)


_ZERO_LEG = limb_ik.LegJoints(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
_ZERO_ARM = limb_ik.ArmJoints(0.0, 0.0, 0.0, 0.0)

# Per-robot cache of joint-limit bands resolved to dataclass fields, so
# the per-pose clamp loop does no string work.
_LIMIT_CACHE = {}


def _limit_bands(spec, side, fields):
    entry = _LIMIT_CACHE.get(id(spec))
    if entry is None or entry[0] is not spec:
        entry = (spec, {})
        _LIMIT_CACHE[id(spec)] = entry
    bands = entry[1].get((side, fields))
    if bands is None:
        bands = tuple(
            (name, "%s_%s" % (side, name),
             spec.joint_limits.get("%s_%s" % (side, name)))
            for name in fields
            if spec.joint_limits.get("%s_%s" % (side, name)) is not None)
        entry[1][(side, fields)] = bands
    return bands

def build_layout(spec, m_t_pos, m_ll, m_rl, m_la, m_ra, h_m):
    w_ll, w_rl = spec.legs[0].mass, spec.legs[1].mass
    w_t, w_la, w_ra = spec.trunk_mass, spec.arms[0].mass, spec.arms[1].mass
    m_l = w_ll + w_rl
    m_u = w_t + w_la + w_ra
    lower = ((w_ll * m_ll[0] + w_rl * m_rl[0]) / m_l,
             (w_ll * m_ll[1] + w_rl * m_rl[1]) / m_l,
             (w_ll * m_ll[2] + w_rl * m_rl[2]) / m_l)
    upper = ((w_t * m_t_pos[0] + w_la * m_la[0] + w_ra * m_ra[0]) / m_u,
             (w_t * m_t_pos[1] + w_la * m_la[1] + w_ra * m_ra[1]) / m_u,
             (w_t * m_t_pos[2] + w_la * m_la[2] + w_ra * m_ra[2]) / m_u)
    return MassLayout(m_t=m_t_pos, m_ll=m_ll, m_rl=m_rl, m_la=m_la,
                      m_ra=m_ra, h_m=h_m, lower=lower, upper=upper)


def trunk_frame(h_m, m_u_pos, psi_i, limits, d_u, trunk_tilt=None,
                trunk_len=0.0):
    """Base frame: z towards the planned upper mass, fused yaw psi_i.

    An optional trunk tilt direction is blended in by spherical
    interpolation, capped so the implied trunk-mass displacement stays
    within the remaining arm-reach slack d_max - d_u.
    """
    v = geom.sub(m_u_pos, h_m)
    length = geom.norm(v)
    if length < 1e-12:
        return BaseFrame(h_m=h_m, r_b=geom.rot_z(psi_i), psi_t=psi_i)
    z_t = geom.scale(v, 1.0 / length)
    if trunk_tilt is not None:
        slack = limits.d_max - d_u
        if slack > 0.0:
            z_s = geom.unit(trunk_tilt)
            gamma = math.acos(min(1.0, max(-1.0, geom.dot(z_t, z_s))))
            axis = geom.cross(z_t, z_s)
            a_len = geom.norm(axis)
            if gamma > 1e-12 and a_len > 1e-12:
                if trunk_len < 1e-12:
                    step = gamma
                else:
                    step = min(gamma, 2.0 * math.asin(
                        min(1.0, slack / (2.0 * trunk_len))))
                z_t = geom.mat_vec(
                    geom.rodrigues(geom.scale(axis, 1.0 / a_len), step), z_t)
    return BaseFrame(h_m=h_m,
                     r_b=geom.rotation_from_z_and_yaw(z_t, psi_i),
                     psi_t=psi_i)


def _infeasible(message, t0):
    elapsed = (time.perf_counter_ns() - t0) / 1000.0
    report = SolveReport(status=STATUS_INFEASIBLE, diagnostics=message,
                         solve_time_us=elapsed)
    return PoseSolution(legs=(_ZERO_LEG, _ZERO_LEG),
                        arms=(_ZERO_ARM, _ZERO_ARM),
                        layout=None, base=None, report=report)


def _clamp_joints(joints, side, spec, flags):
    if not spec.joint_limits:
        return joints
    updates = None
    for name, key, (lo, hi) in _limit_bands(spec, side, joints.FIELDS):
        value = getattr(joints, name)
        clamped = min(max(value, lo), hi)
        if clamped != value:
            if updates is None:
                updates = {}
            updates[name] = clamped
            flags.append("limit:%s" % key)
    if updates:
        return replace(joints, **updates)
    return joints


def generate_pose(spec, constraints, tol=1e-4, heading_offset=0.1,
                  leg_blend=0.5, trunk_clearance=0.06, max_iter=40):
    """Run the full pipeline for one constraint set.

    Never raises for adjustable or infeasible requests; inspect
    report.status instead.  Identical inputs give bit-identical outputs.
    """
    t0 = time.perf_counter_ns()
    com = constraints.com
    feet = constraints.feet
    local_feet = FootFrames(
        f_l=geom.sub(feet.f_l, com), f_r=geom.sub(feet.f_r, com),
        r_fl=feet.r_fl, r_fr=feet.r_fr)
    masses = model.aggregate_masses(spec)
    psi_i = constraints.resolved_psi_i()

    try:
        plan0 = reduction.make_tilt_plan(constraints.r_i, constraints.i_z,
                                         masses)
        geo = feasibility.ankle_geometry(local_feet, spec, heading_offset)
        ext = feasibility.max_extension(
            geo.s, model.interpolate_limbs(spec.legs[0], spec.legs[1],
                                           leg_blend), spec.hip_width)
        region = feasibility.lower_region(geo, ext)
        vleg = feasibility.virtual_leg(spec.legs, ext, leg_blend)
        limits = feasibility.upper_limits(spec)
        plan1 = feasibility.precondition(plan0, region, geo, masses)
        tilt = feasibility.reachability_solve(plan1, region, geo, vleg,
                                              limits, masses, tol=tol,
                                              max_iter=max_iter)
    except (feasibility.InfeasibleError, geom.BracketError,
            geom.ConvergenceError, ValueError) as exc:
        return _infeasible(str(exc), t0)

    plan = tilt.plan
    if plan.adjusted or tilt.mode == "slide":
        status = STATUS_COM_ONLY
    elif tilt.mode == "axis":
        status = STATUS_INERTIA_ADJUSTED
    else:
        status = STATUS_EXACT

    base = trunk_frame(tilt.h_m, plan.m_u_pos, psi_i, limits, tilt.d_u,
                       constraints.trunk_tilt, geom.norm(spec.trunk_offset))
    r_b = base.r_b
    y_b = geom.mat_col(r_b, 1)
    half_w = 0.5 * spec.hip_width
    hip_l = geom.add(tilt.h_m, geom.scale(y_b, half_w))
    hip_r = geom.add(tilt.h_m, geom.scale(y_b, -half_w))

    flags = []
    try:
        leg_l = limb_ik.leg_chain(hip_l, r_b, local_feet.f_l, local_feet.r_fl,
                                  spec.legs[0])
        leg_r = limb_ik.leg_chain(hip_r, r_b, local_feet.f_r, local_feet.r_fr,
                                  spec.legs[1])
    except ValueError as exc:
        return _infeasible("leg chain failed: %s" % exc, t0)
    if leg_l.clamped:
        flags.append("left_leg_reach_clamped")
    if leg_r.clamped:
        flags.append("right_leg_reach_clamped")

    lower = reduction.lower_yaw_state(leg_l.mass_pos, leg_r.mass_pos,
                                      spec.legs[0].mass, spec.legs[1].mass,
                                      plan.r_i)
    upper = reduction.yaw_split(
        reduction.YawRequest(i_psi=constraints.i_psi, psi_i=psi_i),
        lower, spec, masses, plan.m_u_pos, plan.r_i)

    m_t_pos = geom.add(tilt.h_m, geom.mat_vec(r_b, spec.trunk_offset))
    target_l, target_r = reduction.arm_mass_targets(
        upper.m_lu_pos, upper.m_ru_pos, m_t_pos, spec)

    s_off = spec.shoulder_offset
    sh_l = geom.add(tilt.h_m, geom.mat_vec(r_b, s_off))
    sh_r = geom.add(tilt.h_m, geom.mat_vec(r_b,
                                           (s_off[0], -s_off[1], s_off[2])))
    try:
        arm_l = limb_ik.arm_chain(sh_l, r_b, target_l, spec.arms[0],
                                  trunk_clearance, tilt.h_m,
                                  yaw=upper.psi_u, side=1.0)
        arm_r = limb_ik.arm_chain(sh_r, r_b, target_r, spec.arms[1],
                                  trunk_clearance, tilt.h_m,
                                  yaw=upper.psi_u, side=-1.0)
    except ValueError as exc:
        return _infeasible("arm chain failed: %s" % exc, t0)
    if arm_l.clamped:
        flags.append("left_arm_clamped")
    if arm_r.clamped:
        flags.append("right_arm_clamped")

    joints_ll = _clamp_joints(leg_l.joints, "l", spec, flags)
    joints_rl = _clamp_joints(leg_r.joints, "r", spec, flags)
    joints_la = _clamp_joints(arm_l.joints, "l", spec, flags)
    joints_ra = _clamp_joints(arm_r.joints, "r", spec, flags)

    # Masses follow the emitted joints: recompute any limb whose joints
    # were pulled back by a limit.
    mass_ll = leg_l.mass_pos if joints_ll is leg_l.joints else \
        limb_ik.limb_mass_forward(joints_ll, hip_l, r_b, spec.legs[0])
    mass_rl = leg_r.mass_pos if joints_rl is leg_r.joints else \
        limb_ik.limb_mass_forward(joints_rl, hip_r, r_b, spec.legs[1])
    mass_la = arm_l.mass_pos if joints_la is arm_l.joints else \
        limb_ik.limb_mass_forward(joints_la, sh_l, r_b, spec.arms[0])
    mass_ra = arm_r.mass_pos if joints_ra is arm_r.joints else \
        limb_ik.limb_mass_forward(joints_ra, sh_r, r_b, spec.arms[1])

    layout = build_layout(
        spec,
        geom.add(m_t_pos, com),
        geom.add(mass_ll, com), geom.add(mass_rl, com),
        geom.add(mass_la, com), geom.add(mass_ra, com),
        geom.add(tilt.h_m, com))
    base_world = BaseFrame(h_m=geom.add(tilt.h_m, com), r_b=r_b,
                           psi_t=base.psi_t)

    elapsed = (time.perf_counter_ns() - t0) / 1000.0
    report = SolveReport(status=status, iterations=tilt.iterations,
                         residual=tilt.residual, adjusted_r_i=plan.r_i,
                         adjusted_i_z=plan.i_z(masses), flags=tuple(flags),
                         solve_time_us=elapsed)
    return PoseSolution(legs=(joints_ll, joints_rl),
                        arms=(joints_la, joints_ra),
                        layout=layout, base=base_world, report=report)
