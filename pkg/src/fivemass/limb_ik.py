"""Triangle-approximation limb kinematics.

A limb is the triangle (origin, knee, end) with fixed sides c and a and a
variable extension b set by the knee/elbow bend.  The limb mass sits at
the point fixed by the distribution parameters, which makes mass targets
and joint angles mutually recoverable.

Conventions (right-handed, base frame: x forward, y left, z up):

  leg   hip_yaw(z) -> hip_roll(x) -> hip_pitch(y) -> knee_pitch(y)
        -> ankle_pitch(y) -> ankle_roll(x); positive knee folds the
        shank backwards.
  arm   shoulder_yaw(z) -> shoulder_pitch(y) -> shoulder_roll(x)
        -> elbow_pitch(y); positive elbow swings the forearm forward.

Limbs extend along -z at zero angles.
"""

import math
from dataclasses import dataclass

from . import geom
from .geom import Vec3


class ReachError(ValueError):
    """Target beyond the hard reach interval of the limb."""


@dataclass
class LegJoints:
    hip_yaw: float
    hip_roll: float
    hip_pitch: float
    knee_pitch: float
    ankle_pitch: float
    ankle_roll: float

    FIELDS = ("hip_yaw", "hip_roll", "hip_pitch", "knee_pitch",
              "ankle_pitch", "ankle_roll")


@dataclass
class ArmJoints:
    shoulder_pitch: float
    shoulder_roll: float
    elbow_pitch: float
    shoulder_yaw: float = 0.0

    FIELDS = ("shoulder_pitch", "shoulder_roll", "shoulder_yaw",
              "elbow_pitch")


@dataclass
class LimbSolution:
    joints: object           # LegJoints or ArmJoints
    mass_pos: Vec3
    extension: float         # realised b [m]
    clamped: bool = False    # true when the target needed clamping


def bend_from_extension(b, c, a):
    """Interior bend angle for extension b; zero when fully stretched."""
    lo, hi = abs(c - a), c + a
    if b < lo - 1e-12 or b > hi + 1e-12:
        raise ReachError("extension %.6f outside [%.6f, %.6f]" % (b, lo, hi))
    cos_k = (c * c + a * a - b * b) / (2.0 * c * a)
    return math.pi - math.acos(min(1.0, max(-1.0, cos_k)))


def extension_from_bend(bend, c, a):
    """Inverse of bend_from_extension on [0, pi]."""
    return math.sqrt(max(0.0, c * c + a * a + 2.0 * c * a * math.cos(bend)))


def _wrap(angle):
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def leg_chain(hip_origin, base_r, foot_pos, foot_rot, leg):
    """Joint angles placing the ankle at the foot frame's ankle point.

    The leg plane is chosen to contain the hip, the ankle and the foot
    x-heading; the knee bends towards that heading.  Ankle pitch/roll
    reproduce the requested foot tilt exactly (the residual heading about
    the foot z-axis is outside the chain's reach and is dropped).  An
    out-of-reach ankle is clamped onto the reach interval and flagged.
    """
    ankle_w = geom.add(foot_pos, geom.mat_vec(foot_rot, leg.end_offset))
    a_b = geom.mat_t_vec(base_r, geom.sub(ankle_w, hip_origin))
    b_raw = geom.norm(a_b)
    if b_raw < 1e-12:
        raise ValueError("ankle coincides with the hip origin")
    c, a = leg.c, leg.a
    b = min(max(b_raw, abs(c - a) + 1e-12), c + a)
    clamped = abs(b - b_raw) > 1e-12
    a_eff = geom.scale(a_b, b / b_raw)

    x_f = geom.mat_t_vec(base_r, geom.mat_col(foot_rot, 0))
    normal = geom.cross(x_f, a_eff)
    n_len = geom.norm(normal)
    if n_len < 1e-9 * b:
        raise ValueError("foot heading is parallel to the hip-ankle line; "
                         "leg plane undefined")
    n = geom.scale(normal, 1.0 / n_len)

    hip_roll = math.asin(min(1.0, max(-1.0, n[2])))
    hip_yaw = math.atan2(-n[0], n[1])
    cz, sz = math.cos(hip_yaw), math.sin(hip_yaw)
    cr, sr = math.cos(hip_roll), math.sin(hip_roll)

    # Ankle direction in the frame after yaw and roll: lies in that
    # frame's x-z plane by construction of n, so only x and z matter.
    ax, ay, az = a_eff
    d_x = (cz * ax + sz * ay) / b
    d_z = (-sr * (-sz * ax + cz * ay) + cr * az) / b
    omega = math.atan2(-d_x, -d_z)
    gamma = math.acos(min(1.0, max(-1.0,
                                   (c * c + b * b - a * a) / (2.0 * c * b))))
    hip_pitch = _wrap(omega - gamma)
    knee = bend_from_extension(b, c, a)

    def zxy(pitch):
        cy, sy = math.cos(pitch), math.sin(pitch)
        return ((cz * cy - sz * sr * sy, -sz * cr, cz * sy + sz * sr * cy),
                (sz * cy + cz * sr * sy, cz * cr, sz * sy - cz * sr * cy),
                (-cr * sy, sr, cr * cy))

    r_pre = zxy(hip_pitch + knee)
    m = geom.mat_tmul(r_pre, geom.mat_tmul(base_r, foot_rot))
    ankle_pitch = math.atan2(m[0][2], m[2][2])
    ankle_roll = math.asin(min(1.0, max(-1.0, -m[1][2])))

    joints = LegJoints(hip_yaw=hip_yaw, hip_roll=hip_roll,
                       hip_pitch=hip_pitch, knee_pitch=knee,
                       ankle_pitch=ankle_pitch, ankle_roll=ankle_roll)
    knee_w = geom.add(hip_origin,
                      geom.mat_vec(base_r,
                                   geom.mat_vec(zxy(hip_pitch),
                                                (0.0, 0.0, -c))))
    ankle_eff_w = geom.add(hip_origin, geom.mat_vec(base_r, a_eff))
    mass = leg.mass_point(hip_origin, knee_w, ankle_eff_w)
    return LimbSolution(joints=joints, mass_pos=mass, extension=b,
                        clamped=clamped)


def _arm_mass_local(arm, elbow):
    p_s, p_l = arm.dist.p_s, arm.dist.p_l
    return (p_l * p_s * arm.a * math.sin(elbow), 0.0,
            -p_l * (arm.c + p_s * arm.a * math.cos(elbow)))


def arm_mass_distance(arm, b):
    """Distance of the arm mass from the shoulder at extension b."""
    p_s, p_l = arm.dist.p_s, arm.dist.p_l
    c, a = arm.c, arm.a
    return p_l * math.sqrt(max(0.0, (1.0 - p_s) * c * c + p_s * b * b
                               - p_s * (1.0 - p_s) * a * a))


def arm_chain(shoulder_origin, base_r, mass_target, arm, trunk_clearance,
              base_origin, yaw=0.0, side=1.0):
    """Shoulder and elbow angles placing the arm mass at the target.

    The elbow bend inverts the mass-distance relation in closed form and
    the shoulder (after the commanded yaw, which fixes the elbow plane)
    aims the in-limb mass vector at the target.  Targets inside the trunk
    cylinder are pushed radially out to the clearance surface; targets
    outside the reach annulus are clamped to its nearer boundary.  Both
    cases flag the solution.
    """
    c, a = arm.c, arm.a
    clamped = False

    t_b = geom.mat_t_vec(base_r, geom.sub(mass_target, base_origin))
    radial = math.hypot(t_b[0], t_b[1])
    if radial < trunk_clearance:
        if radial < 1e-9:
            out = (0.0, side, 0.0)
        else:
            out = (t_b[0] / radial, t_b[1] / radial, 0.0)
        t_b = (out[0] * trunk_clearance, out[1] * trunk_clearance, t_b[2])
        clamped = True

    s_b = geom.mat_t_vec(base_r, geom.sub(shoulder_origin, base_origin))
    rel = geom.sub(t_b, s_b)
    r_raw = geom.norm(rel)
    if r_raw < 1e-12:
        raise ValueError("arm mass target coincides with the shoulder")

    r_min = arm_mass_distance(arm, abs(c - a))
    r_max = arm_mass_distance(arm, c + a)
    r = min(max(r_raw, r_min), r_max)
    if abs(r - r_raw) > 1e-12:
        clamped = True
    rel = geom.scale(rel, r / r_raw)

    p_s, p_l = arm.dist.p_s, arm.dist.p_l
    if p_s < 1e-9:
        elbow = 0.0
        b = c + a
    else:
        b_sq = ((r / p_l) ** 2 - (1.0 - p_s) * c * c
                + p_s * (1.0 - p_s) * a * a) / p_s
        b = math.sqrt(max(0.0, b_sq))
        elbow = bend_from_extension(b, c, a)

    m_local = _arm_mass_local(arm, elbow)
    m_hat = geom.scale(m_local, 1.0 / r)
    t_hat = geom.mat_vec(geom.rot_z(-yaw), geom.scale(rel, 1.0 / r))

    # Roll from the y-component, then pitch aligns the x-z projection.
    denom = -m_hat[2]
    if denom < 1e-12:
        raise ValueError("arm mass vector has no axial component; cannot aim")
    sin_roll = t_hat[1] / denom
    if abs(sin_roll) > 1.0:
        sin_roll = math.copysign(1.0, sin_roll)
        clamped = True
    roll = math.asin(sin_roll)
    pitch = _wrap(math.atan2(t_hat[0], t_hat[2])
                  - math.atan2(m_hat[0], m_hat[2] * math.cos(roll)))

    joints = ArmJoints(shoulder_pitch=pitch, shoulder_roll=roll,
                       elbow_pitch=elbow, shoulder_yaw=yaw)
    r1 = geom.rot_zyx(yaw, pitch, roll)
    mass = geom.add(shoulder_origin,
                    geom.mat_vec(base_r, geom.mat_vec(r1, m_local)))
    return LimbSolution(joints=joints, mass_pos=mass, extension=b,
                        clamped=clamped)


def leg_forward(joints, hip_origin, base_r, leg):
    """Knee/ankle positions and foot rotation from leg joint angles."""
    r1 = geom.rot_zxy(joints.hip_yaw, joints.hip_roll, joints.hip_pitch)
    knee = geom.add(hip_origin,
                    geom.mat_vec(base_r, geom.mat_vec(r1, (0.0, 0.0, -leg.c))))
    r2 = geom.rot_zxy(joints.hip_yaw, joints.hip_roll,
                      joints.hip_pitch + joints.knee_pitch)
    ankle = geom.add(knee,
                     geom.mat_vec(base_r, geom.mat_vec(r2, (0.0, 0.0, -leg.a))))
    foot_rot = geom.mat_mul(
        base_r,
        geom.mat_mul(geom.rot_zxy(joints.hip_yaw, joints.hip_roll,
                                  joints.hip_pitch + joints.knee_pitch
                                  + joints.ankle_pitch),
                     geom.rot_x(joints.ankle_roll)))
    return knee, ankle, foot_rot


def arm_forward(joints, shoulder_origin, base_r, arm):
    """Elbow and hand positions from arm joint angles."""
    r1 = geom.rot_zyx(joints.shoulder_yaw, joints.shoulder_pitch,
                      joints.shoulder_roll)
    elbow = geom.add(shoulder_origin,
                     geom.mat_vec(base_r, geom.mat_vec(r1, (0.0, 0.0, -arm.c))))
    r2 = geom.mat_mul(r1, geom.rot_y(-joints.elbow_pitch))
    hand = geom.add(elbow,
                    geom.mat_vec(base_r, geom.mat_vec(r2, (0.0, 0.0, -arm.a))))
    return elbow, hand


def limb_mass_forward(joints, origin, base_r, limb):
    """Limb mass position from joint angles (forward map of the chains)."""
    if isinstance(joints, LegJoints):
        knee, ankle, _ = leg_forward(joints, origin, base_r, limb)
        return limb.mass_point(origin, knee, ankle)
    elbow, hand = arm_forward(joints, origin, base_r, limb)
    return limb.mass_point(origin, elbow, hand)
