"""Independent ground truth for generated poses.

Recomputes the five-mass layout from joint angles alone, then the exact
CoM and composite-rigid-body tensor of the point masses, and compares
against what was requested.  The ground truth here is the five-point-mass
model itself, not a distributed-inertia robot model.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import geom, limb_ik, posegen


@dataclass(frozen=True)
class AchievedInertia:
    com: np.ndarray                # (3,)
    tensor: np.ndarray             # (3, 3), about the achieved CoM
    principal_moments: np.ndarray  # (3,), sorted descending
    principal_axes: np.ndarray     # (3, 3), columns are the axes, det +1


@dataclass(frozen=True)
class RequestedInertia:
    com: tuple
    components: object             # reduction.PrincipalComponents
    rotation: tuple                # requested principal-axes orientation


@dataclass(frozen=True)
class DeviationReport:
    com_error: float
    moment_errors: tuple           # 3 values, sorted pairing
    orientation_error: float       # geodesic angle after axis alignment


def split_joint_vector(vector):
    """20-vector in posegen.JOINT_NAMES order -> (legs, arms) dataclasses."""
    if len(vector) != len(posegen.JOINT_NAMES):
        raise ValueError("expected %d joint values, got %d"
                         % (len(posegen.JOINT_NAMES), len(vector)))
    legs = []
    arms = []
    idx = 0
    for _ in range(2):
        legs.append(limb_ik.LegJoints(*vector[idx:idx + 6]))
        idx += 6
    for _ in range(2):
        arms.append(limb_ik.ArmJoints(
            shoulder_pitch=vector[idx], shoulder_roll=vector[idx + 1],
            shoulder_yaw=vector[idx + 2], elbow_pitch=vector[idx + 3]))
        idx += 4
    return tuple(legs), tuple(arms)


def forward_layout(spec, joints, base):
    """Five-mass layout from a joint vector and a base frame.

    joints may be a flat 20-vector or a ((legs), (arms)) pair of joint
    dataclasses; base positions everything in its own frame of reference.
    """
    if len(joints) == 2 and isinstance(joints[0], (list, tuple)):
        legs, arms = joints
    else:
        legs, arms = split_joint_vector([float(v) for v in joints])
    h_m, r_b = base.h_m, base.r_b
    m_t = geom.add(h_m, geom.mat_vec(r_b, spec.trunk_offset))
    y_b = geom.mat_col(r_b, 1)
    half_w = 0.5 * spec.hip_width
    hips = (geom.add(h_m, geom.scale(y_b, half_w)),
            geom.add(h_m, geom.scale(y_b, -half_w)))
    s_off = spec.shoulder_offset
    shoulders = (geom.add(h_m, geom.mat_vec(r_b, s_off)),
                 geom.add(h_m, geom.mat_vec(r_b, (s_off[0], -s_off[1],
                                                  s_off[2]))))
    leg_masses = [limb_ik.limb_mass_forward(legs[i], hips[i], r_b,
                                            spec.legs[i]) for i in range(2)]
    arm_masses = [limb_ik.limb_mass_forward(arms[i], shoulders[i], r_b,
                                            spec.arms[i]) for i in range(2)]
    return posegen.build_layout(spec, m_t, leg_masses[0], leg_masses[1],
                                arm_masses[0], arm_masses[1], h_m)


def inertia_report(layout, spec):
    """Exact CoM and CRB inertia tensor of the five point masses."""
    masses = np.array([spec.trunk_mass, spec.legs[0].mass, spec.legs[1].mass,
                       spec.arms[0].mass, spec.arms[1].mass])
    points = np.array([layout.m_t, layout.m_ll, layout.m_rl,
                       layout.m_la, layout.m_ra])
    com = masses @ points / masses.sum()
    d = points - com
    tensor = np.zeros((3, 3))
    for m, r in zip(masses, d):
        tensor += m * (float(r @ r) * np.eye(3) - np.outer(r, r))
    moments, axes = np.linalg.eigh(tensor)
    order = np.argsort(moments)[::-1]
    moments = moments[order]
    axes = axes[:, order]
    # Deterministic signs: dominant component of the first two axes
    # non-negative, third axis completes a right-handed frame.
    for j in range(2):
        k = int(np.argmax(np.abs(axes[:, j])))
        if axes[k, j] < 0.0:
            axes[:, j] = -axes[:, j]
    axes[:, 2] = np.cross(axes[:, 0], axes[:, 1])
    return AchievedInertia(com=com, tensor=tensor,
                           principal_moments=moments, principal_axes=axes)


def compare(requested, achieved):
    """Deviation of an achieved inertia from a request.

    Moments pair sorted-descending to sorted-descending.  The orientation
    error is the relative rotation angle after aligning the achieved axes
    to the requested ones over the proper sign flips, which removes the
    eigenvector sign ambiguity.
    """
    com_error = float(np.linalg.norm(achieved.com - np.array(requested.com)))

    req_moments = np.array(requested.components.moments)
    req_axes = np.array(requested.rotation)  # rows -> matrix, columns = axes
    order = np.argsort(req_moments)[::-1]
    req_sorted = req_moments[order]
    req_axes_sorted = req_axes[:, order]
    if np.linalg.det(req_axes_sorted) < 0.0:
        req_axes_sorted = req_axes_sorted.copy()
        req_axes_sorted[:, 2] = -req_axes_sorted[:, 2]

    moment_errors = tuple(float(abs(a - b))
                          for a, b in zip(achieved.principal_moments,
                                          req_sorted))

    rel = achieved.principal_axes.T @ req_axes_sorted
    best = -2.0
    for signs in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        trace = sum(signs[k] * rel[k, k] for k in range(3))
        best = max(best, trace)
    angle = math.acos(min(1.0, max(-1.0, 0.5 * (best - 1.0))))
    return DeviationReport(com_error=com_error, moment_errors=moment_errors,
                           orientation_error=angle)


def requested_from_constraints(constraints):
    """RequestedInertia bundle for a pose request (set values)."""
    from . import reduction
    return RequestedInertia(
        com=constraints.com,
        components=reduction.requested_components(
            constraints.i_z, constraints.i_psi,
            constraints.resolved_psi_i()),
        rotation=constraints.r_i)
