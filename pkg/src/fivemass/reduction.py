"""Centroidal reductions.

The tilting part of the requested inertia is realised by a dumbbell: the
lower-body and upper-body masses on a massless rod through the CoM along
the inertia z-axis.  The yaw part is realised by splitting each of those
masses into a pair spread in the plane normal to that axis.
"""

import math
from dataclasses import dataclass

from . import geom
from .geom import Mat3, Vec3


@dataclass
class PrincipalComponents:
    """Axis components of the inertia: i_x = sum(m x^2) etc.

    The principal moments follow as i_xx = i_z + i_y, i_yy = i_z + i_x,
    i_zz = i_x + i_y, which keeps them physically consistent by
    construction.
    """

    i_x: float
    i_y: float
    i_z: float

    @property
    def moments(self):
        return (self.i_z + self.i_y, self.i_z + self.i_x, self.i_x + self.i_y)


@dataclass
class TiltPlan:
    """Dumbbell realisation of a tilting-inertia request.

    Positions are in the CoM frame (CoM at the origin); m_l_pos sits at
    -l_l along the inertia z-axis and m_u_pos at +l_u, so the moment
    balance m_l*l_l = m_u*l_u keeps the barycenter at the CoM.
    """

    r_i: Mat3
    l_i: float
    l_l: float
    l_u: float
    m_l_pos: Vec3
    m_u_pos: Vec3
    adjusted: bool = False

    def i_z(self, masses):
        return masses.m_l * self.l_l ** 2 + masses.m_u * self.l_u ** 2


@dataclass
class YawRequest:
    i_psi: float   # total yaw inertia about the inertia z-axis [kg m^2]
    psi_i: float   # inertia yaw angle [rad]


@dataclass
class LowerYawState:
    i_l: float     # leg-pair yaw inertia about the inertia z-axis
    psi_l: float   # angle of the leg-mass line, measured from the y-axis
    s_l: float     # leg-mass separation


@dataclass
class UpperYawState:
    s_u: float
    psi_u: float
    i_u: float     # achieved yaw contribution of the upper pair
    m_lu_pos: Vec3
    m_ru_pos: Vec3


def dumbbell_from_inertia(i_z, masses):
    """Rod length and mass distances realising tilting inertia i_z.

    l_i = sqrt(i_z (m_l+m_u)/(m_l m_u)) and the split l_l, l_u follows the
    inverse mass ratio, so m_l l_l^2 + m_u l_u^2 reconstructs i_z exactly.
    """
    m_l, m_u = masses.m_l, masses.m_u
    if m_l <= 0.0 or m_u <= 0.0:
        raise ValueError("dumbbell requires positive lower and upper masses")
    if i_z < 0.0:
        raise ValueError("tilting inertia must be non-negative")
    total = m_l + m_u
    l_i = math.sqrt(i_z * total / (m_l * m_u))
    return l_i, l_i * m_u / total, l_i * m_l / total


def place_dumbbell(r_i, l_l, l_u):
    """Mass positions in the CoM frame for a tilt rotation r_i."""
    z = geom.mat_col(r_i, 2)
    return geom.scale(z, -l_l), geom.scale(z, l_u)


def make_tilt_plan(r_i, i_z, masses, adjusted=False):
    l_i, l_l, l_u = dumbbell_from_inertia(i_z, masses)
    m_l_pos, m_u_pos = place_dumbbell(r_i, l_l, l_u)
    return TiltPlan(r_i=r_i, l_i=l_i, l_l=l_l, l_u=l_u,
                    m_l_pos=m_l_pos, m_u_pos=m_u_pos, adjusted=adjusted)


def plan_from_lower_distance(r_i, l_l, masses, adjusted=False):
    """Tilt plan with the lower mass at distance l_l along -z of r_i."""
    l_u = l_l * masses.m_l / masses.m_u
    m_l_pos, m_u_pos = place_dumbbell(r_i, l_l, l_u)
    return TiltPlan(r_i=r_i, l_i=l_l + l_u, l_l=l_l, l_u=l_u,
                    m_l_pos=m_l_pos, m_u_pos=m_u_pos, adjusted=adjusted)


def crb_from_components(pc, r_i):
    """Composite rigid body tensor R diag(moments) R^T."""
    i_xx, i_yy, i_zz = pc.moments
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            row.append(r_i[i][0] * i_xx * r_i[j][0]
                       + r_i[i][1] * i_yy * r_i[j][1]
                       + r_i[i][2] * i_zz * r_i[j][2])
        rows.append(tuple(row))
    return tuple(rows)


def _plane_angle(direction, r_i):
    """Angle of a direction projected into the plane normal to the inertia
    z-axis, measured from the inertia y-axis (right-handed about z)."""
    x_c = geom.dot(direction, geom.mat_col(r_i, 0))
    y_c = geom.dot(direction, geom.mat_col(r_i, 1))
    if x_c * x_c + y_c * y_c < 1e-24:
        return 0.0  # unobservable: the line sits on the axis
    return math.atan2(-x_c, y_c)


def lower_yaw_state(left_pos, right_pos, left_mass, right_mass, r_i):
    """Yaw contribution of the placed leg masses.

    i_l sums m*d^2 with d the distance of each mass from the inertia
    z-axis through the CoM; psi_l is the angle of the left-minus-right
    connecting line measured from the inertia y-axis.
    """
    z = geom.mat_col(r_i, 2)
    i_l = 0.0
    for pos, mass in ((left_pos, left_mass), (right_pos, right_mass)):
        axial = geom.dot(pos, z)
        i_l += mass * (geom.norm2(pos) - axial * axial)
    line = geom.sub(left_pos, right_pos)
    return LowerYawState(i_l=max(i_l, 0.0), psi_l=_plane_angle(line, r_i),
                         s_l=geom.norm(line))


def yaw_split(req, lower, spec, masses, m_u_pos, r_i):
    """Split the upper mass into a pair realising the remaining yaw inertia.

    The pair separation follows from the inertia deficit i_psi - i_l; the
    pair angle mixes the requested yaw angle with the leg yaw angle by
    mass ratio (not inertia ratio, which could divide by zero when the
    legs already provide everything).  The two particles are spread along
    the line at psi_u in the plane normal to the inertia z-axis, offset
    inversely to their masses so the pair barycenter stays at m_u_pos.
    """
    m_a = spec.arms[0].mass + 0.5 * spec.trunk_mass
    m_b = spec.arms[1].mass + 0.5 * spec.trunk_mass
    m_l, m_u = masses.m_l, masses.m_u
    deficit = req.i_psi - lower.i_l
    if deficit <= 0.0:
        s_u = 0.0
    else:
        s_u = math.sqrt(deficit * m_u / (m_a * m_b))
    psi_u = ((m_u + m_l) * req.psi_i - m_l * lower.psi_l) / m_u

    c = math.cos(psi_u)
    s = math.sin(psi_u)
    x_axis = geom.mat_col(r_i, 0)
    y_axis = geom.mat_col(r_i, 1)
    line = (c * y_axis[0] - s * x_axis[0],
            c * y_axis[1] - s * x_axis[1],
            c * y_axis[2] - s * x_axis[2])
    d_a = s_u * m_b / m_u
    d_b = s_u * m_a / m_u
    m_lu = geom.add(m_u_pos, geom.scale(line, d_a))
    m_ru = geom.sub(m_u_pos, geom.scale(line, d_b))

    z = geom.mat_col(r_i, 2)
    i_u = 0.0
    for pos, mass in ((m_lu, m_a), (m_ru, m_b)):
        axial = geom.dot(pos, z)
        i_u += mass * (geom.norm2(pos) - axial * axial)
    return UpperYawState(s_u=s_u, psi_u=psi_u, i_u=i_u,
                         m_lu_pos=m_lu, m_ru_pos=m_ru)


def arm_mass_targets(m_lu_pos, m_ru_pos, m_t_pos, spec):
    """Arm mass positions that recombine with half the trunk mass to land
    the compound upper particles exactly at m_lu_pos / m_ru_pos."""
    half_t = 0.5 * spec.trunk_mass
    targets = []
    for compound, arm in ((m_lu_pos, spec.arms[0]), (m_ru_pos, spec.arms[1])):
        if arm.mass <= 0.0:
            raise ValueError("arm mass targets need positive arm masses")
        w = (half_t + arm.mass) / arm.mass
        wt = half_t / arm.mass
        targets.append((compound[0] * w - m_t_pos[0] * wt,
                        compound[1] * w - m_t_pos[1] * wt,
                        compound[2] * w - m_t_pos[2] * wt))
    return targets[0], targets[1]


def requested_components(i_z, i_psi, psi_i):
    """Principal components implied by a pose request, for deviation
    reports: the whole yaw inertia is attributed to a mass line at angle
    psi_i from the inertia y-axis."""
    s = math.sin(psi_i)
    c = math.cos(psi_i)
    return PrincipalComponents(i_x=i_psi * s * s, i_y=i_psi * c * c, i_z=i_z)
