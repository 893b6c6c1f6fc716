"""Foot-placement-derived feasibility: the valid lower-mass region, tilt
preconditioning, the virtual weighted leg, hip placement and the
reachability search over the dumbbell length.

Everything here works in the CoM frame (CoM at the origin).
"""

import math
from dataclasses import dataclass

from . import geom, model, reduction
from .geom import Mat3, Vec3


class InfeasibleError(RuntimeError):
    """No whole-body pose can satisfy the CoM for this request."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass
class FootFrames:
    f_l: Vec3
    f_r: Vec3
    r_fl: Mat3
    r_fr: Mat3


@dataclass
class AnkleGeometry:
    """Ankle points, their midpoint and the aggregate heading marker.

    a_h sits at a fixed offset from a_m along the mean foot x-heading; it
    only serves to orient the virtual-leg plane, so the offset magnitude
    is immaterial beyond avoiding degeneracy.
    """

    a_l: Vec3
    a_r: Vec3
    a_m: Vec3
    a_h: Vec3
    s: float


@dataclass
class MaxExtension:
    """Reach bounds from Fig.-style full hip extension geometry."""

    hip_reach: float       # |a - h|_max = c + a, single leg
    mass_reach: float      # |a - m_l|_max along a single leg
    hip_mid_reach: float   # |a_m - h_m|_max given the foot separation
    mass_mid_reach: float  # |a_m - m_l|_max via the leg ratio


@dataclass
class VirtualLeg:
    """Single blended leg, shortened to the achievable hip-mid extension."""

    c_v: float
    a_v: float
    dist: model.DistributionParams
    dist_inv: model.InverseDistributionParams

    @property
    def mass_reach(self):
        # Largest |a_m - m_l| the virtual leg can realise.
        return self.dist_inv.p_li * (self.a_v + self.dist_inv.p_si * self.c_v)


@dataclass
class ReachabilityLimits:
    d_min: float
    d_max: float


@dataclass
class FeasibleTilt:
    """Outcome of the reachability stage.

    mode is "direct" when the incoming plan already satisfied the upper
    distance band, "axis" when only the rod length was searched (inertia
    orientation kept) and "slide" when candidates were re-preconditioned
    onto the region surface (orientation sacrificed).
    """

    plan: reduction.TiltPlan
    h_m: Vec3
    d_u: float
    bracket_points: tuple
    iterations: int
    residual: float
    mode: str


def ankle_geometry(feet, spec, heading_offset=0.1):
    a_l = geom.add(feet.f_l, geom.mat_vec(feet.r_fl, spec.legs[0].end_offset))
    a_r = geom.add(feet.f_r, geom.mat_vec(feet.r_fr, spec.legs[1].end_offset))
    a_m = geom.scale(geom.add(a_l, a_r), 0.5)
    heading = geom.add(geom.mat_col(feet.r_fl, 0), geom.mat_col(feet.r_fr, 0))
    if geom.norm(heading) < 1e-9:
        raise ValueError("foot headings are anti-parallel: no aggregate "
                         "x-direction for the stance")
    a_h = geom.add(a_m, geom.scale(geom.unit(heading), heading_offset))
    return AnkleGeometry(a_l=a_l, a_r=a_r, a_m=a_m, a_h=a_h,
                         s=geom.dist(a_l, a_r))


def max_extension(s, leg, hip_width):
    """Reach bounds for ankle separation s using the blended leg.

    Hip-mid reach peaks at s = hip_width and shrinks as the stance
    widens or narrows; the mass-mid reach scales it by the single-leg
    mass/hip reach ratio.
    """
    hip_reach = leg.c + leg.a
    half_gap = 0.5 * (s - hip_width)
    if abs(half_gap) >= hip_reach:
        raise InfeasibleError(
            "feet separated beyond leg reach: |s - h_w|/2 = %.3f >= %.3f"
            % (abs(half_gap), hip_reach))
    mass_reach = hip_reach - leg.dist.p_l * (leg.c + leg.dist.p_s * leg.a)
    hip_mid_reach = math.sqrt(hip_reach * hip_reach - half_gap * half_gap)
    return MaxExtension(
        hip_reach=hip_reach,
        mass_reach=mass_reach,
        hip_mid_reach=hip_mid_reach,
        mass_mid_reach=hip_mid_reach * mass_reach / hip_reach)


def lower_region(geo, ext):
    radius = math.hypot(0.5 * geo.s, ext.mass_mid_reach)
    return geom.BallPairRegion(center_left=geo.a_l, center_right=geo.a_r,
                               radius=radius)


def virtual_leg(legs, ext, w_left=0.5):
    blended = model.interpolate_limbs(legs[0], legs[1], w_left)
    k = ext.hip_mid_reach / (blended.c + blended.a)
    return VirtualLeg(c_v=blended.c * k, a_v=blended.a * k,
                      dist=blended.dist, dist_inv=blended.dist_inv)


def precondition(plan, region, geo, masses):
    """Pull an out-of-region lower mass back onto the region surface.

    The mass slides along the ray from the ankle midpoint through its
    requested position, which moves continuously with the requested tilt
    (a closest-point projection would jump to the far surface at large
    angles).  The rod length and upper mass are rebuilt from the slid
    point; the tilt axis is re-derived from it while keeping the fused
    yaw of the incoming orientation.
    """
    if region.contains(plan.m_l_pos):
        return plan
    ray = geom.sub(plan.m_l_pos, geo.a_m)
    if geom.norm(ray) < 1e-12:
        raise InfeasibleError("requested lower mass coincides with the ankle "
                              "midpoint; slide direction undefined")
    m_new = region.ray_exit(geo.a_m, geom.unit(ray))
    return _plan_through_point(m_new, plan.r_i, masses)


def _plan_through_point(m_l_pos, r_i_old, masses, tol=1e-12):
    """Tilt plan whose lower mass sits exactly at m_l_pos, with the tilt
    axis re-derived from it and the fused yaw of r_i_old preserved."""
    l_l = geom.norm(m_l_pos)
    if l_l < tol:
        # Rod collapsed onto the CoM: orientation is unconstrained, keep it.
        return reduction.plan_from_lower_distance(r_i_old, 0.0, masses,
                                                  adjusted=True)
    z_new = geom.scale(m_l_pos, -1.0 / l_l)
    r_new = geom.rotation_from_z_and_yaw(z_new, geom.fused_yaw(r_i_old))
    return reduction.plan_from_lower_distance(r_new, l_l, masses,
                                              adjusted=True)


_LIMITS_CACHE = {}


def upper_limits(spec):
    """Band of distances from the hip midpoint at which the upper-body
    barycenter can sit, from a scalar model along the trunk axis with the
    arms fully toward / away from the hips."""
    hit = _LIMITS_CACHE.get(id(spec))
    if hit is not None and hit[0] is spec:
        return hit[1]
    t_z = geom.norm(spec.trunk_offset)
    s_z = spec.shoulder_offset[2]
    m_u = spec.trunk_mass + spec.arms[0].mass + spec.arms[1].mass
    near = spec.trunk_mass * t_z
    far = spec.trunk_mass * t_z
    for arm in spec.arms:
        reach = arm.max_mass_reach()
        near += arm.mass * (s_z - reach)
        far += arm.mass * (s_z + reach)
    limits = ReachabilityLimits(d_min=max(0.0, near / m_u), d_max=far / m_u)
    _LIMITS_CACHE[id(spec)] = (spec, limits)
    return limits


def hip_midpoint(m_l_pos, geo, vleg):
    """Hip midpoint that makes the virtual leg realise the lower mass.

    The mass, the ankle midpoint and the point p on the virtual thigh are
    collinear by the inverse distribution construction; the thigh segment
    beyond p is recovered by rotating the p->a_m direction in the
    virtual-leg plane by the law-of-cosines angle.
    """
    amx, amy, amz = geo.a_m
    vx = m_l_pos[0] - amx
    vy = m_l_pos[1] - amy
    vz = m_l_pos[2] - amz
    span = math.sqrt(vx * vx + vy * vy + vz * vz)
    p_si = vleg.dist_inv.p_si
    p_li = vleg.dist_inv.p_li
    if span < 1e-12:
        raise InfeasibleError("lower mass at the ankle midpoint is not "
                              "reachable by the virtual leg")
    pa = span / p_li                  # |p - a_m|
    pk = p_si * vleg.c_v              # |p - k|
    if pk < 1e-12:
        # p_si = 0 (mass on the lower link): the mass does not constrain
        # the thigh, take the straightest hip along the mass ray.
        k = (pa + (1.0 - p_si) * vleg.c_v) / span
        return (amx + vx * k, amy + vy * k, amz + vz * k)
    cos_theta = (pa * pa + pk * pk - vleg.a_v * vleg.a_v) / (2.0 * pa * pk)
    if cos_theta > 1.0 + 1e-9 or cos_theta < -1.0 - 1e-9:
        raise InfeasibleError(
            "lower mass outside the virtual leg annulus "
            "(|a_m - m_l| = %.4f, reach %.4f)" % (span, vleg.mass_reach))
    theta = math.acos(min(1.0, max(-1.0, cos_theta)))
    phi = math.pi - theta

    hx = geo.a_h[0] - amx
    hy = geo.a_h[1] - amy
    hz = geo.a_h[2] - amz
    nx = vy * hz - vz * hy
    ny = vz * hx - vx * hz
    nz = vx * hy - vy * hx
    n_len = math.sqrt(nx * nx + ny * ny + nz * nz)
    if n_len < 1e-12:
        raise InfeasibleError("virtual leg plane is degenerate: lower mass "
                              "lies on the heading line")
    back = (-vx / span, -vy / span, -vz / span)  # p -> a_m direction
    thigh = geom.rotate_about((nx / n_len, ny / n_len, nz / n_len), phi, back)
    seg = (1.0 - p_si) * vleg.c_v
    return (amx + vx / p_li + thigh[0] * seg,
            amy + vy / p_li + thigh[1] * seg,
            amz + vz / p_li + thigh[2] * seg)


def reachability_solve(plan, region, geo, vleg, limits, masses,
                       tol=1e-4, max_iter=40):
    """Find a rod length whose upper-mass distance from the hip midpoint
    falls inside [d_min, d_max].

    The bracket endpoints are the intersections m_1 (deep) and m_2
    (shallow) of the tilt axis with the valid region, additionally
    clamped to the virtual leg's reach ball so every candidate is
    kinematically evaluable.  If the axis bracket has no sign change the
    search moves to the m_2..m_3 family, where each candidate is slid
    back onto the region surface (m_3 is the slide of the CoM itself,
    i.e. rod length zero); those candidates give up the tilt axis but
    keep the CoM.

    Candidate evaluations exploit that with the CoM pinned at the origin
    the upper mass is always -(m_l/m_u) times the lower mass position, so
    only the final root pays for re-deriving the inertia orientation.
    """
    plan = _clamp_to_reach(plan, geo, vleg, masses)
    h_m = hip_midpoint(plan.m_l_pos, geo, vleg)
    d_u = geom.dist(h_m, plan.m_u_pos)
    if limits.d_min - tol <= d_u <= limits.d_max + tol:
        return FeasibleTilt(plan=plan, h_m=h_m, d_u=d_u, bracket_points=(),
                            iterations=0, residual=0.0, mode="direct")
    d_s = limits.d_min if d_u < limits.d_min else limits.d_max

    ratio = masses.m_l / masses.m_u
    z0 = geom.mat_col(plan.r_i, 2)
    balls = ((region.center_left, region.radius),
             (region.center_right, region.radius),
             (geo.a_m, vleg.mass_reach))
    span = geom.line_balls_interval((0.0, 0.0, 0.0), geom.scale(z0, -1.0),
                                    balls)
    if span is None:
        raise InfeasibleError("tilt axis misses the valid lower-mass region",
                              diagnostics={"d_u": d_u, "d_s": d_s})
    t_lo = max(span[0], 0.0)
    t_hi = span[1]
    if t_hi < t_lo:
        raise InfeasibleError("valid lower-mass interval is empty on the "
                              "tilt axis", diagnostics={"d_u": d_u})

    def f_point(m):
        # The upper mass is the lower one reflected through the CoM by
        # the mass ratio, so d_u needs no plan construction here.
        hm = hip_midpoint(m, geo, vleg)
        dx = hm[0] + ratio * m[0]
        dy = hm[1] + ratio * m[1]
        dz = hm[2] + ratio * m[2]
        return math.sqrt(dx * dx + dy * dy + dz * dz) - d_s

    def f_axis(t):
        return f_point((-t * z0[0], -t * z0[1], -t * z0[2]))

    # Slide-family candidates always start outside the valid set (the
    # family only runs below the axis entry point), so the projection
    # needs just the far ray/sphere roots from the ankle midpoint.
    amx, amy, amz = geo.a_m
    ball_data = tuple(
        (amx - c[0], amy - c[1], amz - c[2],
         (amx - c[0]) ** 2 + (amy - c[1]) ** 2 + (amz - c[2]) ** 2 - r * r)
        for c, r in balls)

    def slide_point(lam):
        rx = -lam * z0[0] - amx
        ry = -lam * z0[1] - amy
        rz = -lam * z0[2] - amz
        rn = math.sqrt(rx * rx + ry * ry + rz * rz)
        if rn < 1e-12:
            raise InfeasibleError("slide ray degenerate: CoM at the ankle "
                                  "midpoint")
        rx /= rn
        ry /= rn
        rz /= rn
        t = math.inf
        for ox, oy, oz, c0 in ball_data:
            b = rx * ox + ry * oy + rz * oz
            disc = b * b - c0
            if disc < 0.0:
                raise InfeasibleError("slide ray misses the valid region")
            t = min(t, -b + math.sqrt(disc))
        return (amx + rx * t, amy + ry * t, amz + rz * t)

    m_1 = geom.scale(z0, -t_hi)
    m_2 = geom.scale(z0, -t_lo)
    f_1 = f_axis(t_hi)
    f_2 = f_axis(t_lo)

    if f_1 * f_2 <= 0.0 or abs(f_1) < tol or abs(f_2) < tol:
        root, iters = geom.regula_falsi(f_axis, t_lo, t_hi, tol=tol,
                                        max_iter=max_iter, f_lo=f_2, f_hi=f_1)
        cand = reduction.plan_from_lower_distance(plan.r_i, root, masses,
                                                  adjusted=plan.adjusted)
        return _finish(cand, geo, vleg, d_s, (m_1, m_2), iters, "axis")

    # Axis bracket is one-sided: fall back to the surface-slide family
    # between m_2 (rod length t_lo) and m_3 (rod length 0).
    f_slide = lambda lam: f_point(slide_point(lam))
    f_3 = f_slide(0.0)
    m_3 = slide_point(0.0)
    if f_2 * f_3 > 0.0 and abs(f_3) >= tol:
        raise InfeasibleError(
            "no sign change across the reachability brackets",
            diagnostics={"f_m1": f_1, "f_m2": f_2, "f_m3": f_3, "d_s": d_s})
    if t_lo <= 0.0:
        # Degenerate family (CoM inside the region): m_3 is the only
        # candidate; accept it only if it already satisfies the band.
        if abs(f_3) >= tol:
            raise InfeasibleError(
                "surface-slide bracket degenerate and m_3 misses the band",
                diagnostics={"f_m1": f_1, "f_m2": f_2, "f_m3": f_3,
                             "d_s": d_s})
        root, iters = 0.0, 0
    else:
        root, iters = geom.regula_falsi(f_slide, 0.0, t_lo, tol=tol,
                                        max_iter=max_iter, f_lo=f_3, f_hi=f_2)
    cand = _plan_through_point(slide_point(root), plan.r_i, masses)
    return _finish(cand, geo, vleg, d_s, (m_1, m_2, m_3), iters, "slide")


def _finish(cand, geo, vleg, d_s, brackets, iters, mode):
    hm = hip_midpoint(cand.m_l_pos, geo, vleg)
    d_u = geom.dist(hm, cand.m_u_pos)
    return FeasibleTilt(plan=cand, h_m=hm, d_u=d_u, bracket_points=brackets,
                        iterations=iters, residual=abs(d_u - d_s), mode=mode)


def _clamp_to_reach(plan, geo, vleg, masses):
    """Keep the lower mass inside the virtual leg's reach ball around the
    ankle midpoint (slides along the same ankle-midpoint ray family as
    precondition, so the two stay continuous)."""
    v = geom.sub(plan.m_l_pos, geo.a_m)
    span = geom.norm(v)
    reach = vleg.mass_reach
    if span <= reach:
        return plan
    m_new = geom.add(geo.a_m, geom.scale(v, reach / span))
    return _plan_through_point(m_new, plan.r_i, masses)
