"""Geometry and numeric primitives: vectors, rotations, two-ball regions,
bracketed root finding.

Vectors are plain 3-tuples and rotation matrices are 3x3 row tuples.  The
solver has to run in the tens-of-microseconds range, and tuple arithmetic
through these helpers is several times faster than allocating numpy arrays
per call.  Callers that want numpy can wrap the results themselves.
"""

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Mat3 = tuple[Vec3, Vec3, Vec3]

IDENTITY: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """Root search ran out of iterations; carries the best iterate."""

    def __init__(self, best, value, iterations):
        super().__init__(
            "no convergence after %d iterations (best x=%.9g, f=%.3g)"
            % (iterations, best, value))
        self.best = best
        self.value = value
        self.iterations = iterations


# ---------------------------------------------------------------------------
# vector helpers

def add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def scale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def norm2(a):
    return a[0] * a[0] + a[1] * a[1] + a[2] * a[2]


def norm(a):
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def dist(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def unit(a):
    n = norm(a)
    if n < 1e-15:
        raise ValueError("cannot normalise a zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


# ---------------------------------------------------------------------------
# rotations

def mat_vec(m, v):
    return (m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2])


def mat_t_vec(m, v):
    """Apply the transpose of m, i.e. rotate v into m's local frame."""
    return (m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2])


def mat_mul(a, b):
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a
    (b00, b01, b02), (b10, b11, b12), (b20, b21, b22) = b
    return ((a00 * b00 + a01 * b10 + a02 * b20,
             a00 * b01 + a01 * b11 + a02 * b21,
             a00 * b02 + a01 * b12 + a02 * b22),
            (a10 * b00 + a11 * b10 + a12 * b20,
             a10 * b01 + a11 * b11 + a12 * b21,
             a10 * b02 + a11 * b12 + a12 * b22),
            (a20 * b00 + a21 * b10 + a22 * b20,
             a20 * b01 + a21 * b11 + a22 * b21,
             a20 * b02 + a21 * b12 + a22 * b22))


def mat_tmul(a, b):
    """Transpose(a) @ b without forming the transpose."""
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a
    (b00, b01, b02), (b10, b11, b12), (b20, b21, b22) = b
    return ((a00 * b00 + a10 * b10 + a20 * b20,
             a00 * b01 + a10 * b11 + a20 * b21,
             a00 * b02 + a10 * b12 + a20 * b22),
            (a01 * b00 + a11 * b10 + a21 * b20,
             a01 * b01 + a11 * b11 + a21 * b21,
             a01 * b02 + a11 * b12 + a21 * b22),
            (a02 * b00 + a12 * b10 + a22 * b20,
             a02 * b01 + a12 * b11 + a22 * b21,
             a02 * b02 + a12 * b12 + a22 * b22))


def transpose(m):
    return ((m[0][0], m[1][0], m[2][0]),
            (m[0][1], m[1][1], m[2][1]),
            (m[0][2], m[1][2], m[2][2]))


def mat_col(m, j):
    return (m[0][j], m[1][j], m[2][j])


def rot_x(angle):
    c = math.cos(angle)
    s = math.sin(angle)
    return ((1.0, 0.0, 0.0), (0.0, c, -s), (0.0, s, c))


def rot_y(angle):
    c = math.cos(angle)
    s = math.sin(angle)
    return ((c, 0.0, s), (0.0, 1.0, 0.0), (-s, 0.0, c))


def rot_z(angle):
    c = math.cos(angle)
    s = math.sin(angle)
    return ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))


def rot_zxy(z, x, y):
    """Rz(z) @ Rx(x) @ Ry(y) composed in closed form (leg hip stack)."""
    cz, sz = math.cos(z), math.sin(z)
    cx, sx = math.cos(x), math.sin(x)
    cy, sy = math.cos(y), math.sin(y)
    return ((cz * cy - sz * sx * sy, -sz * cx, cz * sy + sz * sx * cy),
            (sz * cy + cz * sx * sy, cz * cx, sz * sy - cz * sx * cy),
            (-cx * sy, sx, cx * cy))


def rot_zyx(z, y, x):
    """Rz(z) @ Ry(y) @ Rx(x) composed in closed form (shoulder stack)."""
    cz, sz = math.cos(z), math.sin(z)
    cy, sy = math.cos(y), math.sin(y)
    cx, sx = math.cos(x), math.sin(x)
    return ((cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx),
            (sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx),
            (-sy, cy * sx, cy * cx))


def rotate_about(axis, angle, v):
    """Rotate v about a unit axis by angle (vector-form Rodrigues)."""
    c = math.cos(angle)
    s = math.sin(angle)
    kx, ky, kz = axis
    vx, vy, vz = v
    d = (kx * vx + ky * vy + kz * vz) * (1.0 - c)
    return (vx * c + (ky * vz - kz * vy) * s + kx * d,
            vy * c + (kz * vx - kx * vz) * s + ky * d,
            vz * c + (kx * vy - ky * vx) * s + kz * d)


def rodrigues(axis, angle):
    """Axis-angle rotation matrix; axis must be unit length within 1e-9."""
    if abs(norm2(axis) - 1.0) > 2e-9:
        raise ValueError("rodrigues axis must be a unit vector")
    kx, ky, kz = axis
    c = math.cos(angle)
    s = math.sin(angle)
    v = 1.0 - c
    return ((c + kx * kx * v, kx * ky * v - kz * s, kx * kz * v + ky * s),
            (ky * kx * v + kz * s, c + ky * ky * v, ky * kz * v - kx * s),
            (kz * kx * v - ky * s, kz * ky * v + kx * s, c + kz * kz * v))


def rotation_from_z_and_yaw(z_des, yaw):
    """Rotation whose z-axis is z_des and whose fused yaw equals yaw.

    Composed as (minimal tilt taking +z to z_des) * (pure yaw about
    global z), which is the unique such rotation away from the tilt-pi
    singularity.
    """
    if abs(norm2(z_des) - 1.0) > 2e-9:
        raise ValueError("z_des must be a unit vector")
    zx, zy, zz = z_des
    if zz < -1.0 + 1e-12:
        raise ValueError("tilt angle pi: heading undefined for z = -e_z")
    # Minimal tilt R: I + [w]x + [w]x^2/(1+zz) with w = e_z x z_des.
    f = 1.0 / (1.0 + zz)
    tilt = ((zz + zy * zy * f, -zx * zy * f, zx),
            (-zx * zy * f, zz + zx * zx * f, zy),
            (-zx, -zy, zz))
    if yaw == 0.0:
        return tilt
    return mat_mul(tilt, rot_z(yaw))


def fused_yaw(m):
    """Heading component of a rotation under the fused-angles split."""
    t = 1.0 + m[0][0] + m[1][1] + m[2][2]
    s = m[1][0] - m[0][1]
    if t < 1e-12 and abs(s) < 1e-12:
        raise ValueError("fused yaw undefined at tilt pi")
    return 2.0 * math.atan2(s, max(t, 0.0))


def rotation_angle(m):
    """Angle of the rotation m in [0, pi]."""
    c = 0.5 * (m[0][0] + m[1][1] + m[2][2] - 1.0)
    return math.acos(min(1.0, max(-1.0, c)))


def quat_from_matrix(m):
    """Unit quaternion (w, x, y, z) for a rotation matrix (Shepperd)."""
    tr = m[0][0] + m[1][1] + m[2][2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        return (0.25 * s, (m[2][1] - m[1][2]) / s,
                (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s)
    if m[0][0] >= m[1][1] and m[0][0] >= m[2][2]:
        s = math.sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0
        return ((m[2][1] - m[1][2]) / s, 0.25 * s,
                (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s)
    if m[1][1] >= m[2][2]:
        s = math.sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0
        return ((m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s,
                0.25 * s, (m[1][2] + m[2][1]) / s)
    s = math.sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0
    return ((m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s,
            (m[1][2] + m[2][1]) / s, 0.25 * s)


def matrix_from_quat(q):
    w, x, y, z = q
    n = w * w + x * x + y * y + z * z
    if n < 1e-15:
        raise ValueError("zero quaternion")
    s = 2.0 / n
    return ((1.0 - s * (y * y + z * z), s * (x * y - w * z), s * (x * z + w * y)),
            (s * (x * y + w * z), 1.0 - s * (x * x + z * z), s * (y * z - w * x)),
            (s * (x * z - w * y), s * (y * z + w * x), 1.0 - s * (x * x + y * y)))


def quat_slerp(qa, qb, u):
    """Spherical interpolation between unit quaternions, shortest arc."""
    d = qa[0] * qb[0] + qa[1] * qb[1] + qa[2] * qb[2] + qa[3] * qb[3]
    if d < 0.0:
        qb = (-qb[0], -qb[1], -qb[2], -qb[3])
        d = -d
    if d > 1.0 - 1e-12:
        out = tuple(a + u * (b - a) for a, b in zip(qa, qb))
        n = math.sqrt(sum(v * v for v in out))
        return tuple(v / n for v in out)
    theta = math.acos(min(1.0, d))
    s = math.sin(theta)
    wa = math.sin((1.0 - u) * theta) / s
    wb = math.sin(u * theta) / s
    return tuple(wa * a + wb * b for a, b in zip(qa, qb))


def dir_slerp(da, db, u):
    """Spherical interpolation between unit direction vectors."""
    c = min(1.0, max(-1.0, dot(da, db)))
    gamma = math.acos(c)
    if gamma < 1e-12:
        return da
    axis = cross(da, db)
    n = norm(axis)
    if n < 1e-12:
        raise ValueError("antipodal directions: interpolation plane undefined")
    return mat_vec(rodrigues(scale(axis, 1.0 / n), u * gamma), da)


# ---------------------------------------------------------------------------
# two-ball region

@dataclass
class BallPairRegion:
    """Intersection of two equal-radius balls (the valid lower-mass set)."""

    center_left: Vec3
    center_right: Vec3
    radius: float

    def is_empty(self):
        return dist(self.center_left, self.center_right) > 2.0 * self.radius

    def contains(self, p, tol=1e-12):
        r = self.radius + tol
        return (dist(p, self.center_left) <= r
                and dist(p, self.center_right) <= r)

    def ray_exit(self, origin, direction):
        """Point where the ray origin + t*direction leaves the region.

        The exit is the nearer of the two far ray/sphere intersections.
        origin must lie inside the region and direction must be unit.
        """
        if self.is_empty():
            raise ValueError("region is empty")
        if not self.contains(origin, tol=1e-9):
            raise ValueError("ray origin lies outside the region")
        t = min(_ray_sphere_far(origin, direction, self.center_left, self.radius),
                _ray_sphere_far(origin, direction, self.center_right, self.radius))
        return add(origin, scale(direction, t))


def _ray_sphere_far(origin, direction, center, radius):
    # Far root of |origin + t d - center| = radius; exists when origin is
    # inside the sphere.
    oc = sub(origin, center)
    b = dot(direction, oc)
    disc = b * b - (norm2(oc) - radius * radius)
    if disc < 0.0:
        raise ValueError("ray misses the sphere")
    return -b + math.sqrt(disc)


def line_balls_interval(point, direction, balls):
    """Parameter interval (t_lo, t_hi) where point + t*direction lies in
    every ball of `balls` (center, radius pairs), or None if empty."""
    t_lo = -math.inf
    t_hi = math.inf
    for center, radius in balls:
        oc = sub(point, center)
        b = dot(direction, oc)
        disc = b * b - (norm2(oc) - radius * radius)
        if disc < 0.0:
            return None
        root = math.sqrt(disc)
        t_lo = max(t_lo, -b - root)
        t_hi = min(t_hi, -b + root)
    if t_lo > t_hi:
        return None
    return (t_lo, t_hi)


# ---------------------------------------------------------------------------
# root finding

def regula_falsi(f, lo, hi, tol=1e-9, max_iter=100, f_lo=None, f_hi=None):
    """Illinois-damped regula falsi on [lo, hi].

    Returns (root, iterations) with |f(root)| < tol.  Endpoints that
    already satisfy tol are returned with zero iterations.  Raises
    BracketError without a sign change and ConvergenceError when the
    iteration budget runs out.  Precomputed endpoint values may be passed
    through f_lo / f_hi to avoid re-evaluation.
    """
    if f_lo is None:
        f_lo = f(lo)
    if abs(f_lo) < tol:
        return lo, 0
    if f_hi is None:
        f_hi = f(hi)
    if abs(f_hi) < tol:
        return hi, 0
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise BracketError(
            "no sign change on bracket: f(%.6g)=%.3g, f(%.6g)=%.3g"
            % (lo, f_lo, hi, f_hi))
    side = 0
    x, fx = lo, f_lo
    for i in range(1, max_iter + 1):
        x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        fx = f(x)
        if abs(fx) < tol:
            return x, i
        if (fx > 0.0) == (f_lo > 0.0):
            lo, f_lo = x, fx
            if side == -1:
                f_hi *= 0.5  # Illinois: stop the stale endpoint stagnating
            side = -1
        else:
            hi, f_hi = x, fx
            if side == 1:
                f_lo *= 0.5
            side = 1
    raise ConvergenceError(x, fx, max_iter)
