"""Rotation and SE(3) primitives.

Poses are kept as (rotation matrix, translation) pairs.  Twists are plain
6-vectors ordered ``[x, y, z, phi, theta, psi]``: translational part first,
rotation vector last.  Most functions accept stacked inputs with arbitrary
leading dimensions so the particle filter can run them over a whole set at
once; the scalar call is just the zero-batch case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Boundary of the log map: trace(R) <= -1 + PI_TOL means the angle is pi.
PI_TOL = 1e-9
# Below this rotation angle the closed forms switch to Taylor series.
SMALL_ANGLE = 1e-2
# Quaternion norm tolerance on entry.
QUAT_TOL = 1e-6


class GeometryError(ValueError):
    """Raised for inputs outside a map's domain."""


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: ``x -> rotation @ x + translation``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float).reshape(3, 3)
        t = np.array(self.translation, dtype=float).reshape(3)
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> Pose:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, h) -> Pose:
        h = np.asarray(h, dtype=float)
        return cls(h[:3, :3], h[:3, 3])

    def matrix(self) -> np.ndarray:
        h = np.eye(4)
        h[:3, :3] = self.rotation
        h[:3, 3] = self.translation
        return h

    def compose(self, other: Pose) -> Pose:
        return pose_compose(self, other)

    def inverse(self) -> Pose:
        return pose_inverse(self)

    def __repr__(self):
        return f"Pose(rotation={self.rotation.tolist()}, translation={self.translation.tolist()})"


def pose_compose(a: Pose, b: Pose) -> Pose:
    return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def pose_inverse(a: Pose) -> Pose:
    rt = a.rotation.T
    return Pose(rt, -rt @ a.translation)


def is_rotation(r, tol: float = QUAT_TOL) -> bool:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3) or not np.all(np.isfinite(r)):
        return False
    return bool(
        np.linalg.norm(r.T @ r - np.eye(3)) < tol and abs(np.linalg.det(r) - 1.0) < tol
    )


# --------------------------------------------------------------------------
# angles
# --------------------------------------------------------------------------


def wrap_angle(a):
    """Wrap into ``(-pi, pi]``; ``-pi`` maps to ``+pi``."""
    a = np.asarray(a, dtype=float)
    w = np.mod(a + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w <= -np.pi, w + 2.0 * np.pi, w)
    # in-range values pass through untouched so wrapping is exactly idempotent
    w = np.where((a > -np.pi) & (a <= np.pi), a, w)
    return w if w.ndim else float(w)


def circular_mean(angles, axis: int = 0):
    """Mean direction ``atan2(sum sin, sum cos)`` along ``axis``.

    Raises GeometryError when the resultant vector vanishes (norm <= 1e-12),
    e.g. for two antipodal angles.
    """
    a = np.asarray(angles, dtype=float)
    if a.size == 0:
        raise GeometryError("circular mean of an empty set")
    s = np.sin(a).sum(axis=axis)
    c = np.cos(a).sum(axis=axis)
    if np.any(np.hypot(s, c) <= 1e-12):
        raise GeometryError("circular mean undefined: resultant vector has zero length")
    # atan2 returns -pi for (-0.0, negative); fold onto the (-pi, pi] convention
    return wrap_angle(np.arctan2(s, c))


def euler_to_rotation(roll, pitch, yaw) -> np.ndarray:
    """``Rz(yaw) @ Ry(pitch) @ Rx(roll)``, written out entrywise.

    Arguments broadcast; the result has shape ``broadcast_shape + (3, 3)``.
    """
    roll, pitch, yaw = np.broadcast_arrays(
        np.asarray(roll, dtype=float), np.asarray(pitch, dtype=float), np.asarray(yaw, dtype=float)
    )
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    r = np.empty(roll.shape + (3, 3))
    r[..., 0, 0] = cy * cp
    r[..., 0, 1] = cy * sp * sr - sy * cr
    r[..., 0, 2] = cy * sp * cr + sy * sr
    r[..., 1, 0] = sy * cp
    r[..., 1, 1] = sy * sp * sr + cy * cr
    r[..., 1, 2] = sy * sp * cr - cy * sr
    r[..., 2, 0] = -sp
    r[..., 2, 1] = cp * sr
    r[..., 2, 2] = cp * cr
    return r


def rotation_to_euler(r, gimbal_tol: float = 1e-6) -> np.ndarray:
    """Inverse of :func:`euler_to_rotation`; returns ``[..., (roll, pitch, yaw)]``.

    Raises GeometryError within ``gimbal_tol`` of pitch = +-pi/2, where roll
    and yaw are not separable.
    """
    r = np.asarray(r, dtype=float)
    pitch = np.arctan2(-r[..., 2, 0], np.hypot(r[..., 0, 0], r[..., 1, 0]))
    if np.any(np.abs(np.abs(pitch) - np.pi / 2) < gimbal_tol):
        raise GeometryError("gimbal lock: pitch is within tolerance of +-pi/2")
    roll = np.arctan2(r[..., 2, 1], r[..., 2, 2])
    yaw = np.arctan2(r[..., 1, 0], r[..., 0, 0])
    return wrap_angle(np.stack([roll, pitch, yaw], axis=-1))


# --------------------------------------------------------------------------
# SO(3) / SE(3)
# --------------------------------------------------------------------------


def skew(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    s = np.zeros(w.shape[:-1] + (3, 3))
    s[..., 0, 1] = -w[..., 2]
    s[..., 0, 2] = w[..., 1]
    s[..., 1, 0] = w[..., 2]
    s[..., 1, 2] = -w[..., 0]
    s[..., 2, 0] = -w[..., 1]
    s[..., 2, 1] = w[..., 0]
    return s


def _rodrigues_coeffs(theta):
    """sin(t)/t, (1-cos t)/t^2 and (t-sin t)/t^3 with small-angle series."""
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    t2 = theta * theta
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(t) / t)
    # 1 - cos t = 2 sin^2(t/2) avoids cancellation
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 2.0 * np.sin(t / 2.0) ** 2 / (t * t))
    c = np.where(small, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0, (t - np.sin(t)) / (t * t * t))
    return a, b, c


def so3_exp(w) -> np.ndarray:
    """Rotation vector(s) to rotation matrix (Rodrigues)."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    a, b, _ = _rodrigues_coeffs(theta)
    k = skew(w)
    return np.eye(3) + a[..., None, None] * k + b[..., None, None] * (k @ k)


def so3_log(r) -> np.ndarray:
    """Rotation matrix (or stack) to rotation vector ``angle * axis``.

    Raises GeometryError at angle pi, where the axis sign is ambiguous.
    """
    r = np.asarray(r, dtype=float)
    tr = np.trace(r, axis1=-2, axis2=-1)
    if np.any(tr <= -1.0 + PI_TOL):
        raise GeometryError("log map undefined: rotation angle is pi")
    # half of vee(R - R^T) equals sin(theta) * axis
    s = 0.5 * np.stack(
        [r[..., 2, 1] - r[..., 1, 2], r[..., 0, 2] - r[..., 2, 0], r[..., 1, 0] - r[..., 0, 1]],
        axis=-1,
    )
    sin_t = np.linalg.norm(s, axis=-1)
    cos_t = 0.5 * (tr - 1.0)
    theta = np.arctan2(sin_t, cos_t)
    small = theta < SMALL_ANGLE
    t2 = theta * theta
    safe_sin = np.where(small, 1.0, sin_t)
    scale = np.where(small, 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0, theta / safe_sin)
    return scale[..., None] * s


def se3_exp(xi):
    """Twist ``[v, w]`` to Pose; stacked twists give ``(rotations, translations)``."""
    xi = np.asarray(xi, dtype=float)
    rot, trans = _se3_exp_arrays(xi)
    if xi.ndim == 1:
        return Pose(rot, trans)
    return rot, trans


def _se3_exp_arrays(xi):
    v, w = xi[..., :3], xi[..., 3:]
    theta = np.linalg.norm(w, axis=-1)
    a, b, c = _rodrigues_coeffs(theta)
    k = skew(w)
    k2 = k @ k
    rot = np.eye(3) + a[..., None, None] * k + b[..., None, None] * k2
    vmat = np.eye(3) + b[..., None, None] * k + c[..., None, None] * k2
    trans = np.einsum("...ij,...j->...i", vmat, v)
    return rot, trans


def se3_log(pose_or_rotation, translation=None) -> np.ndarray:
    """Pose to twist ``[v, w]``.

    Accepts a :class:`Pose`, or stacked ``(rotations, translations)`` arrays.
    Raises GeometryError at rotation angle pi.
    """
    if isinstance(pose_or_rotation, Pose):
        r, t = pose_or_rotation.rotation, pose_or_rotation.translation
    else:
        r = np.asarray(pose_or_rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
    w = so3_log(r)
    theta = np.linalg.norm(w, axis=-1)
    small = theta < SMALL_ANGLE
    ts = np.where(small, 1.0, theta)
    t2 = theta * theta
    # V^-1 = I - K/2 + d K^2 with d = (1 - t sin t / (2 (1 - cos t))) / t^2
    half = ts / 2.0
    d_big = (1.0 - half / np.tan(half)) / (ts * ts)
    d = np.where(small, 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0, d_big)
    k = skew(w)
    vinv = np.eye(3) - 0.5 * k + d[..., None, None] * (k @ k)
    v = np.einsum("...ij,...j->...i", vinv, t)
    return np.concatenate([v, w], axis=-1)


# --------------------------------------------------------------------------
# metrics
# --------------------------------------------------------------------------


def chordal_distance(r_gt, r_est):
    """Frobenius norm of ``r_gt^T r_est - I``; dimensionless, in [0, 2*sqrt(2)].

    Evaluated as ``||r_gt - r_est||``, equal for rotations and exactly zero
    for identical inputs.
    """
    d = np.asarray(r_gt, dtype=float) - np.asarray(r_est, dtype=float)
    out = np.sqrt(np.sum(d * d, axis=(-2, -1)))
    return out if out.ndim else float(out)


def euclidean_distance(t_gt, t_est):
    out = np.linalg.norm(np.asarray(t_gt, dtype=float) - np.asarray(t_est, dtype=float), axis=-1)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# quaternions (x, y, z, w order, as in TUM files)
# --------------------------------------------------------------------------


def quat_to_rotation(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q, axis=-1)
    if np.any(norm == 0.0) or not np.all(np.isfinite(norm)):
        raise GeometryError("zero-norm quaternion")
    x, y, z, w = np.moveaxis(q / norm[..., None], -1, 0)
    r = np.empty(q.shape[:-1] + (3, 3))
    r[..., 0, 0] = 1 - 2 * (y * y + z * z)
    r[..., 0, 1] = 2 * (x * y - z * w)
    r[..., 0, 2] = 2 * (x * z + y * w)
    r[..., 1, 0] = 2 * (x * y + z * w)
    r[..., 1, 1] = 1 - 2 * (x * x + z * z)
    r[..., 1, 2] = 2 * (y * z - x * w)
    r[..., 2, 0] = 2 * (x * z - y * w)
    r[..., 2, 1] = 2 * (y * z + x * w)
    r[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return r


def rotation_to_quat(r) -> np.ndarray:
    """Single rotation matrix to ``(qx, qy, qz, qw)`` with ``qw >= 0``."""
    m = np.asarray(r, dtype=float)
    tr = np.trace(m)
    # Shepperd: pivot on the largest diagonal term for stability
    if tr > max(m[0, 0], m[1, 1], m[2, 2]):
        s = 2.0 * np.sqrt(1.0 + tr)
        q = [(m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s, 0.25 * s]
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        q = [0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s, (m[2, 1] - m[1, 2]) / s]
    elif m[1, 1] >= m[2, 2]:
        s = 2.0 * np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
        q = [(m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s, (m[0, 2] - m[2, 0]) / s]
    else:
        s = 2.0 * np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
        q = [(m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s, (m[1, 0] - m[0, 1]) / s]
    q = np.array(q)
    q /= np.linalg.norm(q)
    return -q if q[3] < 0 else q
