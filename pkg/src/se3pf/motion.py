"""Constant-velocity motion model.

Controls are per-step pose deltas obtained by differencing consecutive
ground-truth poses with a unit time step.  The rotational part is a
roll/pitch/yaw triple applied on the right of the current rotation; the
translational part is added in the world frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geom import Pose, euler_to_rotation, rotation_to_euler, wrap_angle

DEFAULT_NOISE_FRACTION = 0.05


@dataclass(frozen=True, eq=False)
class Control:
    """``[dx, dy, dz]`` in meters and ``[droll, dpitch, dyaw]`` in radians."""

    translation: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "translation", np.array(self.translation, dtype=float).reshape(3))
        object.__setattr__(self, "rotation", np.array(self.rotation, dtype=float).reshape(3))

    @classmethod
    def zero(cls) -> Control:
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, c) -> Control:
        c = np.asarray(c, dtype=float)
        return cls(c[:3], c[3:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation])

    def __repr__(self):
        return f"Control({self.as_vector().tolist()})"


def derive_controls(gt) -> list[Control]:
    """Controls between consecutive poses of ``gt``.

    ``gt`` is a Trajectory or a sequence of Pose.  The rotation delta is the
    Euler decomposition of ``R_prev^T R_next``; raises ValueError for fewer
    than two poses and GeometryError at gimbal lock.
    """
    poses: Sequence[Pose] = gt.poses if hasattr(gt, "poses") else list(gt)
    if len(poses) < 2:
        raise ValueError("need at least two poses to derive controls")
    rots = np.stack([p.rotation for p in poses])
    trans = np.stack([p.translation for p in poses])
    rel = np.swapaxes(rots[:-1], -1, -2) @ rots[1:]
    angles = rotation_to_euler(rel)
    dts = trans[1:] - trans[:-1]
    return [Control(dt, da) for dt, da in zip(dts, angles)]


def perturb_controls(c: Control, fraction: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent noisy copies of ``c`` as an ``(size, 6)`` array.

    Each component gets zero-mean Gaussian noise with standard deviation
    ``fraction * |c_i|``; zero components stay exactly zero.
    """
    if fraction < 0:
        raise ValueError("noise fraction must be non-negative")
    base = c.as_vector()
    noisy = base + rng.standard_normal((size, 6)) * (fraction * np.abs(base))
    noisy[:, 3:] = wrap_angle(noisy[:, 3:])
    return noisy


def perturb_control(c: Control, fraction: float, rng: np.random.Generator) -> Control:
    return Control.from_vector(perturb_controls(c, fraction, rng, 1)[0])


def propagate(pose: Pose, c: Control) -> Pose:
    """Apply a control: rotation right-multiplied, translation added in world frame."""
    r_in = euler_to_rotation(*c.rotation)
    return Pose(pose.rotation @ r_in, pose.translation + c.translation)


def propagate_arrays(rotations: np.ndarray, translations: np.ndarray, controls: np.ndarray):
    """Vectorised :func:`propagate` over ``(n, 3, 3)``, ``(n, 3)`` and ``(n, 6)`` arrays."""
    r_in = euler_to_rotation(controls[:, 3], controls[:, 4], controls[:, 5])
    return rotations @ r_in, translations + controls[:, :3]
