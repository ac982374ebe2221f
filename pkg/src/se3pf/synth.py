"""Synthetic ground truth and noisy pose measurements.

Measurements follow a two-component Gaussian mixture: most poses get small
inlier noise, a fraction ``outlier_prob`` get much larger noise.  This gives
the heavy-tailed error profile of learned monocular pose regressors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geom import Pose, euler_to_rotation, so3_exp
from .traj_io import Trajectory

# spawn key separating the measurement stream from filter streams seeded
# with the same integer
_SYNTH_STREAM = 0x53594E


@dataclass(frozen=True)
class MeasurementNoiseModel:
    trans_sigma: float = 0.5
    rot_sigma: float = 0.1
    outlier_prob: float = 0.1
    outlier_trans_sigma: float = 2.0
    outlier_rot_sigma: float = 0.5
    seed: int = 0

    def __post_init__(self):
        sigmas = (self.trans_sigma, self.rot_sigma, self.outlier_trans_sigma, self.outlier_rot_sigma)
        if min(sigmas) < 0:
            raise ValueError("noise sigmas must be >= 0")
        if not 0.0 <= self.outlier_prob <= 1.0:
            raise ValueError("outlier_prob must lie in [0, 1]")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(_SYNTH_STREAM,)))


def generate_measurements(gt: Trajectory, model: MeasurementNoiseModel, return_outliers: bool = False):
    """Noisy copy of ``gt``; timestamps are kept.

    Translation noise is added per axis in the world frame, rotation noise
    is ``R @ exp(w)`` with ``w`` a Gaussian rotation vector.  With
    ``return_outliers`` the boolean outlier mask is returned as well.
    """
    rng = model.rng()
    n = len(gt)
    outlier = rng.random(n) < model.outlier_prob
    noise = rng.standard_normal((n, 6))
    ts = np.where(outlier, model.outlier_trans_sigma, model.trans_sigma)
    rs = np.where(outlier, model.outlier_rot_sigma, model.rot_sigma)
    dt = noise[:, :3] * ts[:, None]
    dr = noise[:, 3:] * rs[:, None]
    poses = []
    for s, d_t, d_r in zip(gt, dt, dr):
        p = s.pose
        rot = p.rotation if not d_r.any() else p.rotation @ so3_exp(d_r)
        poses.append(Pose(rot, p.translation + d_t))
    meas = Trajectory.from_poses(gt.timestamps, poses)
    return (meas, outlier) if return_outliers else meas


def smooth_trajectory(
    n: int = 100,
    amplitude: float = 4.0,
    period: float = 10.0,
    attitude_amplitude: float = 1.0,
    attitude_period: float = 6.0,
    dt: float = 1.0 / 30.0,
) -> Trajectory:
    """Bounded Lissajous sweep with oscillating attitude.

    Control noise scales with the per-step motion, so the default sweep moves
    a couple of meters per pose on every axis; a slow path would leave the
    particle cloud almost no room to move away from its initial box.  Yaw
    swings by ``attitude_amplitude`` and roll/pitch by half of it, keeping
    clear of gimbal lock and of half-turn rotations.
    """
    k = np.arange(n, dtype=float)
    w = 2.0 * np.pi / period
    x = amplitude * np.sin(w * k)
    y = amplitude * np.cos(w * k / 1.3)
    z = 0.5 * amplitude * np.sin(w * k / 0.8 + 1.0)
    wa = 2.0 * np.pi / attitude_period
    roll = 0.5 * attitude_amplitude * np.sin(wa * k + 0.3)
    pitch = 0.5 * attitude_amplitude * np.sin(wa * k / 1.2 + 1.0)
    yaw = attitude_amplitude * np.sin(wa * k / 0.9 + 0.5)
    rots = euler_to_rotation(roll, pitch, yaw)
    poses = [Pose(r, (a, b, c)) for r, a, b, c in zip(rots, x, y, z)]
    return Trajectory.from_poses(dt * k, poses)
