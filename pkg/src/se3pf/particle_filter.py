"""Sample-importance-resampling particle filter on SE(3).

Particles are stored as stacked arrays (rotations ``(n, 3, 3)``,
translations ``(n, 3)``, weights ``(n,)``) so that prediction and weighting
run over the whole set at once.  All randomness comes from an explicit
``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from .geom import (
    Pose,
    circular_mean,
    euler_to_rotation,
    se3_log,
    so3_exp,
    so3_log,
    wrap_angle,
)
from .motion import Control, derive_controls, perturb_controls, propagate_arrays
from .traj_io import RunConfig, Trajectory


@dataclass(frozen=True)
class FilterConfig:
    n: int = 200
    init_pos_halfwidth: float = 0.25
    init_ang_halfwidth: float = math.pi / 4
    resample_fraction: float = 1.0 / 3.0
    meas_covariance: np.ndarray = field(default_factory=lambda: np.eye(6))
    control_noise: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("particle count must be >= 1")
        if self.init_pos_halfwidth < 0 or self.init_ang_halfwidth < 0:
            raise ValueError("initialisation halfwidths must be >= 0")
        if not 0 < self.resample_fraction <= 1:
            raise ValueError("resample_fraction must lie in (0, 1]")
        if self.control_noise < 0:
            raise ValueError("control noise fraction must be >= 0")
        cov = np.array(self.meas_covariance, dtype=float)
        if cov.shape != (6, 6) or not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("measurement covariance must be a symmetric 6x6 matrix")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("measurement covariance must be positive definite")
        object.__setattr__(self, "meas_covariance", cov)

    @classmethod
    def from_run_config(cls, rc: RunConfig, seed: int | None = None) -> FilterConfig:
        return cls(
            n=rc.particles,
            init_pos_halfwidth=rc.init_pos_halfwidth,
            init_ang_halfwidth=math.radians(rc.init_ang_halfwidth_deg),
            resample_fraction=rc.resample_fraction,
            control_noise=rc.control_noise,
            seed=rc.seed if seed is None else seed,
        )


@dataclass
class ParticleSet:
    rotations: np.ndarray
    translations: np.ndarray
    weights: np.ndarray
    step_index: int = 0
    # set by update_weights when every likelihood underflowed
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.weights)

    @classmethod
    def from_poses(cls, poses: Sequence[Pose], weights=None) -> ParticleSet:
        n = len(poses)
        w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
        return cls(
            np.stack([p.rotation for p in poses]),
            np.stack([p.translation for p in poses]),
            w / w.sum(),
        )

    @property
    def poses(self) -> list[Pose]:
        return [Pose(r, t) for r, t in zip(self.rotations, self.translations)]


@dataclass
class PoseEstimate:
    mean: Pose
    covariance: np.ndarray
    ess: float
    resampled: bool
    degenerate: bool = False


def init_particles(first: Pose, cfg: FilterConfig, rng: np.random.Generator) -> ParticleSet:
    """Uniform box around ``first``: position per axis and roll/pitch/yaw offsets."""
    n = cfg.n
    dt = rng.uniform(-cfg.init_pos_halfwidth, cfg.init_pos_halfwidth, size=(n, 3))
    da = rng.uniform(-cfg.init_ang_halfwidth, cfg.init_ang_halfwidth, size=(n, 3))
    rots = first.rotation @ euler_to_rotation(da[:, 0], da[:, 1], da[:, 2])
    return ParticleSet(rots, first.translation + dt, np.full(n, 1.0 / n))


def predict(ps: ParticleSet, c: Control, cfg: FilterConfig, rng: np.random.Generator) -> ParticleSet:
    """Move every particle by its own noisy copy of ``c``; weights are kept."""
    controls = perturb_controls(c, cfg.control_noise, rng, len(ps))
    rots, trans = propagate_arrays(ps.rotations, ps.translations, controls)
    return replace(ps, rotations=rots, translations=trans)


def log_likelihoods(rotations, translations, measurement: Pose, cov) -> np.ndarray:
    """Log MVN density of the measurement twist around each particle twist."""
    xi_p = se3_log(rotations, translations)
    xi_z = se3_log(measurement)
    # the Gaussian is symmetric in (mean, point), so centre it at zero
    return np.atleast_1d(multivariate_normal(mean=np.zeros(6), cov=cov).logpdf(xi_z - xi_p))


def measurement_likelihood(particle: Pose, measurement: Pose, cov=None) -> float:
    cov = np.eye(6) if cov is None else cov
    ll = log_likelihoods(particle.rotation[None], particle.translation[None], measurement, cov)
    return float(np.exp(ll[0]))


def update_weights(ps: ParticleSet, measurement: Pose, cfg: FilterConfig) -> ParticleSet:
    """Multiply weights by the measurement likelihood and renormalise.

    Works in log space.  If every product underflows (or all prior weights
    are zero) the weights are reset to uniform and ``degenerate`` is set.
    """
    ll = log_likelihoods(ps.rotations, ps.translations, measurement, cfg.meas_covariance)
    with np.errstate(divide="ignore"):
        logw = np.log(ps.weights) + ll
    total = logsumexp(logw)
    if not np.isfinite(total):
        n = len(ps)
        return replace(ps, weights=np.full(n, 1.0 / n), degenerate=True)
    w = np.exp(logw - total)
    return replace(ps, weights=w / w.sum(), degenerate=False)


def effective_sample_size(ps_or_weights) -> float:
    w = ps_or_weights.weights if isinstance(ps_or_weights, ParticleSet) else ps_or_weights
    w = np.asarray(w, dtype=float)
    return float(1.0 / np.sum(w * w))


def comb_indices(weights, offsets) -> np.ndarray:
    """Indices picked by the systematic comb for each comb offset.

    ``offsets`` is a scalar or an array of shape ``(m,)`` with values in
    ``[0, 1/n)``.  Tooth ``i`` sits at ``r + i/n`` and selects the first
    index whose cumulative weight is ``>= r + i/n``.  Result shape is
    ``(n,)`` or ``(m, n)``.
    """
    w = np.asarray(weights, dtype=float)
    n = len(w)
    cum = np.cumsum(w)
    u = np.asarray(offsets, dtype=float)[..., None] + np.arange(n) / n
    idx = np.searchsorted(cum, u, side="left")
    # cumulative sum may fall short of 1 by rounding; the last tooth stays in range
    return np.minimum(idx, n - 1)


def low_variance_resample(ps: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    n = len(ps)
    idx = comb_indices(ps.weights, rng.uniform(0.0, 1.0 / n))
    return replace(
        ps,
        rotations=ps.rotations[idx],
        translations=ps.translations[idx],
        weights=np.full(n, 1.0 / n),
    )


def _mean_components(rotations, translations):
    rv = wrap_angle(so3_log(rotations))
    return translations.mean(axis=0), circular_mean(rv, axis=0)


def mean_pose(rotations, translations) -> Pose:
    """Unweighted mean: arithmetic on translations, circular per rotation-vector component."""
    t_mean, rv_mean = _mean_components(np.asarray(rotations), np.asarray(translations))
    return Pose(so3_exp(rv_mean), t_mean)


def estimate_mean(ps: ParticleSet) -> Pose:
    return mean_pose(ps.rotations, ps.translations)


def estimate_covariance(ps: ParticleSet, mean: Pose) -> np.ndarray:
    """``mu0 mu0^T / n`` over deviations from ``mean`` (angles wrapped)."""
    rv = so3_log(ps.rotations)
    mu0 = np.concatenate(
        [ps.translations - mean.translation, wrap_angle(rv - so3_log(mean.rotation))], axis=1
    ).T
    cov = mu0 @ mu0.T / len(ps)
    return 0.5 * (cov + cov.T)


def step(ps: ParticleSet, c: Control, measurement: Pose, cfg: FilterConfig, rng: np.random.Generator):
    """One predict/update/resample cycle; returns ``(particles, estimate)``.

    The estimate is taken from the set that is returned, i.e. after
    resampling when it fires.  ``ess`` is the value before resampling.
    """
    ps = predict(ps, c, cfg, rng)
    ps = update_weights(ps, measurement, cfg)
    ess = effective_sample_size(ps)
    resampled = ess < cfg.resample_fraction * len(ps)
    if resampled:
        ps = low_variance_resample(ps, rng)
    ps = replace(ps, step_index=ps.step_index + 1)
    mean = estimate_mean(ps)
    est = PoseEstimate(mean, estimate_covariance(ps, mean), ess, resampled, ps.degenerate)
    return ps, est


def _initial_estimate(ps: ParticleSet) -> PoseEstimate:
    mean = estimate_mean(ps)
    return PoseEstimate(mean, estimate_covariance(ps, mean), effective_sample_size(ps), False)


def run(gt_or_controls, measurements: Trajectory, cfg: FilterConfig):
    """Filter a measurement sequence.

    ``gt_or_controls`` is either a ground-truth Trajectory / pose list aligned
    with ``measurements`` (controls are derived from it) or a list of
    ``len(measurements) - 1`` Control objects.  Returns the trajectory of
    mean poses (timestamps of the measurements) and the per-pose estimates.
    """
    if len(measurements) == 0:
        raise ValueError("no measurements to filter")
    if isinstance(gt_or_controls, Trajectory) or (
        len(gt_or_controls) and isinstance(gt_or_controls[0], Pose)
    ):
        gt_poses = gt_or_controls.poses if isinstance(gt_or_controls, Trajectory) else gt_or_controls
        if len(gt_poses) != len(measurements):
            raise ValueError("ground truth and measurements differ in length")
        controls = derive_controls(gt_poses) if len(gt_poses) > 1 else []
    else:
        controls = list(gt_or_controls)
    if len(controls) != len(measurements) - 1:
        raise ValueError(
            f"expected {len(measurements) - 1} controls, got {len(controls)}"
        )

    rng = np.random.default_rng(cfg.seed)
    ps = init_particles(measurements[0].pose, cfg, rng)
    estimates = [_initial_estimate(ps)]
    for c, z in zip(controls, measurements.samples[1:]):
        ps, est = step(ps, c, z.pose, cfg, rng)
        estimates.append(est)
    traj = Trajectory.from_poses(measurements.timestamps, [e.mean for e in estimates])
    return traj, estimates

