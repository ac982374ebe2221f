"""Particle-filter refinement of noisy SE(3) pose trajectories."""

from .geom import (
    GeometryError,
    Pose,
    chordal_distance,
    circular_mean,
    euclidean_distance,
    euler_to_rotation,
    pose_compose,
    pose_inverse,
    quat_to_rotation,
    rotation_to_euler,
    rotation_to_quat,
    se3_exp,
    se3_log,
    so3_exp,
    so3_log,
    wrap_angle,
)
from .motion import Control, derive_controls, perturb_control, propagate
from .particle_filter import (
    FilterConfig,
    ParticleSet,
    PoseEstimate,
    effective_sample_size,
    estimate_covariance,
    estimate_mean,
    init_particles,
    low_variance_resample,
    measurement_likelihood,
    predict,
    run,
    step,
    update_weights,
)
from .synth import MeasurementNoiseModel, generate_measurements, smooth_trajectory
from .traj_io import RunConfig, TimedPose, Trajectory, associate, load_config, parse_tum, write_tum
from .evaluate import ErrorStats, MultiRunSummary, multi_run_bounds, pose_errors, smoothness, summarize

__version__ = "0.1.0"
