"""Pose error series, summary statistics and CSV reports.

Translational error is the Euclidean distance between positions (meters);
rotational error is the chordal distance between rotations, which is
dimensionless and lies in [0, 2*sqrt(2)].  It is not converted to degrees.
Variances use the n-1 denominator.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .geom import Pose, chordal_distance, euclidean_distance
from .traj_io import Trajectory

REPORT_HEADER = ("pose_error_type", "minimum", "maximum", "mean", "variance")
POSE_ERROR_HEADER = ("index", "timestamp", "trans_error", "rot_error")


@dataclass
class ErrorSeries:
    translational: np.ndarray
    rotational: np.ndarray
    labels: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.translational)


@dataclass(frozen=True)
class ErrorStats:
    minimum: float
    maximum: float
    mean: float
    variance: float


@dataclass
class MultiRunSummary:
    per_run: list[ErrorStats]
    upper_bound: ErrorStats
    lower_bound: ErrorStats
    upper_index: int = 0
    lower_index: int = 0


def pose_errors(pairs: Sequence[tuple[Pose, Pose]], labels=None) -> ErrorSeries:
    """Per-pair (ground truth, estimate) Euclidean and chordal errors."""
    if len(pairs) == 0:
        raise ValueError("no pose pairs to evaluate")
    gt_r = np.stack([g.rotation for g, _ in pairs])
    gt_t = np.stack([g.translation for g, _ in pairs])
    est_r = np.stack([e.rotation for _, e in pairs])
    est_t = np.stack([e.translation for _, e in pairs])
    return ErrorSeries(
        np.atleast_1d(euclidean_distance(gt_t, est_t)),
        np.atleast_1d(chordal_distance(gt_r, est_r)),
        list(range(len(pairs))) if labels is None else list(labels),
    )


def trajectory_errors(gt: Trajectory, est: Trajectory) -> ErrorSeries:
    """Errors between two trajectories that are already index-aligned."""
    if len(gt) != len(est):
        raise ValueError("trajectories differ in length")
    return pose_errors(list(zip(gt.poses, est.poses)), labels=list(est.timestamps))


def summarize(values) -> ErrorStats:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("cannot summarize an empty series")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        # summation rounding would otherwise leak into mean and variance
        return ErrorStats(lo, hi, lo, 0.0)
    var = float(np.var(x, ddof=1))
    return ErrorStats(lo, hi, float(x.mean()), var)


def multi_run_bounds(per_run: Sequence[ErrorStats]) -> MultiRunSummary:
    """Runs with the largest and smallest mean; ties go to the lowest index."""
    if len(per_run) == 0:
        raise ValueError("no runs to summarize")
    means = [s.mean for s in per_run]
    hi = max(range(len(means)), key=lambda i: (means[i], -i))
    lo = min(range(len(means)), key=lambda i: (means[i], i))
    return MultiRunSummary(list(per_run), per_run[hi], per_run[lo], hi, lo)


def smoothness(traj) -> float:
    """Largest translation jump between consecutive poses, in meters."""
    poses = traj.poses if hasattr(traj, "poses") else list(traj)
    if len(poses) < 2:
        raise ValueError("need at least two poses")
    t = np.stack([p.translation for p in poses])
    return float(np.linalg.norm(np.diff(t, axis=0), axis=1).max())


# --------------------------------------------------------------------------
# CSV output
# --------------------------------------------------------------------------


def _g6(x: float) -> str:
    return f"{x:.6g}"


def table_rows(
    unfused: tuple[ErrorStats, ErrorStats] | None = None,
    fused: tuple[ErrorStats, ErrorStats] | None = None,
    pf: tuple[MultiRunSummary, MultiRunSummary] | None = None,
    raw_name: str = "Fused",
) -> list[tuple[str, ErrorStats]]:
    """Rows in published table order: all translation rows, then rotation.

    Each argument is a (translation, rotation) pair; missing groups are
    skipped.  ``raw_name`` labels the ``fused`` group.
    """
    rows = []
    for kind, i in (("translation", 0), ("rotation", 1)):
        if unfused is not None:
            rows.append((f"Unfused {kind}", unfused[i]))
        if fused is not None:
            rows.append((f"{raw_name} {kind}", fused[i]))
        if pf is not None:
            rows.append((f"PF upper-bound {kind}", pf[i].upper_bound))
            rows.append((f"PF lower-bound {kind}", pf[i].lower_bound))
    return rows


def write_report(rows: Sequence[tuple[str, ErrorStats]], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for name, s in rows:
        w.writerow([name, _g6(s.minimum), _g6(s.maximum), _g6(s.mean), _g6(s.variance)])


def read_report(stream) -> list[tuple[str, ErrorStats]]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != REPORT_HEADER:
        raise ValueError(f"unexpected report header {header!r}")
    return [(r[0], ErrorStats(*map(float, r[1:5]))) for r in reader if r]


def write_pose_errors(series: ErrorSeries, stream: TextIO, timestamps=None) -> None:
    stamps = series.labels if timestamps is None else list(timestamps)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(POSE_ERROR_HEADER)
    for i, (te, re) in enumerate(zip(series.translational, series.rotational)):
        ts = f"{float(stamps[i]):.9f}" if i < len(stamps) else ""
        w.writerow([i, ts, f"{te:.9g}", f"{re:.9g}"])
