"""TUM trajectory files, timestamp association and run configuration."""

from __future__ import annotations

import bisect
import io
import math
import os
from dataclasses import dataclass, field, fields
from typing import Iterable, Iterator, TextIO

import numpy as np

from .geom import Pose, quat_to_rotation, rotation_to_quat

# quaternions further than this from unit norm are rejected, closer ones renormalised
QUAT_NORM_TOL = 1e-3


class TumFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimedPose:
    timestamp: float
    pose: Pose


@dataclass
class Trajectory:
    samples: list[TimedPose] = field(default_factory=list)

    def __post_init__(self):
        ts = [s.timestamp for s in self.samples]
        for i, (a, b) in enumerate(zip(ts, ts[1:])):
            if not b > a:
                raise ValueError(f"timestamps must be strictly increasing (sample {i + 1})")

    @classmethod
    def from_poses(cls, timestamps: Iterable[float], poses: Iterable[Pose]) -> Trajectory:
        return cls([TimedPose(float(t), p) for t, p in zip(timestamps, poses)])

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([s.timestamp for s in self.samples], dtype=float)

    @property
    def poses(self) -> list[Pose]:
        return [s.pose for s in self.samples]

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[TimedPose]:
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]


def _as_lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_tum(source) -> Trajectory:
    """Parse ``timestamp tx ty tz qx qy qz qw`` lines from a stream or string.

    Blank lines and ``#`` comments are skipped.  Every error carries the
    1-based line number.
    """
    samples: list[TimedPose] = []
    last = -math.inf
    for lineno, raw in enumerate(_as_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 8:
            raise TumFormatError(lineno, f"expected 8 fields, got {len(parts)}")
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise TumFormatError(lineno, "non-numeric field") from None
        if not all(math.isfinite(v) for v in vals):
            raise TumFormatError(lineno, "non-finite field")
        stamp = vals[0]
        if stamp < 0:
            raise TumFormatError(lineno, "negative timestamp")
        if stamp <= last:
            raise TumFormatError(lineno, "timestamps not strictly increasing")
        q = np.array(vals[4:8])
        norm = np.linalg.norm(q)
        if norm == 0.0:
            raise TumFormatError(lineno, "zero-norm quaternion")
        if abs(norm - 1.0) > QUAT_NORM_TOL:
            raise TumFormatError(lineno, f"quaternion norm {norm:.6g} is not unit")
        samples.append(TimedPose(stamp, Pose(quat_to_rotation(q / norm), vals[1:4])))
        last = stamp
    return Trajectory(samples)


def read_tum(path) -> Trajectory:
    with open(path) as f:
        return parse_tum(f)


def _num(x: float) -> str:
    # 17 significant digits round-trip a double exactly; trims "-0" noise
    s = f"{x:.17g}"
    return "0" if s == "-0" else s


def format_tum_line(t: float, pose: Pose) -> str:
    q = rotation_to_quat(pose.rotation)
    fields_ = [f"{t:.9f}"] + [_num(v) for v in pose.translation] + [_num(v) for v in q]
    return " ".join(fields_)


def write_tum(traj: Trajectory, stream: TextIO) -> None:
    for s in traj:
        stream.write(format_tum_line(s.timestamp, s.pose) + "\n")


def save_tum(traj: Trajectory, path) -> None:
    with open(path, "w", newline="\n") as f:
        write_tum(traj, f)


def associate(gt: Trajectory, meas: Trajectory, tol: float = 0.02):
    """Greedy nearest-timestamp matching of measurements to ground truth.

    Walks the measurements in order and pairs each with the closest unused
    ground-truth sample within ``tol`` seconds.  Returns ``(pairs, dropped)``
    where ``dropped`` counts unmatched measurements.  Raises ValueError when
    nothing matches.
    """
    if len(gt) == 0 or len(meas) == 0:
        raise ValueError("cannot associate an empty trajectory")
    stamps = gt.timestamps
    used = np.zeros(len(gt), dtype=bool)
    pairs = []
    dropped = 0
    for m in meas:
        lo = bisect.bisect_left(stamps, m.timestamp - tol)
        hi = bisect.bisect_right(stamps, m.timestamp + tol)
        cands = [(abs(stamps[j] - m.timestamp), j) for j in range(lo, hi) if not used[j]]
        cands = [c for c in cands if c[0] <= tol]
        best = min(cands)[1] if cands else None
        if best is None:
            dropped += 1
            continue
        used[best] = True
        pairs.append((gt[best], m))
    if not pairs:
        raise ValueError("no measurement could be associated with ground truth")
    return pairs, dropped


# --------------------------------------------------------------------------
# run configuration
# --------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Flat ``key=value`` run settings; defaults are the published parameters."""

    particles: int = 200
    init_pos_halfwidth: float = 0.25
    init_ang_halfwidth_deg: float = 45.0
    resample_fraction: float = 1.0 / 3.0
    control_noise: float = 0.05
    seed: int = 0
    runs: int = 10
    assoc_tolerance: float = 0.02
    gt_path: str | None = None
    meas_path: str | None = None
    out_path: str | None = None

    def __post_init__(self):
        if self.particles < 1:
            raise ConfigError("particles must be >= 1")
        if self.init_pos_halfwidth < 0 or self.init_ang_halfwidth_deg < 0:
            raise ConfigError("init halfwidths must be >= 0")
        if not 0 < self.resample_fraction <= 1:
            raise ConfigError("resample_fraction must lie in (0, 1]")
        if self.control_noise < 0:
            raise ConfigError("control_noise must be >= 0")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not self.assoc_tolerance > 0:
            raise ConfigError("assoc_tolerance must be > 0")

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError("missing required setting(s): " + ", ".join(missing))


_CASTS = {
    "particles": int,
    "init_pos_halfwidth": float,
    "init_ang_halfwidth_deg": float,
    "resample_fraction": float,
    "control_noise": float,
    "seed": int,
    "runs": int,
    "assoc_tolerance": float,
    "gt_path": str,
    "meas_path": str,
    "out_path": str,
}
assert set(_CASTS) == {f.name for f in fields(RunConfig)}


def load_config(source=None, **overrides) -> RunConfig:
    """Read a config stream (or string); keyword overrides win over file values.

    Overrides set to None are ignored, which lets CLI flags pass through
    unconditionally.
    """
    values: dict = {}
    if source is not None:
        for lineno, raw in enumerate(_as_lines(source), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            if key not in _CASTS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                values[key] = _CASTS[key](val)
            except ValueError:
                raise ConfigError(f"line {lineno}: cannot parse value {val!r} for {key!r}") from None
    for key, val in overrides.items():
        if key not in _CASTS:
            raise ConfigError(f"unknown key {key!r}")
        if val is not None:
            values[key] = val
    return RunConfig(**values)


def read_config(path, **overrides) -> RunConfig:
    if path is None:
        return load_config(None, **overrides)
    with open(os.fspath(path)) as f:
        return load_config(f, **overrides)
