"""Command-line entry point: ``se3pf {synth,filter,eval,pipeline}``.

Exit codes: 0 on success, 1 on runtime errors (I/O, parsing, association),
2 on usage errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluate import (
    multi_run_bounds,
    summarize,
    table_rows,
    trajectory_errors,
    write_pose_errors,
    write_report,
)
from .particle_filter import FilterConfig, mean_pose, run
from .synth import MeasurementNoiseModel, generate_measurements
from .traj_io import RunConfig, Trajectory, associate, read_config, read_tum, save_tum


@dataclass
class MultiRunResult:
    gt: Trajectory
    meas: Trajectory
    runs: list[Trajectory]
    mean: Trajectory
    seeds: list[int]


def aligned_streams(gt: Trajectory, meas: Trajectory, tol: float):
    """Associate and return index-aligned (gt, meas) trajectories plus dropped count."""
    pairs, dropped = associate(gt, meas, tol)
    return Trajectory([g for g, _ in pairs]), Trajectory([m for _, m in pairs]), dropped


def filter_runs(gt: Trajectory, meas: Trajectory, rc: RunConfig) -> MultiRunResult:
    """Run the filter ``rc.runs`` times with seeds ``rc.seed + k`` on aligned streams."""
    seeds = [rc.seed + k for k in range(rc.runs)]
    runs = []
    for s in seeds:
        traj, _ = run(gt, meas, FilterConfig.from_run_config(rc, seed=s))
        runs.append(traj)
    rots = np.stack([[p.rotation for p in t.poses] for t in runs], axis=1)
    trans = np.stack([[p.translation for p in t.poses] for t in runs], axis=1)
    mean = Trajectory.from_poses(meas.timestamps, [mean_pose(r, t) for r, t in zip(rots, trans)])
    return MultiRunResult(gt, meas, runs, mean, seeds)


def run_summaries(result: MultiRunResult):
    """Per-run translation/rotation stats and their multi-run bounds."""
    series = [trajectory_errors(result.gt, t) for t in result.runs]
    trans = multi_run_bounds([summarize(s.translational) for s in series])
    rot = multi_run_bounds([summarize(s.rotational) for s in series])
    return series, trans, rot


def _run_path(out: Path, tag: str) -> Path:
    return out.with_name(f"{out.stem}_{tag}{out.suffix}")


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_synth(args) -> int:
    gt = read_tum(args.gt)
    model = MeasurementNoiseModel(
        trans_sigma=args.trans_sigma,
        rot_sigma=args.rot_sigma,
        outlier_prob=args.outlier_prob,
        outlier_trans_sigma=args.outlier_trans_sigma,
        outlier_rot_sigma=args.outlier_rot_sigma,
        seed=args.seed,
    )
    meas, outliers = generate_measurements(gt, model, return_outliers=True)
    save_tum(meas, args.out)
    print(f"wrote {len(meas)} measurements to {args.out} ({int(outliers.sum())} outliers)")
    return 0


def cmd_filter(args) -> int:
    rc = read_config(
        args.config,
        seed=args.seed,
        particles=args.particles,
        runs=args.runs,
        gt_path=args.gt,
        meas_path=args.meas,
        out_path=args.out,
    )
    rc.require("gt_path", "meas_path", "out_path")
    gt, meas, dropped = aligned_streams(read_tum(rc.gt_path), read_tum(rc.meas_path), rc.assoc_tolerance)
    if dropped:
        print(f"dropped {dropped} unassociated measurements")
    result = filter_runs(gt, meas, rc)
    out = Path(rc.out_path)
    for k, traj in enumerate(result.runs):
        save_tum(traj, _run_path(out, f"run{k}"))
    save_tum(result.mean, out)
    series, _, _ = run_summaries(result)
    for k, (s, seed) in enumerate(zip(series, result.seeds)):
        print(
            f"run {k} (seed {seed}): mean translation error {s.translational.mean():.6g} m, "
            f"mean rotation error {s.rotational.mean():.6g}"
        )
    return 0


def cmd_eval(args) -> int:
    labels = args.labels if args.labels else [Path(p).stem for p in args.est]
    gt = read_tum(args.gt)
    out = Path(args.out_csv)
    rows = []
    for label, path in zip(labels, args.est):
        g, e, _ = aligned_streams(gt, read_tum(path), args.tolerance)
        s = trajectory_errors(g, e)
        rows.append((f"{label} translation", summarize(s.translational)))
        rows.append((f"{label} rotation", summarize(s.rotational)))
        with open(_run_path(out, _safe(label)), "w", newline="") as f:
            write_pose_errors(s, f)
    with open(out, "w", newline="") as f:
        write_report(rows, f)
    for name, st in rows:
        print(f"{name}: mean {st.mean:.6g}")
    return 0


def run_pipeline(gt: Trajectory, rc: RunConfig, out_dir, model: MeasurementNoiseModel | None = None):
    """synth -> multi-run filter -> eval, writing every artifact into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = model or MeasurementNoiseModel(seed=rc.seed)
    meas = generate_measurements(gt, model)
    save_tum(meas, out_dir / "measurements.txt")
    result = filter_runs(gt, meas, rc)
    for k, traj in enumerate(result.runs):
        save_tum(traj, out_dir / f"filtered_run{k}.txt")
    save_tum(result.mean, out_dir / "filtered_mean.txt")

    raw = trajectory_errors(gt, meas)
    series, trans, rot = run_summaries(result)
    with open(out_dir / "errors_raw.csv", "w", newline="") as f:
        write_pose_errors(raw, f)
    for k, s in enumerate(series):
        with open(out_dir / f"errors_pf_run{k}.csv", "w", newline="") as f:
            write_pose_errors(s, f)
    raw_stats = (summarize(raw.translational), summarize(raw.rotational))
    rows = table_rows(fused=raw_stats, pf=(trans, rot), raw_name="Raw")
    with open(out_dir / "summary.csv", "w", newline="") as f:
        write_report(rows, f)
    return rows


def cmd_pipeline(args) -> int:
    rc = read_config(args.config, seed=args.seed, gt_path=args.gt)
    rc.require("gt_path")
    rows = run_pipeline(read_tum(rc.gt_path), rc, args.out_dir)
    for name, st in rows:
        print(f"{name}: mean {st.mean:.6g}")
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="se3pf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate noisy measurements from a ground-truth trajectory")
    s.add_argument("--gt", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trans-sigma", type=float, default=0.5)
    s.add_argument("--rot-sigma", type=float, default=0.1)
    s.add_argument("--outlier-prob", type=float, default=0.1)
    s.add_argument("--outlier-trans-sigma", type=float, default=2.0)
    s.add_argument("--outlier-rot-sigma", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)

    f = sub.add_parser("filter", help="refine measurements with the particle filter")
    f.add_argument("--gt", help="ground truth used to derive controls")
    f.add_argument("--meas")
    f.add_argument("--out", help="mean trajectory path; per-run files get a _run<k> suffix")
    f.add_argument("--config")
    f.add_argument("--seed", type=int)
    f.add_argument("--particles", type=int)
    f.add_argument("--runs", type=int)
    f.set_defaults(func=cmd_filter)

    e = sub.add_parser("eval", help="error statistics of estimates against ground truth")
    e.add_argument("--gt", required=True)
    e.add_argument("--est", nargs="+", required=True)
    e.add_argument("--labels", nargs="+")
    e.add_argument("--out-csv", required=True)
    e.add_argument("--tolerance", type=float, default=0.02)
    e.set_defaults(func=cmd_eval)

    pl = sub.add_parser("pipeline", help="synth, filter and eval in one go")
    pl.add_argument("--gt")
    pl.add_argument("--config")
    pl.add_argument("--out-dir", required=True)
    pl.add_argument("--seed", type=int)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "eval" and args.labels and len(args.labels) != len(args.est):
        parser.error("--labels must have one entry per --est file")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"se3pf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
