"""
Refining a noisy trajectory
===========================

Synthesize measurements with occasional gross outliers, run the filter
ten times and compare errors against the raw stream.
"""

# %%
import sys

from se3pf.cli import filter_runs, run_summaries
from se3pf.evaluate import smoothness, summarize, table_rows, trajectory_errors, write_report
from se3pf.synth import MeasurementNoiseModel, generate_measurements, smooth_trajectory
from se3pf.traj_io import RunConfig

gt = smooth_trajectory()
meas, outliers = generate_measurements(gt, MeasurementNoiseModel(seed=0), return_outliers=True)
print(f"{len(gt)} poses, {outliers.sum()} outliers")

# %%
result = filter_runs(gt, meas, RunConfig(seed=0))
raw = trajectory_errors(gt, meas)
_, trans, rot = run_summaries(result)
rows = table_rows(fused=(summarize(raw.translational), summarize(raw.rotational)), pf=(trans, rot), raw_name="Raw")
write_report(rows, sys.stdout)

# %%
# Filtered paths jump far less between frames.
print("max jump, measurements:", round(smoothness(meas), 3))
print("max jump, filtered:    ", round(max(smoothness(t) for t in result.runs), 3))
