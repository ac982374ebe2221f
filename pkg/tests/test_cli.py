import numpy as np
import pytest

from se3pf.cli import main
from se3pf.evaluate import read_report
from se3pf.synth import MeasurementNoiseModel, generate_measurements, smooth_trajectory
from se3pf.traj_io import load_config, read_tum, save_tum


@pytest.fixture
def gt_file(tmp_path):
    path = tmp_path / "gt.txt"
    save_tum(smooth_trajectory(n=30), path)
    return path


def _tree(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_synth_zero_noise_copies_input(tmp_path, gt_file):
    out = tmp_path / "m.txt"
    args = ["synth", "--gt", str(gt_file), "--out", str(out)]
    zeros = ["--trans-sigma", "0", "--rot-sigma", "0", "--outlier-trans-sigma", "0", "--outlier-rot-sigma", "0"]
    assert main(args + zeros) == 0
    for a, b in zip(read_tum(out), read_tum(gt_file)):
        assert a.timestamp == b.timestamp
        np.testing.assert_array_equal(a.pose.translation, b.pose.translation)
        np.testing.assert_allclose(a.pose.rotation, b.pose.rotation, atol=1e-15)


def test_synth_is_deterministic(tmp_path, gt_file):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["synth", "--gt", str(gt_file), "--out", str(a), "--seed", "3"]) == 0
    assert main(["synth", "--gt", str(gt_file), "--out", str(b), "--seed", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_missing_gt_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--out", str(tmp_path / "x.txt")])
    assert exc.value.code == 2


def test_missing_file_is_runtime_error(tmp_path, capsys):
    assert main(["synth", "--gt", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "x.txt")]) == 1
    assert "error" in capsys.readouterr().err


def test_filter_default_config():
    rc = load_config("")
    assert (rc.particles, rc.runs) == (200, 10)
    assert rc.resample_fraction * rc.particles == pytest.approx(200 / 3)


def test_filter_tight_init_tracks_clean_measurements(tmp_path, gt_file):
    meas = tmp_path / "m.txt"
    save_tum(read_tum(gt_file), meas)
    cfg = tmp_path / "run.cfg"
    cfg.write_text("runs = 1\ninit_pos_halfwidth = 0.01\ninit_ang_halfwidth_deg = 0.5\nparticles = 50\n")
    out = tmp_path / "pf.txt"
    args = ["filter", "--gt", str(gt_file), "--meas", str(meas), "--out", str(out), "--config", str(cfg)]
    assert main(args) == 0
    assert (tmp_path / "pf_run0.txt").exists()
    first = read_tum(out)[0].pose
    gt0 = read_tum(gt_file)[0].pose
    assert np.abs(first.translation - gt0.translation).max() <= 0.01


def test_filter_same_seed_same_bytes(tmp_path, gt_file):
    meas = tmp_path / "m.txt"
    save_tum(generate_measurements(read_tum(gt_file), MeasurementNoiseModel(seed=1)), meas)
    outs = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        d.mkdir()
        args = ["filter", "--gt", str(gt_file), "--meas", str(meas), "--out", str(d / "pf.txt")]
        assert main(args + ["--runs", "2", "--particles", "40", "--seed", "5"]) == 0
        outs.append(_tree(d))
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"pf.txt", "pf_run0.txt", "pf_run1.txt"}


def test_filter_without_paths_fails(tmp_path):
    assert main(["filter", "--out", str(tmp_path / "x.txt")]) == 1


def test_eval_identical_gives_zero_rows(tmp_path, gt_file):
    out = tmp_path / "r.csv"
    assert main(["eval", "--gt", str(gt_file), "--est", str(gt_file), "--labels", "same", "--out-csv", str(out)]) == 0
    rows = read_report(out.read_text())
    assert [n for n, _ in rows] == ["same translation", "same rotation"]
    for _, st in rows:
        assert (st.minimum, st.maximum, st.mean, st.variance) == (0, 0, 0, 0)
    assert (tmp_path / "r_same.csv").exists()


def test_eval_keeps_label_order(tmp_path, gt_file):
    gt = read_tum(gt_file)
    paths = []
    for s in range(3):
        p = tmp_path / f"e{s}.txt"
        save_tum(generate_measurements(gt, MeasurementNoiseModel(seed=s)), p)
        paths.append(str(p))
    out = tmp_path / "r.csv"
    labels = ["zeta", "alpha", "mid"]
    assert main(["eval", "--gt", str(gt_file), "--est", *paths, "--labels", *labels, "--out-csv", str(out)]) == 0
    names = [n for n, _ in read_report(out.read_text())]
    assert names == [f"{l} {k}" for l in labels for k in ("translation", "rotation")]


def test_eval_label_mismatch_is_usage_error(tmp_path, gt_file):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--gt", str(gt_file), "--est", str(gt_file), "--labels", "a", "b", "--out-csv", str(tmp_path / "r.csv")])
    assert exc.value.code == 2


def test_pipeline_is_deterministic_and_improves(tmp_path, gt_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("runs = 3\nparticles = 100\n")
    trees = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        assert main(["pipeline", "--gt", str(gt_file), "--config", str(cfg), "--out-dir", str(d), "--seed", "2"]) == 0
        trees.append(_tree(d))
    assert trees[0] == trees[1]
    rows = dict(read_report((tmp_path / "a" / "summary.csv").read_text()))
    assert list(rows) == [
        "Raw translation",
        "PF upper-bound translation",
        "PF lower-bound translation",
        "Raw rotation",
        "PF upper-bound rotation",
        "PF lower-bound rotation",
    ]
    assert rows["PF lower-bound translation"].mean < rows["Raw translation"].mean


def test_pipeline_bad_config_exits_1(tmp_path, gt_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("particles = many\n")
    assert main(["pipeline", "--gt", str(gt_file), "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 1
