import io

import numpy as np
import pytest

from se3pf.geom import Pose, euler_to_rotation
from se3pf.traj_io import (
    ConfigError,
    TimedPose,
    Trajectory,
    TumFormatError,
    associate,
    load_config,
    parse_tum,
    write_tum,
)

from conftest import random_pose


def _write(traj):
    buf = io.StringIO()
    write_tum(traj, buf)
    return buf.getvalue()


def test_parse_comment_and_identity():
    traj = parse_tum("# comment\n0.0 0 0 0 0 0 0 1")
    assert len(traj) == 1
    assert traj[0].timestamp == 0.0
    np.testing.assert_array_equal(traj[0].pose.rotation, np.eye(3))


def test_parse_quarter_turn():
    traj = parse_tum("1.0 1 2 3 0 0 0.7071068 0.7071068")
    np.testing.assert_array_equal(traj[0].pose.translation, [1, 2, 3])
    np.testing.assert_allclose(traj[0].pose.rotation, euler_to_rotation(0, 0, np.pi / 2), atol=1e-12)


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("1.0 0 0 0 0 0 0 0", 1),
        ("# h\n\n0 0 0 0 0 0 0 1\n1 0 0 0 0 0 1", 4),
        ("0 0 0 0 0 0 0 1\n1 0 0 x 0 0 0 1", 2),
        ("0 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 1", 3),
        ("0 0 0 0 0 0 0 1.5", 1),
        ("0 0 0 0 0 0 0 1 9", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(TumFormatError) as exc:
        parse_tum(text)
    assert exc.value.lineno == lineno
    assert f"line {lineno}" in str(exc.value)


def test_parse_renormalises_near_unit_quaternion():
    traj = parse_tum("0 0 0 0 0 0 0 1.0005")
    np.testing.assert_allclose(traj[0].pose.rotation, np.eye(3), atol=1e-15)


def test_write_empty_and_identity():
    assert _write(Trajectory()) == ""
    line = _write(Trajectory([TimedPose(0.0, Pose.identity())]))
    assert line == "0.000000000 0 0 0 0 0 0 1\n"


def test_round_trip_random_poses(rng):
    poses = [random_pose(rng) for _ in range(1000)]
    traj = Trajectory.from_poses(np.cumsum(rng.uniform(0.01, 0.1, 1000)), poses)
    back = parse_tum(_write(traj))
    assert len(back) == 1000
    worst = 0.0
    for a, b in zip(traj, back):
        assert abs(a.timestamp - b.timestamp) < 1e-9
        worst = max(
            worst,
            np.linalg.norm(a.pose.rotation - b.pose.rotation),
            np.linalg.norm(a.pose.translation - b.pose.translation),
        )
    assert worst < 1e-9


def test_write_canonical_quaternion_sign(rng):
    for _ in range(100):
        text = _write(Trajectory([TimedPose(1.0, random_pose(rng))]))
        assert float(text.split()[7]) >= 0


def test_trajectory_rejects_non_increasing():
    p = Pose.identity()
    with pytest.raises(ValueError):
        Trajectory([TimedPose(1.0, p), TimedPose(1.0, p)])


def _stamps(ts):
    return Trajectory.from_poses(ts, [Pose.identity()] * len(ts))


def test_associate_examples():
    pairs, dropped = associate(_stamps([0.0, 1.0, 2.0]), _stamps([0.0, 1.0, 2.0]), 0.02)
    assert [(g.timestamp, m.timestamp) for g, m in pairs] == [(0, 0), (1, 1), (2, 2)]
    assert dropped == 0

    pairs, _ = associate(_stamps([1.0, 2.0]), _stamps([1.005]), 0.02)
    assert pairs[0][0].timestamp == 1.0

    with pytest.raises(ValueError):
        associate(_stamps([1.0, 2.0]), _stamps([1.5]), 0.02)
    pairs, dropped = associate(_stamps([1.0, 2.0]), _stamps([1.0, 1.5]), 0.02)
    assert len(pairs) == 1 and dropped == 1


def test_associate_each_gt_used_once():
    pairs, dropped = associate(_stamps([1.0, 1.03]), _stamps([1.001, 1.002, 1.004]), 0.02)
    assert [g.timestamp for g, _ in pairs] == [1.0]
    assert dropped == 2
    pairs, _ = associate(_stamps([1.0, 1.015]), _stamps([1.001, 1.002]), 0.02)
    assert [g.timestamp for g, _ in pairs] == [1.0, 1.015]


def test_associate_properties(rng):
    for _ in range(50):
        gt = _stamps(np.cumsum(rng.uniform(0.005, 0.05, 40)))
        meas = _stamps(np.cumsum(rng.uniform(0.005, 0.05, 30)))
        try:
            pairs, dropped = associate(gt, meas, 0.02)
        except ValueError:
            continue
        assert len(pairs) <= min(len(gt), len(meas))
        assert len(pairs) + dropped == len(meas)
        assert all(abs(g.timestamp - m.timestamp) <= 0.02 for g, m in pairs)
        assert len({g.timestamp for g, _ in pairs}) == len(pairs)


def test_config_defaults():
    rc = load_config("")
    assert (rc.particles, rc.init_pos_halfwidth, rc.init_ang_halfwidth_deg) == (200, 0.25, 45.0)
    assert rc.resample_fraction == pytest.approx(1 / 3)
    assert (rc.control_noise, rc.runs, rc.assoc_tolerance) == (0.05, 10, 0.02)


def test_config_values_and_overrides():
    rc = load_config("# settings\nparticles=500\nseed = 7\n", runs=3, seed=None)
    assert (rc.particles, rc.seed, rc.runs) == (500, 7, 3)
    assert rc.init_pos_halfwidth == 0.25


@pytest.mark.parametrize("text,word", [("particles=abc", "particles"), ("bogus=1", "bogus"), ("runs", "key=value")])
def test_config_errors(text, word):
    with pytest.raises(ConfigError, match=word):
        load_config(text)


def test_config_missing_paths():
    rc = load_config("")
    with pytest.raises(ConfigError, match="gt_path"):
        rc.require("gt_path")
    load_config("", gt_path="x.txt").require("gt_path")
