import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from se3pf.geom import Pose


def rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def random_pose(rng, max_angle=np.pi - 0.01, scale=3.0):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0, max_angle)
    return Pose(Rotation.from_rotvec(angle * axis).as_matrix(), rng.uniform(-scale, scale, 3))


def assert_pose_close(a, b, tol=1e-9):
    assert np.linalg.norm(a.rotation - b.rotation) <= tol
    assert np.linalg.norm(a.translation - b.translation) <= tol


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
