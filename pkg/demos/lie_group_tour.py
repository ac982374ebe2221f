"""
A short tour of the pose geometry
=================================

Poses are rotation matrices plus translations.  Twists order the
translational part first: ``[v, w]``.
"""

# %%
import numpy as np

from se3pf.geom import (
    Pose,
    chordal_distance,
    euler_to_rotation,
    rotation_to_euler,
    se3_exp,
    se3_log,
)

# %%
# Roll, pitch and yaw compose as ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
r = euler_to_rotation(0.1, -0.2, 1.0)
print(np.round(r, 4))
print("back to angles:", rotation_to_euler(r))

# %%
# Exponential and logarithm invert each other away from half turns.
xi = np.array([1.0, -0.5, 0.2, 0.3, 0.1, -0.7])
pose = se3_exp(xi)
print("log(exp(xi)) - xi:", se3_log(pose) - xi)

# %%
# Chordal distance grows with the rotation angle and tops out at 2*sqrt(2).
for deg in (0, 45, 90, 180):
    a = np.radians(deg)
    print(f"{deg:3d} deg -> {chordal_distance(np.eye(3), euler_to_rotation(0, 0, a)):.4f}")

# %%
# Composition and inversion.
p = Pose(euler_to_rotation(0, 0, 0.5), [1, 2, 3])
print(p.compose(p.inverse()).matrix().round(12))
