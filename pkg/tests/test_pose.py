"""Quaternion and rigid-transform helpers."""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from gradeforge.geometry.pose import (
    Pose,
    euler_from_quat,
    quat_from_euler,
    quat_mul,
    quat_rotate,
    quat_slerp,
    rotvec_between,
)


def test_quat_mul_matches_scipy(rng):
    for _ in range(50):
        a = Rotation.random(random_state=int(rng.integers(0, 2**31))).as_quat()
        b = Rotation.random(random_state=int(rng.integers(0, 2**31))).as_quat()
        got = quat_mul(a, b)
        want = (Rotation.from_quat(a) * Rotation.from_quat(b)).as_quat()
        assert np.allclose(got, want) or np.allclose(got, -want)


def test_quat_rotate_matches_matrix(rng):
    q = Rotation.random(random_state=3).as_quat()
    pts = rng.normal(size=(20, 3))
    assert np.allclose(quat_rotate(q, pts), pts @ Rotation.from_quat(q).as_matrix().T)


def test_euler_round_trip():
    q = quat_from_euler(0.3, -0.4, 1.2)
    assert np.allclose(euler_from_quat(q), [0.3, -0.4, 1.2])


def test_slerp_endpoints_and_midpoint():
    q0 = quat_from_euler(0, 0, 0)
    q1 = quat_from_euler(0, 0, np.pi / 2)
    assert np.allclose(quat_slerp(q0, q1, 0.0), q0)
    assert np.allclose(np.abs(quat_slerp(q0, q1, 1.0)), np.abs(q1))
    mid = quat_slerp(q0, q1, 0.5)
    assert np.allclose(euler_from_quat(mid)[2], np.pi / 4)


def test_slerp_takes_short_arc():
    q0 = quat_from_euler(0, 0, 0.1)
    q1 = -quat_from_euler(0, 0, 0.3)  # same rotation, flipped sign
    mid = quat_slerp(q0, q1, 0.5)
    assert np.allclose(euler_from_quat(mid)[2], 0.2)


def test_rotvec_between_is_body_frame():
    q0 = quat_from_euler(0, 0, 1.0)
    q1 = quat_from_euler(0, 0, 1.3)
    assert np.allclose(rotvec_between(q0, q1), [0, 0, 0.3])


def test_pose_compose_inverse(rng):
    a = Pose(rng.normal(size=3), Rotation.random(random_state=5).as_quat())
    b = Pose(rng.normal(size=3), Rotation.random(random_state=6).as_quat())
    ab = a.compose(b)
    assert np.allclose(ab.matrix(), a.matrix() @ b.matrix())
    ident = a.compose(a.inverse())
    assert np.allclose(ident.position, 0, atol=1e-12)
    assert np.allclose(np.abs(ident.quaternion[3]), 1.0)


def test_pose_transform_points_matches_matrix(rng):
    p = Pose(rng.normal(size=3), Rotation.random(random_state=9).as_quat())
    pts = rng.normal(size=(10, 3))
    hom = np.column_stack([pts, np.ones(len(pts))])
    want = (p.matrix() @ hom.T).T[:, :3]
    assert np.allclose(p.transform_points(pts), want)


def test_pose_interpolate_midpoint():
    a = Pose.from_xyz_rpy(0, 0, 0, 0, 0, 0)
    b = Pose.from_xyz_rpy(2, 0, 0, 0, 0, np.pi / 2)
    mid = a.interpolate(b, 0.5)
    assert np.allclose(mid.position, [1, 0, 0])
    assert np.allclose(euler_from_quat(mid.quaternion)[2], np.pi / 4)
