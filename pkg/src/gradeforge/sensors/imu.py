"""Ideal inertial measurements from a sampled pose trajectory.

Rates and accelerations come from central finite differences over three
consecutive poses. The accelerometer reports specific force, so a
motionless level sensor reads +9.81 on its z axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.pose import Pose, rotvec_between

GRAVITY = np.array([0.0, 0.0, -9.81])


@dataclass
class ImuSample:
    gyro: np.ndarray
    accel: np.ndarray

    def __post_init__(self) -> None:
        self.gyro = np.asarray(self.gyro, dtype=float).reshape(3)
        self.accel = np.asarray(self.accel, dtype=float).reshape(3)


@dataclass
class ImuStream:
    """Uniformly stamped gyro/accel samples, one row per stamp."""

    stamps: np.ndarray
    gyro: np.ndarray
    accel: np.ndarray

    def __post_init__(self) -> None:
        self.stamps = np.asarray(self.stamps, dtype=float).reshape(-1)
        self.gyro = np.asarray(self.gyro, dtype=float).reshape(-1, 3)
        self.accel = np.asarray(self.accel, dtype=float).reshape(-1, 3)
        if not (len(self.stamps) == len(self.gyro) == len(self.accel)):
            raise ValueError("stream arrays disagree in length")


def imu_ground_truth(
    prev: Pose, cur: Pose, nxt: Pose, dt: float, gravity: np.ndarray = GRAVITY
) -> ImuSample:
    """Noise-free rate and specific force at the middle of a pose triple.

    Angular rate is the log map of the rotation from ``prev`` to ``nxt``
    over ``2 dt`` in body coordinates; linear acceleration is the second
    central difference of position rotated into the middle body frame,
    with gravity subtracted beforehand so the sensed reaction points up.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    gravity = np.asarray(gravity, dtype=float).reshape(3)
    gyro = rotvec_between(prev.quaternion, nxt.quaternion) / (2.0 * dt)
    a_world = (prev.position - 2.0 * cur.position + nxt.position) / (dt * dt)
    accel = cur.rotation().T @ (a_world - gravity)
    return ImuSample(gyro, accel)


def imu_stream_from_poses(
    stamps: np.ndarray, poses: list[Pose], gravity: np.ndarray = GRAVITY
) -> ImuStream:
    """Ideal IMU samples for a uniformly stamped pose sequence.

    The first and last samples reuse the nearest interior window so the
    stream has one row per pose.
    """
    stamps = np.asarray(stamps, dtype=float).reshape(-1)
    if len(stamps) != len(poses):
        raise ValueError("stamps and poses disagree in length")
    if len(stamps) < 3:
        raise ValueError("need at least three poses")
    dts = np.diff(stamps)
    if np.ptp(dts) > 1e-9 * max(1.0, abs(float(dts[0]))):
        raise ValueError("non-uniform stamps")
    dt = float(dts[0])
    rows = []
    for i in range(len(poses)):
        j = min(max(i, 1), len(poses) - 2)
        rows.append(imu_ground_truth(poses[j - 1], poses[j], poses[j + 1], dt, gravity))
    return ImuStream(
        stamps,
        np.stack([r.gyro for r in rows]),
        np.stack([r.accel for r in rows]),
    )
