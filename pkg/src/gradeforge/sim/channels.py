"""Binary payload codecs for each record channel.

Payloads are little-endian packed doubles with no framing of their own;
the record frame carries the channel, index, and stamp. Poses serialize
as position xyz followed by quaternion xyzw.
"""

from __future__ import annotations

import struct

import numpy as np

from ..geometry.pose import Pose
from ..sensors.imu import ImuSample

_POSE = struct.Struct("<7d")
_IMU = struct.Struct("<6d")
_JOINT = struct.Struct("<12d")
_ODOM = struct.Struct("<13d")
_FRAME_REF = struct.Struct("<Q7dB")


def _pose_values(pose: Pose) -> tuple:
    return tuple(float(v) for v in pose.position) + tuple(
        float(v) for v in pose.quaternion
    )


def _pose_from(values) -> Pose:
    return Pose(np.asarray(values[:3], dtype=float), np.asarray(values[3:7], dtype=float))


def pack_pose(pose: Pose) -> bytes:
    return _POSE.pack(*_pose_values(pose))


def unpack_pose(payload: bytes) -> Pose:
    return _pose_from(_POSE.unpack(payload))


def pack_tf(body: Pose, camera: Pose) -> bytes:
    return _POSE.pack(*_pose_values(body)) + _POSE.pack(*_pose_values(camera))


def unpack_tf(payload: bytes) -> tuple[Pose, Pose]:
    body = _pose_from(_POSE.unpack_from(payload, 0))
    camera = _pose_from(_POSE.unpack_from(payload, _POSE.size))
    return body, camera


def pack_imu(sample: ImuSample) -> bytes:
    return _IMU.pack(*sample.gyro, *sample.accel)


def unpack_imu(payload: bytes) -> ImuSample:
    vals = _IMU.unpack(payload)
    return ImuSample(np.asarray(vals[:3]), np.asarray(vals[3:]))


def pack_joint_state(joint_pos: np.ndarray, joint_vel: np.ndarray) -> bytes:
    return _JOINT.pack(*np.asarray(joint_pos, dtype=float), *np.asarray(joint_vel, dtype=float))


def unpack_joint_state(payload: bytes) -> tuple[np.ndarray, np.ndarray]:
    vals = np.asarray(_JOINT.unpack(payload))
    return vals[:6], vals[6:]


def pack_odometry(pose: Pose, twist: np.ndarray) -> bytes:
    return _ODOM.pack(*_pose_values(pose), *np.asarray(twist, dtype=float))


def unpack_odometry(payload: bytes) -> tuple[Pose, np.ndarray]:
    vals = _ODOM.unpack(payload)
    return _pose_from(vals), np.asarray(vals[7:])


def pack_frame_ref(frame: int, camera_pose: Pose, rendered: bool) -> bytes:
    return _FRAME_REF.pack(int(frame), *_pose_values(camera_pose), 1 if rendered else 0)


def unpack_frame_ref(payload: bytes) -> tuple[int, Pose, bool]:
    vals = _FRAME_REF.unpack(payload)
    return int(vals[0]), _pose_from(vals[1:8]), bool(vals[8])
