"""Six-joint virtual robot: x, y, z prismatic plus roll, pitch, yaw.

Joints are limited in range and speed.  Translation is boxed to the
environment prism, roll and pitch to a symmetric interval (or pinned to
zero in stabilized mode), and yaw wraps around instead of clamping.
Default speed limits: 0.5 m/s on translation, 40 deg/s on roll/pitch,
30 deg/s on yaw.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

VEL_XYZ = 0.5
VEL_ROLLPITCH = np.deg2rad(40.0)
VEL_YAW = np.deg2rad(30.0)
ROLLPITCH_RANGE = np.deg2rad(25.0)


def wrap_yaw(yaw):
    """Wrap to [0, 2*pi)."""
    return np.mod(yaw, TWO_PI)


def wrap_angle_error(err):
    """Wrap to [-pi, pi]."""
    return np.mod(np.asarray(err) + np.pi, TWO_PI) - np.pi


@dataclass
class JointLimits:
    """Per-axis position and speed bounds.

    ``pos_min``/``pos_max`` cover x, y, z, roll, pitch (yaw is entry 5
    but only wraps).  Stabilized flight uses a [0, 0] roll/pitch range.
    """

    pos_min: np.ndarray
    pos_max: np.ndarray
    vel_max: np.ndarray

    def __post_init__(self) -> None:
        self.pos_min = np.asarray(self.pos_min, dtype=float).reshape(6)
        self.pos_max = np.asarray(self.pos_max, dtype=float).reshape(6)
        self.vel_max = np.asarray(self.vel_max, dtype=float).reshape(6)

    def validate(self) -> None:
        if np.any(self.vel_max <= 0):
            raise ValueError("speed limits must be positive")
        if np.any(self.pos_max < self.pos_min):
            raise ValueError("pos_max below pos_min")

    @staticmethod
    def for_box(
        xyz_min,
        xyz_max,
        stabilized: bool = False,
        vel_xyz: float = VEL_XYZ,
        vel_rollpitch: float = VEL_ROLLPITCH,
        vel_yaw: float = VEL_YAW,
    ) -> "JointLimits":
        rp = 0.0 if stabilized else ROLLPITCH_RANGE
        pos_min = np.array([*np.asarray(xyz_min, dtype=float), -rp, -rp, 0.0])
        pos_max = np.array([*np.asarray(xyz_max, dtype=float), rp, rp, TWO_PI])
        vel = np.array([vel_xyz, vel_xyz, vel_xyz, vel_rollpitch, vel_rollpitch, vel_yaw])
        return JointLimits(pos_min, pos_max, vel)

    def clamp_vel(self, cmd: np.ndarray) -> np.ndarray:
        return np.clip(cmd, -self.vel_max, self.vel_max)


@dataclass
class RobotState:
    joint_pos: np.ndarray = field(default_factory=lambda: np.zeros(6))
    joint_vel: np.ndarray = field(default_factory=lambda: np.zeros(6))
    time: float = 0.0

    def __post_init__(self) -> None:
        self.joint_pos = np.asarray(self.joint_pos, dtype=float).reshape(6)
        self.joint_vel = np.asarray(self.joint_vel, dtype=float).reshape(6)

    def copy(self) -> "RobotState":
        return RobotState(self.joint_pos.copy(), self.joint_vel.copy(), self.time)


def integrate_robot(state: RobotState, cmd: np.ndarray, limits: JointLimits, dt: float) -> RobotState:
    """Semi-implicit Euler step under joint limits.

    Velocity takes the clamped command, position advances and clamps;
    axes stopped by a position limit zero their velocity.  Yaw wraps
    instead of clamping.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    vel = limits.clamp_vel(np.asarray(cmd, dtype=float))
    raw = state.joint_pos + vel * dt
    pos = np.clip(raw, limits.pos_min, limits.pos_max)
    hit = pos != raw
    vel = np.where(hit, 0.0, vel)
    pos[5] = wrap_yaw(raw[5])
    vel[5] = np.clip(cmd[5], -limits.vel_max[5], limits.vel_max[5])
    return RobotState(pos, vel, state.time + dt)
