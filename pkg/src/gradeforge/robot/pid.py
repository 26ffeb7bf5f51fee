"""PID joint-velocity controller.

Accepts position or velocity setpoints and emits 6-DOF joint velocity
commands clamped to the speed limits.  The derivative term acts on the
measurement, not the error, so setpoint jumps do not kick the output.

Position mode is the parallel form on position error.  Velocity mode
integrates the PID output into the previous command (rate form):

    cmd_n = clamp(cmd_{n-1} + dt * (kp*e + ki*I + kd*de))

The rate form matters: the integrator plant turns a commanded velocity
into the measured one with a one-step delay, and a direct proportional
term on velocity error oscillates at any kp > 1.  The rate form stays
stable for the default gains and converges well inside the 1e-3
tracking tolerance within 10 s at dt = 1/240.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import JointLimits, RobotState, wrap_angle_error

SETPOINT_KINDS = ("position", "velocity")

DEFAULT_KP = 2.0
DEFAULT_KI = 0.2
DEFAULT_KD = 0.05
DEFAULT_INTEGRAL_CLAMP = 1.0


def _vec6(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(6)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass
class PidGains:
    kp: np.ndarray = field(default_factory=lambda: np.full(6, DEFAULT_KP))
    ki: np.ndarray = field(default_factory=lambda: np.full(6, DEFAULT_KI))
    kd: np.ndarray = field(default_factory=lambda: np.full(6, DEFAULT_KD))
    integral_clamp: np.ndarray = field(default_factory=lambda: np.full(6, DEFAULT_INTEGRAL_CLAMP))

    def __post_init__(self) -> None:
        self.kp = np.broadcast_to(np.asarray(self.kp, dtype=float), (6,)).copy()
        self.ki = np.broadcast_to(np.asarray(self.ki, dtype=float), (6,)).copy()
        self.kd = np.broadcast_to(np.asarray(self.kd, dtype=float), (6,)).copy()
        self.integral_clamp = np.broadcast_to(
            np.asarray(self.integral_clamp, dtype=float), (6,)
        ).copy()

    def validate(self) -> None:
        for name in ("kp", "ki", "kd", "integral_clamp"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if np.any(self.integral_clamp <= 0):
            raise ValueError("integral_clamp must be positive")


@dataclass
class Setpoint:
    kind: str
    value: np.ndarray
    stamp: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in SETPOINT_KINDS:
            raise ValueError(f"unknown setpoint kind {self.kind!r}")
        self.value = _vec6(self.value, "setpoint value")


class PidController:
    """Stateful PID loop: integral, measurement history, last command.

    Switching setpoint kind resets the integral and derivative history
    and re-seeds the velocity-mode rate form from the current clamped
    velocity, so the handover is bumpless.
    """

    def __init__(self, gains: PidGains | None = None, limits: JointLimits | None = None):
        if gains is None:
            gains = PidGains()
        gains.validate()
        if limits is None:
            raise ValueError("limits are required")
        limits.validate()
        self.gains = gains
        self.limits = limits
        self.integral = np.zeros(6)
        self._prev_meas: np.ndarray | None = None
        self._prev_cmd: np.ndarray | None = None
        self._prev_kind: str | None = None

    def reset(self) -> None:
        self.integral[:] = 0.0
        self._prev_meas = None
        self._prev_cmd = None
        self._prev_kind = None

    def step(self, state: RobotState, sp: Setpoint, dt: float) -> np.ndarray:
        if dt <= 0:
            raise ValueError("dt must be positive")
        pos = _vec6(state.joint_pos, "joint_pos")
        vel = _vec6(state.joint_vel, "joint_vel")
        if sp.kind != self._prev_kind:
            self.integral[:] = 0.0
            self._prev_meas = None
            self._prev_cmd = None
            self._prev_kind = sp.kind

        if sp.kind == "position":
            meas = pos
            err = sp.value - pos
            err[3:] = wrap_angle_error(err[3:])
        else:
            meas = vel
            err = sp.value - vel

        self.integral += err * dt
        np.clip(self.integral, -self.gains.integral_clamp, self.gains.integral_clamp,
                out=self.integral)

        if self._prev_meas is None:
            dmeas = np.zeros(6)
        else:
            dmeas = (meas - self._prev_meas) / dt
            if sp.kind == "position":
                dmeas[3:] = wrap_angle_error(meas[3:] - self._prev_meas[3:]) / dt
        self._prev_meas = meas.copy()

        # derivative on measurement: de/dt = -dmeas/dt for constant sp
        pid = self.gains.kp * err + self.gains.ki * self.integral - self.gains.kd * dmeas

        if sp.kind == "position":
            cmd = self.limits.clamp_vel(pid)
        else:
            if self._prev_cmd is None:
                self._prev_cmd = self.limits.clamp_vel(vel)
            cmd = self.limits.clamp_vel(self._prev_cmd + dt * pid)
            self._prev_cmd = cmd.copy()
        return cmd


def pid_step(state: RobotState, sp: Setpoint, gains: PidGains, limits: JointLimits,
             dt: float) -> np.ndarray:
    """Single step from zero history (fresh integral and derivative)."""
    return PidController(gains, limits).step(state, sp, dt)
