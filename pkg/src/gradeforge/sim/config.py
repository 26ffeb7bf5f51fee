"""Fixed-step recording configuration.

The simulator advances physics at a single base rate and publishes every
channel at an integer divisor of that rate, so a run is fully described by
the step size, the bootstrap and recording durations, and the per-channel
rate table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

PHYSICS_DT = 1.0 / 240.0

#: Publication order used to break ties between records sharing a stamp.
CHANNEL_ORDER = (
    "start_experiment",
    "clock",
    "imu_body",
    "imu_camera",
    "tf",
    "joint_state",
    "camera_pose",
    "odometry",
    "rgb",
    "depth",
)

DEFAULT_RATES = {
    "clock": 240,
    "imu_body": 240,
    "imu_camera": 240,
    "tf": 120,
    "joint_state": 120,
    "camera_pose": 60,
    "odometry": 60,
    "rgb": 30,
    "depth": 30,
}


class ConfigError(ValueError):
    """Raised when a simulation or pipeline configuration is invalid."""


@dataclass
class ChannelSchedule:
    """Per-channel publication rates in Hz.

    Every rate must divide the physics rate evenly; a channel fires on the
    steps where ``step % (physics_rate / rate) == 0``.
    """

    rates: dict = field(default_factory=lambda: dict(DEFAULT_RATES))

    def validate(self, physics_dt: float) -> None:
        physics_rate = 1.0 / physics_dt
        for name, rate in self.rates.items():
            if name not in DEFAULT_RATES:
                raise ConfigError(f"unknown channel {name!r}")
            if not isinstance(rate, int) or rate <= 0:
                raise ConfigError(f"channel {name!r} rate must be a positive integer")
            if abs(physics_rate / rate - round(physics_rate / rate)) > 1e-9:
                raise ConfigError(
                    f"channel {name!r} rate {rate} does not divide the physics rate "
                    f"{physics_rate:g} evenly"
                )
        for name in DEFAULT_RATES:
            if name not in self.rates:
                raise ConfigError(f"missing rate for channel {name!r}")

    def stride(self, channel: str, physics_dt: float) -> int:
        """Physics steps between consecutive records of `channel`."""
        return round(1.0 / physics_dt / self.rates[channel])

    def to_dict(self) -> dict:
        return {name: int(self.rates[name]) for name in sorted(self.rates)}

    @staticmethod
    def from_dict(data: dict) -> "ChannelSchedule":
        return ChannelSchedule(rates={str(k): int(v) for k, v in data.items()})


@dataclass
class SimConfig:
    physics_dt: float = PHYSICS_DT
    bootstrap_duration: float = 1.0
    record_duration: float = 60.0
    rng_seed: int = 0
    stabilized: bool = True
    schedule: ChannelSchedule = field(default_factory=ChannelSchedule)

    def validate(self) -> None:
        if not self.physics_dt > 0.0:
            raise ConfigError("physics_dt must be positive")
        if self.bootstrap_duration < 0.0:
            raise ConfigError("bootstrap_duration must be non-negative")
        if self.record_duration < 0.0:
            raise ConfigError("record_duration must be non-negative")
        n_steps = self.record_duration / self.physics_dt
        if abs(n_steps - round(n_steps)) > 1e-6:
            raise ConfigError(
                "record_duration must be an integral number of physics steps"
            )
        if not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise ConfigError("rng_seed must be a non-negative integer")
        self.schedule.validate(self.physics_dt)

    @property
    def record_steps(self) -> int:
        return round(self.record_duration / self.physics_dt)

    @property
    def bootstrap_steps(self) -> int:
        return round(self.bootstrap_duration / self.physics_dt)

    def expected_counts(self) -> dict:
        """Per-channel record counts for a full run, including the start marker."""
        counts = {"start_experiment": 1}
        for name, rate in self.schedule.rates.items():
            stride = self.schedule.stride(name, self.physics_dt)
            # publication on step 0, then every `stride` steps
            counts[name] = (self.record_steps + stride - 1) // stride
        return counts

    def to_dict(self) -> dict:
        return {
            "physics_dt": float(self.physics_dt),
            "bootstrap_duration": float(self.bootstrap_duration),
            "record_duration": float(self.record_duration),
            "rng_seed": int(self.rng_seed),
            "stabilized": bool(self.stabilized),
            "schedule": self.schedule.to_dict(),
        }

    @staticmethod
    def from_dict(data: dict) -> "SimConfig":
        known = {f.name for f in fields(SimConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown simulation keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "schedule" in kwargs:
            kwargs["schedule"] = ChannelSchedule.from_dict(kwargs["schedule"])
        cfg = SimConfig(**kwargs)
        cfg.validate()
        return cfg
