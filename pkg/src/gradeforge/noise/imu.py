"""Additive inertial sensor corruption.

The model is the standard two-term one: a slowly drifting bias that takes
a random-walk step each sample, plus white measurement noise. Parameters
are continuous-time densities, so the per-sample standard deviations are
``walk * sqrt(dt)`` for the bias step and ``density * sqrt(rate)`` for
the white term. Defaults match a small MEMS unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..sensors.imu import ImuStream
from .rng import gaussian_stream

DEFAULT_GYRO_NOISE_DENSITY = 8.7e-5  # rad/s per sqrt(Hz)
DEFAULT_ACCEL_NOISE_DENSITY = 4.9e-3  # m/s^2 per sqrt(Hz)
DEFAULT_GYRO_BIAS_WALK = 1.0e-5  # rad/s^2 per sqrt(Hz)
DEFAULT_ACCEL_BIAS_WALK = 1.0e-4  # m/s^3 per sqrt(Hz)


@dataclass
class ImuNoiseConfig:
    gyro_noise_density: float = DEFAULT_GYRO_NOISE_DENSITY
    accel_noise_density: float = DEFAULT_ACCEL_NOISE_DENSITY
    gyro_bias_walk: float = DEFAULT_GYRO_BIAS_WALK
    accel_bias_walk: float = DEFAULT_ACCEL_BIAS_WALK
    initial_gyro_bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    initial_accel_bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rng_seed: int = 0

    def __post_init__(self) -> None:
        self.initial_gyro_bias = np.asarray(self.initial_gyro_bias, dtype=float).reshape(3)
        self.initial_accel_bias = np.asarray(self.initial_accel_bias, dtype=float).reshape(3)

    def validate(self) -> None:
        for label in (
            "gyro_noise_density",
            "accel_noise_density",
            "gyro_bias_walk",
            "accel_bias_walk",
        ):
            if getattr(self, label) < 0.0:
                raise ValueError(f"{label} must be non-negative")
        if not np.all(np.isfinite(self.initial_gyro_bias)) or not np.all(
            np.isfinite(self.initial_accel_bias)
        ):
            raise ValueError("initial biases must be finite")


def zero_imu_noise() -> ImuNoiseConfig:
    return ImuNoiseConfig(0.0, 0.0, 0.0, 0.0)


def _corrupt_axis_block(
    clean: np.ndarray,
    initial_bias: np.ndarray,
    walk: float,
    density: float,
    dt: float,
    seed: int,
    stream: str,
) -> np.ndarray:
    n = len(clean)
    walk_steps = gaussian_stream(seed, stream + ".walk", 3 * n).reshape(n, 3)
    white = gaussian_stream(seed, stream + ".white", 3 * n).reshape(n, 3)
    bias = initial_bias + np.cumsum(walk_steps * (walk * np.sqrt(dt)), axis=0)
    return clean + bias + white * (density * np.sqrt(1.0 / dt))


def corrupt_imu(
    stream: ImuStream, cfg: ImuNoiseConfig, stream_name: str = "imu"
) -> ImuStream:
    """Return a corrupted copy of an evenly sampled inertial stream.

    Stamps must be uniform; the sample rate is read from them. An
    all-zero configuration reproduces the input values exactly.
    """
    cfg.validate()
    if len(stream.stamps) < 2:
        raise ValueError("need at least two samples")
    dts = np.diff(stream.stamps)
    if np.ptp(dts) > 1e-9 * max(1.0, abs(float(dts[0]))):
        raise ValueError("non-uniform stamps")
    dt = float(dts[0])
    if not dt > 0.0:
        raise ValueError("stamps must increase")
    gyro = _corrupt_axis_block(
        stream.gyro,
        cfg.initial_gyro_bias,
        cfg.gyro_bias_walk,
        cfg.gyro_noise_density,
        dt,
        cfg.rng_seed,
        stream_name + ".gyro",
    )
    accel = _corrupt_axis_block(
        stream.accel,
        cfg.initial_accel_bias,
        cfg.accel_bias_walk,
        cfg.accel_noise_density,
        dt,
        cfg.rng_seed,
        stream_name + ".accel",
    )
    return ImuStream(stream.stamps.copy(), gyro, accel)
