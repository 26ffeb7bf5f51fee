"""Depth camera corruption: range limit, distance-scaled noise, dropout.

The noise standard deviation grows quadratically with distance, matching
how stereo and structured-light sensors degrade; beyond the range limit
the sensor reports nothing at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sensors.camera import DepthImage
from .rng import gaussian_stream, uniform_stream

DEFAULT_SIGMA_A = 0.001  # meters, noise floor
DEFAULT_SIGMA_B = 0.0019  # meters^-1, quadratic growth
DEFAULT_MAX_RANGE = 3.5  # meters

#: Smallest value a noised pixel may take; keeps valid pixels valid.
MIN_VALID_DEPTH = 1e-6


@dataclass
class DepthNoiseConfig:
    sigma_a: float = DEFAULT_SIGMA_A
    sigma_b: float = DEFAULT_SIGMA_B
    max_range: float = DEFAULT_MAX_RANGE
    dropout_prob: float = 0.0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.sigma_a < 0.0 or self.sigma_b < 0.0:
            raise ValueError("sigma_a and sigma_b must be non-negative")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be positive")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ValueError("dropout_prob must be in [0, 1]")


def zero_depth_noise(max_range: float = DEFAULT_MAX_RANGE) -> DepthNoiseConfig:
    return DepthNoiseConfig(0.0, 0.0, max_range, 0.0)


def depth_sigma(z: np.ndarray, cfg: DepthNoiseConfig) -> np.ndarray:
    return cfg.sigma_a + cfg.sigma_b * np.square(z)


def corrupt_depth(
    depth: DepthImage, cfg: DepthNoiseConfig, frame: int = 0
) -> DepthImage:
    """Corrupted copy of one depth frame.

    Pixels at 0 or beyond the range limit become 0. The rest gain
    Gaussian noise with sigma(z) = sigma_a + sigma_b z^2, clamped back
    into (0, max_range], then drop out with the configured probability.
    Draws are consumed in row-major order over the full image, so the
    mask of valid pixels does not shift anyone's random values; pixels
    whose sigma is exactly zero keep their input value bit for bit.
    """
    cfg.validate()
    z = depth.data.astype(np.float64)
    valid = (z > 0.0) & (z <= cfg.max_range)
    n = z.size
    g = gaussian_stream(cfg.rng_seed, f"depth.noise/{frame}", n).reshape(z.shape)
    u = uniform_stream(cfg.rng_seed, f"depth.dropout/{frame}", n).reshape(z.shape)
    sigma = depth_sigma(z, cfg)
    noised = np.clip(z + sigma * g, MIN_VALID_DEPTH, cfg.max_range)
    out = np.where(sigma > 0.0, noised, z)
    out = np.where(valid, out, 0.0)
    if cfg.dropout_prob > 0.0:
        out = np.where(valid & (u < cfg.dropout_prob), 0.0, out)
    return DepthImage(out.astype(np.float32), cfg.max_range)
