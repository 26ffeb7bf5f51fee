"""Detection of frames where the camera is blocked or sees nothing.

A frame counts as occluded when almost every returned pixel is closer
than a near threshold (something is pressed against the lens) or when
almost nothing returns at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sensors.camera import DepthImage


@dataclass
class OcclusionConfig:
    near_threshold: float = 0.2  # meters
    near_fraction: float = 0.95
    min_valid_fraction: float = 0.05

    def validate(self) -> None:
        if self.near_threshold <= 0.0:
            raise ValueError("near_threshold must be positive")
        for label in ("near_fraction", "min_valid_fraction"):
            if not 0.0 <= getattr(self, label) <= 1.0:
                raise ValueError(f"{label} must be in [0, 1]")


def detect_occluded(depth: DepthImage, cfg: OcclusionConfig | None = None) -> bool:
    """True when the view is blocked up close or has almost no returns."""
    if cfg is None:
        cfg = OcclusionConfig()
    cfg.validate()
    z = np.asarray(depth.data, dtype=np.float64)
    valid = z > 0.0
    n_valid = int(valid.sum())
    if n_valid < cfg.min_valid_fraction * z.size:
        return True
    near = valid & (z < cfg.near_threshold)
    return bool(near.sum() / n_valid > cfg.near_fraction)
