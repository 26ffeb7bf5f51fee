"""Rolling-shutter and motion-blur rendering effects.

Both effects re-render geometry at perturbed times instead of warping a
finished image: rolling shutter ray-casts each row at its own readout
time, motion blur averages whole-frame renders across the exposure. With
zero parameters each reduces exactly to the plain global-shutter render.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.pose import Pose
from ..sensors.camera import (
    CameraIntrinsics,
    DepthImage,
    InstanceImage,
    SceneSnapshot,
    raycast_camera,
)
from ..sensors.images import proxy_rgb
from .rng import gaussian_stream

DEFAULT_READOUT_MEAN = 0.015  # seconds
DEFAULT_READOUT_STD = 0.006  # seconds


class TrajectoryTooShort(ValueError):
    pass


@dataclass
class PoseSampler:
    """Linear-interpolating pose lookup over a stamped window."""

    stamps: np.ndarray
    poses: list

    def __post_init__(self) -> None:
        self.stamps = np.asarray(self.stamps, dtype=float).reshape(-1)
        if len(self.stamps) != len(self.poses):
            raise ValueError("stamps and poses disagree in length")
        if len(self.stamps) < 1:
            raise ValueError("empty trajectory")
        if np.any(np.diff(self.stamps) <= 0.0):
            raise ValueError("stamps must increase strictly")

    def __call__(self, t: float) -> Pose:
        if t < self.stamps[0] - 1e-12 or t > self.stamps[-1] + 1e-12:
            raise TrajectoryTooShort(
                f"trajectory covers [{self.stamps[0]:g}, {self.stamps[-1]:g}] "
                f"but t={t:g} is needed"
            )
        if len(self.stamps) == 1:
            return self.poses[0]
        i = int(np.clip(np.searchsorted(self.stamps, t, side="right") - 1, 0, len(self.stamps) - 2))
        lo, hi = self.stamps[i], self.stamps[i + 1]
        u = 0.0 if hi == lo else (t - lo) / (hi - lo)
        return self.poses[i].interpolate(self.poses[i + 1], float(np.clip(u, 0.0, 1.0)))


def _as_pose_fn(pose_at):
    if isinstance(pose_at, PoseSampler) or callable(pose_at):
        return pose_at
    if isinstance(pose_at, Pose):
        return lambda t: pose_at
    raise TypeError("pose_at must be a Pose, a PoseSampler, or a callable")


def _as_snapshot_fn(snapshot_at):
    if isinstance(snapshot_at, SceneSnapshot):
        return lambda t: snapshot_at
    if callable(snapshot_at):
        return snapshot_at
    raise TypeError("snapshot_at must be a SceneSnapshot or a callable")


@dataclass
class RollingShutterConfig:
    readout_mean: float = DEFAULT_READOUT_MEAN
    readout_std: float = DEFAULT_READOUT_STD
    rng_seed: int = 0

    def validate(self) -> None:
        if self.readout_mean < 0.0 or self.readout_std < 0.0:
            raise ValueError("readout parameters must be non-negative")


@dataclass
class RollingShutterFrame:
    depth: DepthImage
    instances: InstanceImage
    row_stamps: np.ndarray
    readout: float


def sample_readout(cfg: RollingShutterConfig, frame: int = 0) -> float:
    """Per-frame readout duration, clamped to be non-negative.

    A zero standard deviation consumes no randomness budget but the draw
    still happens, so frame numbering stays aligned either way.
    """
    g = float(gaussian_stream(cfg.rng_seed, f"shutter.readout/{frame}", 1)[0])
    return max(cfg.readout_mean + cfg.readout_std * g, 0.0)


def rolling_shutter(
    snapshot_at,
    pose_at,
    intrinsics: CameraIntrinsics,
    stamp: float,
    cfg: RollingShutterConfig,
    frame: int = 0,
) -> RollingShutterFrame:
    """Render a frame row by row across its readout window.

    Row r is ray-cast at ``stamp + readout * r / (height - 1)`` using the
    pose (and scene) interpolated at that time. With a zero readout every
    row renders at ``stamp`` and the result equals the global-shutter
    frame exactly.
    """
    cfg.validate()
    intrinsics.validate()
    snap_fn = _as_snapshot_fn(snapshot_at)
    pose_fn = _as_pose_fn(pose_at)
    readout = sample_readout(cfg, frame)
    h, w = intrinsics.height, intrinsics.width
    denom = max(h - 1, 1)
    row_stamps = stamp + readout * np.arange(h) / denom
    depth_rows = np.zeros((h, w), dtype=np.float32)
    inst_rows = np.zeros((h, w), dtype=np.uint32)
    for r in range(h):
        t_r = float(row_stamps[r])
        d, i = raycast_camera(
            snap_fn(t_r), pose_fn(t_r), intrinsics, rows=np.array([r])
        )
        depth_rows[r] = d.data[0]
        inst_rows[r] = i.data[0]
    return RollingShutterFrame(
        DepthImage(depth_rows, intrinsics.max_range),
        InstanceImage(inst_rows),
        row_stamps,
        readout,
    )


@dataclass
class MotionBlurConfig:
    exposure: float = 0.0  # seconds
    subframes: int = 8

    def validate(self) -> None:
        if self.exposure < 0.0:
            raise ValueError("exposure must be non-negative")
        if self.subframes < 1:
            raise ValueError("subframes must be at least 1")


def motion_blur(
    snapshot_at,
    pose_at,
    intrinsics: CameraIntrinsics,
    stamp: float,
    cfg: MotionBlurConfig,
    display_range: float | None = None,
) -> np.ndarray:
    """Average of color renders across the exposure window.

    Sub-frame poses are sampled uniformly over [stamp, stamp + exposure].
    A zero exposure or a single sub-frame returns the sharp render at
    ``stamp`` unchanged.
    """
    cfg.validate()
    snap_fn = _as_snapshot_fn(snapshot_at)
    pose_fn = _as_pose_fn(pose_at)
    if cfg.exposure <= 0.0 or cfg.subframes == 1:
        times = [stamp]
    else:
        times = [
            stamp + cfg.exposure * k / (cfg.subframes - 1)
            for k in range(cfg.subframes)
        ]
    acc = None
    for t in times:
        depth, inst = raycast_camera(snap_fn(t), pose_fn(t), intrinsics)
        rgb = proxy_rgb(depth, inst, display_range).astype(np.float64)
        acc = rgb if acc is None else acc + rgb
    return np.round(acc / len(times)).astype(np.uint8)
