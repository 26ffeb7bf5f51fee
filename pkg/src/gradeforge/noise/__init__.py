from .rng import gaussian_stream, raw_stream, uniform_stream
from .imu import ImuNoiseConfig, corrupt_imu, zero_imu_noise
from .depth import DepthNoiseConfig, corrupt_depth, depth_sigma, zero_depth_noise
from .shutter import (
    MotionBlurConfig,
    PoseSampler,
    RollingShutterConfig,
    RollingShutterFrame,
    TrajectoryTooShort,
    motion_blur,
    rolling_shutter,
    sample_readout,
)
from .occlusion import OcclusionConfig, detect_occluded
from .reindex import reindex_log

__all__ = [
    "gaussian_stream",
    "raw_stream",
    "uniform_stream",
    "ImuNoiseConfig",
    "corrupt_imu",
    "zero_imu_noise",
    "DepthNoiseConfig",
    "corrupt_depth",
    "depth_sigma",
    "zero_depth_noise",
    "MotionBlurConfig",
    "PoseSampler",
    "RollingShutterConfig",
    "RollingShutterFrame",
    "TrajectoryTooShort",
    "motion_blur",
    "rolling_shutter",
    "sample_readout",
    "OcclusionConfig",
    "detect_occluded",
    "reindex_log",
]
