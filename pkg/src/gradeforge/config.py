"""Single structured configuration for the whole pipeline.

One file drives composition, simulation, post-processing, and
evaluation. Parsing is strict: a version field is required, unknown keys
anywhere are rejected, and every sub-configuration is re-validated by
the module that owns it, so a typo fails fast instead of silently
running with defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .evaluation.metrics import DEFAULT_GAP_FACTOR, DEFAULT_MAX_ASSOC_DT
from .noise.depth import DepthNoiseConfig
from .noise.imu import ImuNoiseConfig
from .noise.occlusion import OcclusionConfig
from .noise.shutter import MotionBlurConfig, RollingShutterConfig
from .robot.pid import PidGains
from .scene.placement import ComposeSpec, PlacementConfig
from .sim.config import ConfigError, SimConfig

CONFIG_VERSION = 1


def _check_keys(section: dict, what: str, known) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{what} must be a mapping")
    unknown = set(section) - set(known)
    if unknown:
        raise ConfigError(f"unknown keys in {what}: {sorted(unknown)}")


def _build(cls, data: dict, what: str, fields_: dict, post=None):
    _check_keys(data, what, fields_)
    kwargs = {}
    for key, conv in fields_.items():
        if key in data:
            kwargs[key] = conv(data[key]) if conv else data[key]
    try:
        obj = cls(**kwargs)
        if post:
            post(obj)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad {what} section: {exc}") from None
    return obj


@dataclass
class EnvironmentConfig:
    """Room geometry source: a procedural room or a mesh file."""

    mesh: str | None = None
    size_x: float = 8.0
    size_y: float = 6.0
    height: float = 2.5
    thickness: float = 0.15
    furniture_seed: int | None = None

    def validate(self) -> None:
        if self.mesh is None:
            for label in ("size_x", "size_y", "height", "thickness"):
                if not getattr(self, label) > 0.0:
                    raise ConfigError(f"{label} must be positive")


@dataclass
class FootprintConfig:
    slice_height: float = 1.0
    resolution: float = 0.1
    slab: tuple = (0.2, 1.8)

    def validate(self) -> None:
        if not self.resolution > 0.0:
            raise ConfigError("resolution must be positive")
        lo, hi = self.slab
        if not lo < hi:
            raise ConfigError("slab must be an increasing (low, high) pair")


@dataclass
class RobotConfig:
    z_range: tuple = (0.3, 2.0)
    margin: float = 0.2
    gains: PidGains = field(default_factory=PidGains)
    waypoints: str | None = None

    def validate(self) -> None:
        lo, hi = self.z_range
        if not lo < hi:
            raise ConfigError("z_range must be an increasing (low, high) pair")
        if self.margin < 0.0:
            raise ConfigError("margin must be non-negative")
        self.gains.validate()


@dataclass
class CamerasConfig:
    low: tuple = (640, 480)
    high: tuple = (1920, 1080)
    hfov_deg: float | None = None
    vfov_deg: float | None = None
    max_range: float = float("inf")

    def validate(self) -> None:
        for label in ("low", "high"):
            w, h = getattr(self, label)
            if w <= 0 or h <= 0:
                raise ConfigError(f"{label} camera size must be positive")
        if not self.max_range > 0.0:
            raise ConfigError("max_range must be positive")


@dataclass
class NoiseConfig:
    imu: ImuNoiseConfig = field(default_factory=ImuNoiseConfig)
    depth: DepthNoiseConfig = field(default_factory=DepthNoiseConfig)
    shutter: RollingShutterConfig = field(default_factory=RollingShutterConfig)
    blur: MotionBlurConfig = field(default_factory=MotionBlurConfig)
    occlusion: OcclusionConfig = field(default_factory=OcclusionConfig)

    def validate(self) -> None:
        self.imu.validate()
        self.depth.validate()
        self.shutter.validate()
        self.blur.validate()
        self.occlusion.validate()


@dataclass
class EvaluationConfig:
    max_assoc_dt: float = DEFAULT_MAX_ASSOC_DT
    gap_factor: float = DEFAULT_GAP_FACTOR

    def validate(self) -> None:
        if not self.max_assoc_dt > 0.0:
            raise ConfigError("max_assoc_dt must be positive")
        if not self.gap_factor > 0.0:
            raise ConfigError("gap_factor must be positive")


@dataclass
class PipelineConfig:
    seed: int = 0
    sim: SimConfig = field(default_factory=SimConfig)
    compose: ComposeSpec = field(default_factory=ComposeSpec)
    placement: PlacementConfig = field(default_factory=PlacementConfig)
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    footprint: FootprintConfig = field(default_factory=FootprintConfig)
    robot: RobotConfig = field(default_factory=RobotConfig)
    cameras: CamerasConfig = field(default_factory=CamerasConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)

    def validate(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        self.sim.validate()
        self.placement.validate()
        self.environment.validate()
        self.footprint.validate()
        self.robot.validate()
        self.cameras.validate()
        self.noise.validate()
        self.evaluation.validate()


def _pair(value) -> tuple:
    pair = tuple(value)
    if len(pair) != 2:
        raise ConfigError(f"expected a pair, got {value!r}")
    return pair


def _gains(data: dict) -> PidGains:
    return _build(
        PidGains,
        data,
        "robot.gains",
        {"kp": float, "ki": float, "kd": float, "integral_clamp": float},
    )


def _compose(data: dict) -> ComposeSpec:
    return _build(
        ComposeSpec,
        data,
        "compose",
        {
            "profile": str,
            "n_humans_range": lambda v: tuple(int(x) for x in _pair(v)),
            "n_gso_objects": int,
            "n_shapenet_objects": int,
        },
    )


def _placement(data: dict) -> PlacementConfig:
    return _build(
        PlacementConfig,
        data,
        "placement",
        {
            "contact_threshold": int,
            "max_attempts_per_asset": int,
            "rng_seed": int,
            "yaw_randomization": bool,
        },
    )


def _noise(data: dict) -> NoiseConfig:
    _check_keys(data, "noise", {"imu", "depth", "shutter", "blur", "occlusion"})
    kwargs = {}
    if "imu" in data:
        kwargs["imu"] = _build(
            ImuNoiseConfig,
            data["imu"],
            "noise.imu",
            {
                "gyro_noise_density": float,
                "accel_noise_density": float,
                "gyro_bias_walk": float,
                "accel_bias_walk": float,
                "initial_gyro_bias": lambda v: np.asarray(v, dtype=float),
                "initial_accel_bias": lambda v: np.asarray(v, dtype=float),
                "rng_seed": int,
            },
        )
    if "depth" in data:
        kwargs["depth"] = _build(
            DepthNoiseConfig,
            data["depth"],
            "noise.depth",
            {
                "sigma_a": float,
                "sigma_b": float,
                "max_range": float,
                "dropout_prob": float,
                "rng_seed": int,
            },
        )
    if "shutter" in data:
        kwargs["shutter"] = _build(
            RollingShutterConfig,
            data["shutter"],
            "noise.shutter",
            {"readout_mean": float, "readout_std": float, "rng_seed": int},
        )
    if "blur" in data:
        kwargs["blur"] = _build(
            MotionBlurConfig,
            data["blur"],
            "noise.blur",
            {"exposure": float, "subframes": int},
        )
    if "occlusion" in data:
        kwargs["occlusion"] = _build(
            OcclusionConfig,
            data["occlusion"],
            "noise.occlusion",
            {
                "near_threshold": float,
                "near_fraction": float,
                "min_valid_fraction": float,
            },
        )
    return NoiseConfig(**kwargs)


def pipeline_from_dict(doc: dict) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    if doc.get("config_version") != CONFIG_VERSION:
        raise ConfigError(
            f"config_version must be {CONFIG_VERSION}, got {doc.get('config_version')!r}"
        )
    _check_keys(
        doc,
        "configuration",
        {
            "config_version",
            "seed",
            "sim",
            "compose",
            "placement",
            "environment",
            "footprint",
            "robot",
            "cameras",
            "noise",
            "evaluation",
        },
    )
    kwargs = {}
    if "seed" in doc:
        kwargs["seed"] = int(doc["seed"])
    if "sim" in doc:
        try:
            kwargs["sim"] = SimConfig.from_dict(doc["sim"])
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad sim section: {exc}") from None
    if "compose" in doc:
        kwargs["compose"] = _compose(doc["compose"])
    if "placement" in doc:
        kwargs["placement"] = _placement(doc["placement"])
    if "environment" in doc:
        kwargs["environment"] = _build(
            EnvironmentConfig,
            doc["environment"],
            "environment",
            {
                "mesh": str,
                "size_x": float,
                "size_y": float,
                "height": float,
                "thickness": float,
                "furniture_seed": int,
            },
        )
    if "footprint" in doc:
        kwargs["footprint"] = _build(
            FootprintConfig,
            doc["footprint"],
            "footprint",
            {
                "slice_height": float,
                "resolution": float,
                "slab": lambda v: tuple(float(x) for x in _pair(v)),
            },
        )
    if "robot" in doc:
        kwargs["robot"] = _build(
            RobotConfig,
            doc["robot"],
            "robot",
            {
                "z_range": lambda v: tuple(float(x) for x in _pair(v)),
                "margin": float,
                "gains": _gains,
                "waypoints": str,
            },
        )
    if "cameras" in doc:
        kwargs["cameras"] = _build(
            CamerasConfig,
            doc["cameras"],
            "cameras",
            {
                "low": lambda v: tuple(int(x) for x in _pair(v)),
                "high": lambda v: tuple(int(x) for x in _pair(v)),
                "hfov_deg": float,
                "vfov_deg": float,
                "max_range": float,
            },
        )
    if "noise" in doc:
        kwargs["noise"] = _noise(doc["noise"])
    if "evaluation" in doc:
        kwargs["evaluation"] = _build(
            EvaluationConfig,
            doc["evaluation"],
            "evaluation",
            {"max_assoc_dt": float, "gap_factor": float},
        )
    cfg = PipelineConfig(**kwargs)
    cfg.validate()
    return cfg


def load_pipeline_config(path: str | Path | None) -> PipelineConfig:
    """Load and validate a pipeline configuration; None means defaults."""
    if path is None:
        cfg = PipelineConfig()
        cfg.validate()
        return cfg
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"unreadable configuration: {exc}") from None
    return pipeline_from_dict(doc)


def apply_seed(cfg: PipelineConfig, seed: int | None) -> PipelineConfig:
    """Propagate a master seed into every seeded sub-configuration."""
    if seed is None:
        seed = cfg.seed
    cfg.seed = int(seed)
    cfg.sim.rng_seed = int(seed)
    cfg.placement.rng_seed = int(seed)
    cfg.noise.imu.rng_seed = int(seed)
    cfg.noise.depth.rng_seed = int(seed)
    cfg.noise.shutter.rng_seed = int(seed)
    return cfg
