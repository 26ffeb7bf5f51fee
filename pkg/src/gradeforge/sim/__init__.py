from .config import CHANNEL_ORDER, DEFAULT_RATES, ChannelSchedule, SimConfig
from .log import Record, RecordLog, load_log, load_text_log, save_log, save_text_log
from .timeline import Timeline, sample_timeline
from .scene import SceneBundle, load_scene
from .engine import RobotSpec, namespace_channels, run
from .replay import replay

__all__ = [
    "CHANNEL_ORDER",
    "DEFAULT_RATES",
    "ChannelSchedule",
    "SimConfig",
    "Record",
    "RecordLog",
    "load_log",
    "load_text_log",
    "save_log",
    "save_text_log",
    "Timeline",
    "sample_timeline",
    "SceneBundle",
    "load_scene",
    "RobotSpec",
    "namespace_channels",
    "run",
    "replay",
]
