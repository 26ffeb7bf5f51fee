from .trajectory import EvalError, Trajectory, load_tum, save_tum
from .metrics import (
    DEFAULT_GAP_FACTOR,
    DEFAULT_MAX_ASSOC_DT,
    AteResult,
    apply_rigid,
    associate,
    ate_rmse,
    missing_time,
)
from .stats import AXIS_NAMES, SequenceStats, sequence_stats

__all__ = [
    "EvalError",
    "Trajectory",
    "load_tum",
    "save_tum",
    "DEFAULT_GAP_FACTOR",
    "DEFAULT_MAX_ASSOC_DT",
    "AteResult",
    "apply_rigid",
    "associate",
    "ate_rmse",
    "missing_time",
    "AXIS_NAMES",
    "SequenceStats",
    "sequence_stats",
]
