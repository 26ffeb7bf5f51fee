"""Per-sequence motion and coverage statistics.

Speed and acceleration statistics come from the recorded odometry twist,
not from a re-simulation; dynamic coverage comes from counting person
pixels in the instance frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sim import channels as codec
from ..sim.log import RecordLog, base_channel
from .trajectory import EvalError

AXIS_NAMES = ("x", "y", "z", "roll", "pitch", "yaw")


@dataclass
class SequenceStats:
    avg_abs_speed: np.ndarray
    avg_abs_accel: np.ndarray
    n_frames: int
    n_dynamic_frames: int
    covered_ratio: float
    duration: float


def _odometry_channel(log: RecordLog, channel: str | None) -> str:
    if channel is not None:
        return channel
    names = [n for n in log.channel_names if base_channel(n) == "odometry"]
    if not names:
        raise EvalError("log has no odometry channel")
    return names[0]


def sequence_stats(
    log: RecordLog,
    instance_frames=(),
    human_ids=(),
    odometry_channel: str | None = None,
) -> SequenceStats:
    """Motion averages plus how much of the view moving people cover.

    ``avg_abs_speed`` and ``avg_abs_accel`` are per-axis means of the
    absolute odometry twist and of its finite difference. A frame is
    dynamic when at least one pixel belongs to a listed person id;
    ``covered_ratio`` is the mean person-pixel percentage over dynamic
    frames alone.
    """
    name = _odometry_channel(log, odometry_channel)
    records = log.channel_records(name)
    if len(records) < 2:
        raise EvalError(f"channel {name!r} has too few records for statistics")
    stamps = np.array([r.sim_time for r in records])
    twists = np.stack([codec.unpack_odometry(r.payload)[1] for r in records])
    dts = np.diff(stamps)
    if np.any(dts <= 0.0):
        raise EvalError("odometry stamps must increase strictly")
    accel = np.diff(twists, axis=0) / dts[:, None]
    avg_abs_speed = np.abs(twists).mean(axis=0)
    avg_abs_accel = np.abs(accel).mean(axis=0)

    human_ids = np.asarray(sorted(set(int(h) for h in human_ids)), dtype=np.uint32)
    n_frames = 0
    dynamic = 0
    coverage = []
    for frame in instance_frames:
        ids = np.asarray(getattr(frame, "data", frame))
        n_frames += 1
        if len(human_ids) == 0:
            continue
        mask = np.isin(ids, human_ids)
        count = int(mask.sum())
        if count > 0:
            dynamic += 1
            coverage.append(100.0 * count / ids.size)
    covered = float(np.mean(coverage)) if coverage else 0.0
    return SequenceStats(
        avg_abs_speed=avg_abs_speed,
        avg_abs_accel=avg_abs_accel,
        n_frames=n_frames,
        n_dynamic_frames=dynamic,
        covered_ratio=covered,
        duration=float(stamps[-1] - stamps[0]),
    )
