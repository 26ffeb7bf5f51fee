"""Trajectory accuracy and coverage metrics.

Absolute error uses first-pose alignment only: the estimate is moved by
the single rigid transform that makes its first matched pose coincide
with the ground truth, with no least-squares fit and no scale
correction, so early drift shows up instead of being absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.pose import Pose
from .trajectory import EvalError, Trajectory

DEFAULT_MAX_ASSOC_DT = 0.02  # seconds
DEFAULT_GAP_FACTOR = 2.0


@dataclass
class AteResult:
    rmse: float
    mean: float
    median: float
    max: float
    matched: int
    residuals: np.ndarray


def associate(
    gt_stamps: np.ndarray, est_stamps: np.ndarray, max_dt: float
) -> list[tuple[int, int]]:
    """Nearest ground-truth index for each estimate stamp, within max_dt."""
    gt_stamps = np.asarray(gt_stamps, dtype=float)
    est_stamps = np.asarray(est_stamps, dtype=float)
    pairs = []
    pos = np.searchsorted(gt_stamps, est_stamps)
    for i, p in enumerate(pos):
        best = None
        for j in (p - 1, p):
            if 0 <= j < len(gt_stamps):
                d = abs(gt_stamps[j] - est_stamps[i])
                if best is None or d < best[0]:
                    best = (d, j)
        if best is not None and best[0] <= max_dt:
            pairs.append((best[1], i))
    return pairs


def ate_rmse(
    gt: Trajectory, est: Trajectory, max_assoc_dt: float = DEFAULT_MAX_ASSOC_DT
) -> AteResult:
    """Translation error after aligning the first matched pose pair.

    Raises when no estimate stamp lands within ``max_assoc_dt`` of a
    ground-truth stamp, since an unmatched trajectory has no error to
    report.
    """
    gt.validate()
    est.validate()
    pairs = associate(gt.stamps, est.stamps, max_assoc_dt)
    if not pairs:
        raise EvalError(
            f"no pose associations within {max_assoc_dt:g} s; "
            "the trajectories do not overlap"
        )
    j0, i0 = pairs[0]
    align = gt.pose(j0).compose(est.pose(i0).inverse())
    residuals = np.empty(len(pairs))
    for k, (j, i) in enumerate(pairs):
        aligned = align.compose(est.pose(i))
        residuals[k] = np.linalg.norm(gt.positions[j] - aligned.position)
    return AteResult(
        rmse=float(np.sqrt(np.mean(np.square(residuals)))),
        mean=float(residuals.mean()),
        median=float(np.median(residuals)),
        max=float(residuals.max()),
        matched=len(pairs),
        residuals=residuals,
    )


def apply_rigid(traj: Trajectory, transform: Pose) -> Trajectory:
    """Pre-multiply every pose by a world-frame rigid transform."""
    poses = [transform.compose(traj.pose(i)) for i in range(len(traj))]
    return Trajectory.from_poses(traj.stamps.copy(), poses)


def missing_time(
    duration: float,
    est_stamps: np.ndarray,
    gap_factor: float = DEFAULT_GAP_FACTOR,
) -> float:
    """Seconds of a sequence the estimate leaves uncovered.

    The nominal output rate is the median of the stamp differences. An
    inter-stamp interval counts as tracked only while it stays within
    ``gap_factor`` nominal periods; a longer gap means tracking was lost
    at its left edge and the whole interval counts as missing. The
    lead-in before the first stamp and the lead-out after the last are
    treated the same way. An empty estimate misses the whole sequence.
    """
    if duration < 0.0:
        raise EvalError("duration must be non-negative")
    if gap_factor <= 0.0:
        raise EvalError("gap_factor must be positive")
    est_stamps = np.asarray(est_stamps, dtype=float).reshape(-1)
    if len(est_stamps) == 0:
        return float(duration)
    if np.any(np.diff(est_stamps) <= 0.0):
        raise EvalError("stamps must increase strictly")
    if len(est_stamps) == 1:
        return float(duration)
    periods = np.diff(est_stamps)
    nominal_period = float(np.median(periods))
    allowance = gap_factor * nominal_period
    tracked = float(periods[periods <= allowance].sum())
    lead = est_stamps[0] - 0.0
    if 0.0 <= lead <= allowance:
        tracked += lead
    tail = duration - est_stamps[-1]
    if 0.0 <= tail <= allowance:
        tracked += tail
    return float(np.clip(duration - tracked, 0.0, duration))
