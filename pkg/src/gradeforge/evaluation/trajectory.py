"""Stamped pose trajectories and plain-text interchange.

The text form is one pose per line, ``stamp tx ty tz qx qy qz qw`` with
``#`` comments, the layout most trajectory tooling reads directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..geometry.pose import Pose, quat_normalize


class EvalError(ValueError):
    """Raised when an evaluation input is unusable."""


@dataclass
class Trajectory:
    stamps: np.ndarray
    positions: np.ndarray
    quaternions: np.ndarray

    def __post_init__(self) -> None:
        self.stamps = np.asarray(self.stamps, dtype=float).reshape(-1)
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        self.quaternions = np.asarray(self.quaternions, dtype=float).reshape(-1, 4)

    def validate(self) -> None:
        n = len(self.stamps)
        if n == 0:
            raise EvalError("empty trajectory")
        if len(self.positions) != n or len(self.quaternions) != n:
            raise EvalError("trajectory arrays disagree in length")
        if not (
            np.all(np.isfinite(self.stamps))
            and np.all(np.isfinite(self.positions))
            and np.all(np.isfinite(self.quaternions))
        ):
            raise EvalError("trajectory contains non-finite values")
        if np.any(np.diff(self.stamps) <= 0.0):
            raise EvalError("stamps must increase strictly")
        norms = np.linalg.norm(self.quaternions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-3):
            raise EvalError("quaternions are not normalized")
        self.quaternions = self.quaternions / norms[:, None]

    def __len__(self) -> int:
        return len(self.stamps)

    def pose(self, i: int) -> Pose:
        return Pose(self.positions[i], quat_normalize(self.quaternions[i]))

    @staticmethod
    def from_poses(stamps, poses) -> "Trajectory":
        traj = Trajectory(
            np.asarray(stamps, dtype=float),
            np.stack([p.position for p in poses]),
            np.stack([p.quaternion for p in poses]),
        )
        traj.validate()
        return traj


def load_tum(path: str | Path) -> Trajectory:
    stamps = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 8:
                raise EvalError(
                    f"{path}:{lineno}: expected 8 fields, got {len(parts)}"
                )
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                raise EvalError(f"{path}:{lineno}: non-numeric field") from None
            stamps.append(vals[0])
            rows.append(vals[1:])
    if not rows:
        raise EvalError(f"{path}: no poses")
    rows_arr = np.asarray(rows)
    traj = Trajectory(np.asarray(stamps), rows_arr[:, :3], rows_arr[:, 3:])
    traj.validate()
    return traj


def save_tum(path: str | Path, traj: Trajectory) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# stamp tx ty tz qx qy qz qw\n")
        for i in range(len(traj)):
            vals = [traj.stamps[i], *traj.positions[i], *traj.quaternions[i]]
            fh.write(" ".join(repr(float(v)) for v in vals) + "\n")
