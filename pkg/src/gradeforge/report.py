"""Delimited reports with rendered figures beside them.

Every evaluation artifact comes in two forms in the same directory: a
CSV table for machines and a PNG chart for people. Rendering uses the
non-interactive backend so reports work on headless machines.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation.metrics import AteResult
from .evaluation.stats import AXIS_NAMES, SequenceStats
from .evaluation.trajectory import Trajectory


def write_csv(path: str | Path, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def eval_report(
    out_dir: str | Path,
    result: AteResult,
    missing: float,
    duration: float,
    gt: Trajectory,
    est: Trajectory,
    label: str = "estimate",
) -> list[Path]:
    """Write the accuracy table and its two figures; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "evaluation.csv"
    write_csv(
        csv_path,
        [
            {
                "label": label,
                "ate_rmse_m": f"{result.rmse:.6f}",
                "ate_mean_m": f"{result.mean:.6f}",
                "ate_median_m": f"{result.median:.6f}",
                "ate_max_m": f"{result.max:.6f}",
                "matched_poses": result.matched,
                "missing_time_s": f"{missing:.6f}",
                "duration_s": f"{duration:.6f}",
            }
        ],
    )

    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(np.arange(result.matched), result.residuals, lw=1.0)
    ax.set_xlabel("matched pose")
    ax.set_ylabel("translation error [m]")
    ax.set_title(f"alignment error, RMSE {result.rmse:.3f} m")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    residual_path = out_dir / "ate_residuals.png"
    fig.savefig(residual_path, dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.plot(gt.positions[:, 0], gt.positions[:, 1], label="ground truth", lw=1.2)
    ax.plot(
        est.positions[:, 0],
        est.positions[:, 1],
        label=label,
        lw=1.0,
        ls="--",
    )
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    overlay_path = out_dir / "trajectory_xy.png"
    fig.savefig(overlay_path, dpi=120)
    plt.close(fig)
    return [csv_path, residual_path, overlay_path]


def stats_report(
    out_dir: str | Path,
    stats: SequenceStats,
    twist_stamps: np.ndarray | None = None,
    twists: np.ndarray | None = None,
) -> list[Path]:
    """Write the per-sequence statistics table and a motion figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sequence_stats.csv"
    row = {"duration_s": f"{stats.duration:.6f}"}
    for i, axis in enumerate(AXIS_NAMES):
        row[f"avg_abs_speed_{axis}"] = f"{stats.avg_abs_speed[i]:.6f}"
    for i, axis in enumerate(AXIS_NAMES):
        row[f"avg_abs_accel_{axis}"] = f"{stats.avg_abs_accel[i]:.6f}"
    row["n_frames"] = stats.n_frames
    row["n_dynamic_frames"] = stats.n_dynamic_frames
    row["covered_ratio_pct"] = f"{stats.covered_ratio:.4f}"
    write_csv(csv_path, [row])

    paths = [csv_path]
    if twist_stamps is not None and twists is not None and len(twist_stamps):
        fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
        lin = np.linalg.norm(twists[:, :3], axis=1)
        ang = np.linalg.norm(twists[:, 3:], axis=1)
        axes[0].plot(twist_stamps, lin, lw=0.9)
        axes[0].set_ylabel("linear speed [m/s]")
        axes[0].grid(True, alpha=0.3)
        axes[1].plot(twist_stamps, ang, lw=0.9, color="tab:orange")
        axes[1].set_ylabel("angular speed [rad/s]")
        axes[1].set_xlabel("time [s]")
        axes[1].grid(True, alpha=0.3)
        fig.tight_layout()
        fig_path = out_dir / "motion_profile.png"
        fig.savefig(fig_path, dpi=120)
        plt.close(fig)
        paths.append(fig_path)
    return paths
