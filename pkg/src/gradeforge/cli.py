"""Command-line front end for the full pipeline.

Subcommands cover the life of a sequence: extract a room footprint,
compose scenes, simulate and record, corrupt or repair recordings,
replay them with new sensors, and evaluate estimated trajectories.
Every command writes a JSON run summary (seeds, counts, output
checksums, wall time) into its output directory.

Exit codes: 0 on success, 1 for configuration and input validation
problems, 2 for association and integrity failures.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import PipelineConfig, apply_seed, load_pipeline_config
from .evaluation.metrics import ate_rmse, missing_time
from .evaluation.stats import AXIS_NAMES, sequence_stats
from .evaluation.trajectory import EvalError, load_tum
from .geometry.footprint import extract_footprint, rasterize_occupancy
from .geometry.io import load_mesh, save_pgm, save_polygon_txt, save_stl
from .noise.depth import corrupt_depth
from .noise.imu import corrupt_imu
from .noise.reindex import reindex_log
from .robot.model import JointLimits
from .robot.waypoints import load_waypoints
from .scene.manifest import manifest_from_placement, save_manifest
from .scene.placement import place_humans, sample_human_count, spawn_flying_objects
from .scene.proxies import demo_room, walking_human_track
from .scene.tracks import save_track
from .sensors.camera import CameraIntrinsics
from .sensors.images import load_pfm, save_pfm
from .sensors.imu import ImuSample, ImuStream
from .sim import channels as codec
from .sim.config import ConfigError
from .sim.engine import RobotSpec, run
from .sim.log import (
    LogError,
    Record,
    RecordLog,
    export_tum,
    load_log,
    log_bytes,
    save_log,
    save_text_log,
)
from .sim.replay import NewCamera, replay
from .sim.scene import load_scene

log = logging.getLogger("gradeforge")

ENV_LOG_LEVEL = "GRADE_FORGE_LOG_LEVEL"


def _setup_logging() -> None:
    level_name = os.environ.get(ENV_LOG_LEVEL, "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class _Summary:
    """Collects counts and output checksums, then writes run_summary.json."""

    def __init__(self, command: str, out_dir: Path, seed=None):
        self.command = command
        self.out_dir = out_dir
        self.seed = seed
        self.counts: dict = {}
        self.outputs: list[Path] = []
        self.t0 = time.monotonic()

    def add(self, *paths) -> None:
        self.outputs.extend(Path(p) for p in paths)

    def write(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "command": self.command,
            "seed": self.seed,
            "counts": self.counts,
            "checksums": {
                str(p.relative_to(self.out_dir) if p.is_relative_to(self.out_dir) else p): _sha256(p)
                for p in self.outputs
                if p.is_file()
            },
            "wall_time_s": round(time.monotonic() - self.t0, 3),
        }
        path = self.out_dir / "run_summary.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- footprint ---------------------------------------------------------------


def cmd_footprint(args) -> int:
    out = _out_dir(args)
    cfg = apply_seed(load_pipeline_config(args.config), args.seed)
    fp_cfg = cfg.footprint
    env = load_mesh(args.mesh, semantic_label="environment")
    footprint = extract_footprint(env, slice_height=fp_cfg.slice_height)
    grid = rasterize_occupancy(
        env, resolution=fp_cfg.resolution, slab=fp_cfg.slab, footprint=footprint
    )
    summary = _Summary("footprint", out, cfg.seed)
    poly_path = out / "footprint_polygon.txt"
    save_polygon_txt(poly_path, footprint.polygon)
    rect_path = out / "footprint_rect.txt"
    with open(rect_path, "w", encoding="utf-8") as fh:
        fh.write("# min_x min_y max_x max_y\n")
        fh.write(" ".join(repr(float(v)) for v in footprint.circumscribed_rect) + "\n")
    pgm_path = out / "occupancy.pgm"
    save_pgm(pgm_path, grid.cells)
    summary.add(poly_path, rect_path, pgm_path)
    summary.counts = {
        "polygon_vertices": int(len(footprint.polygon)),
        "grid_cells": [int(v) for v in grid.cells.shape],
        "flagged_corners": len(footprint.flagged_corners),
    }
    summary.write()
    print(
        f"footprint: {len(footprint.polygon)} vertices, grid "
        f"{grid.cells.shape[0]}x{grid.cells.shape[1]} at {fp_cfg.resolution} m"
    )
    return 0


# -- compose -----------------------------------------------------------------


def _compose_one(cfg: PipelineConfig, seed: int, out: Path) -> dict:
    scene_dir = out / f"scene_{seed:04d}"
    tracks_dir = scene_dir / "tracks"
    tracks_dir.mkdir(parents=True, exist_ok=True)

    env_cfg = cfg.environment
    if env_cfg.mesh is not None:
        env = load_mesh(env_cfg.mesh, instance_id=1, semantic_label="environment")
    else:
        furniture = (
            env_cfg.furniture_seed if env_cfg.furniture_seed is not None else seed
        )
        env = demo_room(
            size_x=env_cfg.size_x,
            size_y=env_cfg.size_y,
            height=env_cfg.height,
            thickness=env_cfg.thickness,
            furniture_seed=furniture,
            instance_id=1,
        )
    env_path = scene_dir / "environment.stl"
    save_stl(env_path, env)

    footprint = extract_footprint(env, slice_height=cfg.footprint.slice_height)
    n_humans = sample_human_count(cfg.compose, seed)
    rng = np.random.default_rng(seed)
    tracks = [
        walking_human_track(rng, instance_id=2 + i) for i in range(n_humans)
    ]
    placement = cfg.placement
    placement.rng_seed = seed
    placed = place_humans(env, footprint, tracks, placement, floor_z=0.0)
    flying = spawn_flying_objects(cfg.compose, footprint, rng_seed=seed)

    entries = []
    for asset in placed + flying:
        track_file = f"tracks/{asset.track.semantic_label}_{asset.track.instance_id:04d}.npz"
        save_track(scene_dir / track_file, asset.track)
        entries.append((asset, track_file))
    manifest = manifest_from_placement(
        environment="environment.stl",
        seed=seed,
        profile=cfg.compose.profile,
        placement=placement,
        assets=entries,
        floor_z=0.0,
    )
    manifest_path = scene_dir / "scene.yaml"
    save_manifest(manifest_path, manifest)
    n_placed = sum(1 for a in placed if a.placed)
    return {
        "seed": seed,
        "manifest": str(manifest_path),
        "humans_placed": n_placed,
        "humans_requested": n_humans,
        "flying": len(flying),
        "environment_triangles": int(env.num_triangles),
    }


def cmd_compose(args) -> int:
    out = _out_dir(args)
    cfg = apply_seed(load_pipeline_config(args.config), args.seed)
    seeds = [cfg.seed + k for k in range(args.count)]
    summary = _Summary("compose", out, cfg.seed)
    results = []
    if args.jobs > 1 and len(seeds) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_compose_one, cfg, s, out) for s in seeds]
            results = [f.result() for f in futures]
    else:
        results = [_compose_one(cfg, s, out) for s in seeds]
    results.sort(key=lambda r: r["seed"])
    for res in results:
        print(
            f"scene {res['seed']}: {res['humans_placed']}/{res['humans_requested']} "
            f"humans placed, {res['flying']} flying objects -> {res['manifest']}"
        )
        summary.add(res["manifest"])
    summary.counts = {
        "scenes": len(results),
        "humans_placed": sum(r["humans_placed"] for r in results),
        "flying": sum(r["flying"] for r in results),
    }
    summary.write()
    return 0


# -- simulate ----------------------------------------------------------------


def _robot_from_config(cfg: PipelineConfig, scene) -> RobotSpec:
    footprint = extract_footprint(
        scene.environment, slice_height=cfg.footprint.slice_height
    )
    min_x, min_y, max_x, max_y = footprint.circumscribed_rect
    m = cfg.robot.margin
    z_lo, z_hi = cfg.robot.z_range
    limits = JointLimits.for_box(
        [min_x + m, min_y + m, z_lo],
        [max_x - m, max_y - m, z_hi],
        stabilized=cfg.sim.stabilized,
    )
    setpoints = None
    if cfg.robot.waypoints is not None:
        setpoints = load_waypoints(cfg.robot.waypoints)
    w, h = cfg.cameras.low
    fov_kwargs = {}
    if cfg.cameras.hfov_deg is not None:
        fov_kwargs["hfov_deg"] = cfg.cameras.hfov_deg
    if cfg.cameras.vfov_deg is not None:
        fov_kwargs["vfov_deg"] = cfg.cameras.vfov_deg
    intrinsics = CameraIntrinsics.from_fov(
        w, h, max_range=cfg.cameras.max_range, name="low", **fov_kwargs
    )
    return RobotSpec(
        limits=limits,
        gains=cfg.robot.gains,
        setpoints=setpoints,
        intrinsics=intrinsics,
    )


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    cfg = apply_seed(load_pipeline_config(args.config), args.seed)
    scene = load_scene(args.scene)
    robot = _robot_from_config(cfg, scene)
    summary = _Summary("simulate", out, cfg.seed)
    rec_log = run(
        cfg.sim,
        scene,
        [robot],
        render=args.render,
        out_dir=out / "frames" if args.render else None,
        clock_fault_steps=args.fault_clock_steps,
    )
    log_path = out / "log.grlg"
    save_log(rec_log, log_path)
    summary.add(log_path)
    if args.text_log:
        text_path = out / "log.jsonl"
        save_text_log(rec_log, text_path)
        summary.add(text_path)
    counts = rec_log.counts()
    if counts.get("camera_pose", 0) > 0:
        tum_path = out / "gt_camera.tum"
        export_tum(rec_log, "camera_pose", tum_path)
        summary.add(tum_path)
    summary.counts = {name: counts.get(name, 0) for name in rec_log.channel_names}
    summary.write()
    digest = hashlib.sha256(log_bytes(rec_log)).hexdigest()
    for name in rec_log.channel_names:
        print(f"{name}: {counts.get(name, 0)}")
    print(f"log sha256: {digest}")
    return 0


# -- postprocess -------------------------------------------------------------


def _imu_channel_stream(records) -> ImuStream:
    stamps = np.array([r.sim_time for r in records])
    samples = [codec.unpack_imu(r.payload) for r in records]
    return ImuStream(
        stamps,
        np.stack([s.gyro for s in samples]),
        np.stack([s.accel for s in samples]),
    )


def cmd_postprocess(args) -> int:
    out = _out_dir(args)
    cfg = apply_seed(load_pipeline_config(args.config), args.seed)
    rec_log = load_log(args.log)
    summary = _Summary("postprocess", out, cfg.seed)
    imu_cfg = cfg.noise.imu
    zero_imu = (
        imu_cfg.gyro_noise_density == 0.0
        and imu_cfg.accel_noise_density == 0.0
        and imu_cfg.gyro_bias_walk == 0.0
        and imu_cfg.accel_bias_walk == 0.0
        and not imu_cfg.initial_gyro_bias.any()
        and not imu_cfg.initial_accel_bias.any()
    )

    corrupted = {}
    for name in rec_log.channel_names:
        if name.rsplit("/", 1)[-1] not in ("imu_body", "imu_camera"):
            continue
        records = rec_log.channel_records(name)
        if len(records) < 2:
            continue
        noisy = corrupt_imu(_imu_channel_stream(records), imu_cfg, stream_name=name)
        for k, rec in enumerate(records):
            corrupted[(name, rec.index)] = codec.pack_imu(
                ImuSample(noisy.gyro[k], noisy.accel[k])
            )
    out_records = []
    for rec in rec_log.records:
        payload = corrupted.get((rec.channel, rec.index), rec.payload)
        out_records.append(Record(rec.channel, rec.index, rec.sim_time, payload))
    noisy_log = RecordLog(
        config=rec_log.config,
        scene_manifest=rec_log.scene_manifest,
        namespaces=rec_log.namespaces,
        start_offset=rec_log.start_offset,
        channel_names=rec_log.channel_names,
        records=out_records,
    )
    stem = Path(args.log).stem
    noisy_path = out / f"{stem}.noisy.grlg"
    save_log(noisy_log, noisy_path)
    summary.add(noisy_path)
    n_frames = 0
    zero_depth = (
        cfg.noise.depth.sigma_a == 0.0
        and cfg.noise.depth.sigma_b == 0.0
        and cfg.noise.depth.dropout_prob == 0.0
    )
    if args.frames:
        frames_dir = Path(args.frames)
        for pfm in sorted(frames_dir.rglob("*.pfm")):
            if ".noisy" in pfm.name:
                continue
            frame_idx = int(pfm.stem) if pfm.stem.isdigit() else n_frames
            noisy = corrupt_depth(load_pfm(pfm), cfg.noise.depth, frame=frame_idx)
            rel = pfm.relative_to(frames_dir)
            dest = out / rel.parent / f"{pfm.stem}.noisy.pfm"
            dest.parent.mkdir(parents=True, exist_ok=True)
            save_pfm(dest, noisy)
            summary.add(dest)
            n_frames += 1
    if zero_imu and (not args.frames or zero_depth):
        log.warning("noise configuration is all zero; outputs are byte-equal to inputs")
        print("warning: noise configuration is all zero; outputs equal inputs")
    if args.reindex:
        fixed = reindex_log(rec_log)
        reindexed_path = out / f"{stem}.reindexed.grlg"
        save_log(fixed, reindexed_path)
        summary.add(reindexed_path)
        print(f"reindexed log -> {reindexed_path}")
    summary.counts = {
        "imu_channels": len(
            {name for name, _ in corrupted}
        ),
        "imu_records": len(corrupted),
        "depth_frames": n_frames,
    }
    summary.write()
    print(f"noisy log -> {noisy_path}")
    return 0


# -- replay ------------------------------------------------------------------


def _parse_camera_spec(text: str) -> NewCamera:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(
            f"bad camera spec {text!r}; expected name:WIDTHxHEIGHT[:RANGE]"
        )
    name, size = parts[0], parts[1]
    if not name or "/" in name:
        raise ConfigError(f"bad camera name {name!r}")
    try:
        w, h = (int(v) for v in size.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad camera size {size!r}") from None
    max_range = float(parts[2]) if len(parts) == 3 else float("inf")
    return NewCamera(name, CameraIntrinsics.from_fov(w, h, max_range=max_range, name=name))


def cmd_replay(args) -> int:
    out = _out_dir(args)
    rec_log = load_log(args.log)
    scene = load_scene(args.scene)
    # manifest paths compare as given; allow the CLI to re-anchor them
    if args.match_manifest:
        scene.manifest_ref = rec_log.scene_manifest
    cameras = [_parse_camera_spec(spec) for spec in args.new_camera]
    for cam in cameras:
        cam.render = args.render
    summary = _Summary("replay", out)
    replayed = replay(rec_log, scene, cameras, out_dir=out / "frames" if args.render else None)
    replay_path = out / f"{Path(args.log).stem}.replayed.grlg"
    save_log(replayed, replay_path)
    summary.add(replay_path)
    identical = log_bytes(replayed) == log_bytes(rec_log)
    counts = replayed.counts()
    summary.counts = {name: counts.get(name, 0) for name in replayed.channel_names}
    summary.write()
    print(f"replayed log -> {replay_path}")
    if not cameras:
        print(f"byte-identical to input: {'yes' if identical else 'NO'}")
    return 0


# -- eval --------------------------------------------------------------------


def cmd_eval(args) -> int:
    out = _out_dir(args)
    cfg = apply_seed(load_pipeline_config(args.config), args.seed)
    gt = load_tum(args.gt)
    est = load_tum(args.est)
    duration = args.duration
    if duration is None:
        duration = float(gt.stamps[-1] - gt.stamps[0])
    summary = _Summary("eval", out, cfg.seed)
    result = ate_rmse(gt, est, max_assoc_dt=cfg.evaluation.max_assoc_dt)
    rel_stamps = est.stamps - gt.stamps[0]
    missing = missing_time(duration, rel_stamps, gap_factor=cfg.evaluation.gap_factor)
    from .report import eval_report

    label = Path(args.est).stem
    paths = eval_report(out, result, missing, duration, gt, est, label=label)
    summary.add(*paths)
    summary.counts = {
        "matched_poses": result.matched,
        "gt_poses": len(gt),
        "est_poses": len(est),
    }
    summary.write()
    print(f"{'Sequence':<28}{'ATE [m]':>10}  {'Missing Time [s]':>16}")
    print(f"{label:<28}{result.rmse:>10.3f}  {missing:>16.2f}")
    print(
        f"detail: mean {result.mean:.4f} m, max {result.max:.4f} m, "
        f"matched {result.matched} of {len(est)} poses, duration {duration:.2f} s"
    )
    return 0


# -- stats -------------------------------------------------------------------


def _load_instance_frames(frames_dir: Path):
    from .sensors.images import load_instance_png

    paths = sorted(frames_dir.glob("*.png"))
    return [load_instance_png(p) for p in paths]


def cmd_stats(args) -> int:
    out = _out_dir(args)
    rec_log = load_log(args.log)
    human_ids = []
    if args.human_ids:
        human_ids = [int(v) for v in args.human_ids.split(",") if v.strip()]
    elif args.scene:
        scene = load_scene(args.scene)
        human_ids = scene.human_instance_ids()
    frames = _load_instance_frames(Path(args.frames)) if args.frames else []
    summary = _Summary("stats", out)
    stats = sequence_stats(rec_log, frames, human_ids)
    name = next(
        n for n in rec_log.channel_names if n.rsplit("/", 1)[-1] == "odometry"
    )
    records = rec_log.channel_records(name)
    stamps = np.array([r.sim_time for r in records])
    twists = np.stack([codec.unpack_odometry(r.payload)[1] for r in records])
    from .report import stats_report

    paths = stats_report(out, stats, stamps, twists)
    summary.add(*paths)
    summary.counts = {
        "odometry_records": len(records),
        "frames": stats.n_frames,
        "dynamic_frames": stats.n_dynamic_frames,
    }
    summary.write()
    speeds = ", ".join(
        f"{axis}={stats.avg_abs_speed[i]:.4f}" for i, axis in enumerate(AXIS_NAMES)
    )
    print(f"avg abs speed: {speeds}")
    print(
        f"dynamic frames: {stats.n_dynamic_frames}/{stats.n_frames}, "
        f"covered {stats.covered_ratio:.2f}%"
    )
    return 0


# -- parser ------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="pipeline configuration file")
    sub.add_argument("--seed", type=int, default=None, help="override the master seed")
    sub.add_argument("--jobs", type=int, default=1, help="parallel workers")
    sub.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradeforge",
        description="desk-scale dynamic-scene recording and evaluation pipeline",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("footprint", help="extract a room footprint and occupancy grid")
    _add_common(p)
    p.add_argument("--mesh", required=True, help="environment mesh (STL or OBJ)")
    p.set_defaults(fn=cmd_footprint)

    p = subs.add_parser("compose", help="compose seeded scenes with animated assets")
    _add_common(p)
    p.add_argument("--count", type=int, default=1, help="number of scenes")
    p.set_defaults(fn=cmd_compose)

    p = subs.add_parser("simulate", help="fly the robot and record a log")
    _add_common(p)
    p.add_argument("--scene", required=True, help="scene manifest from compose")
    p.add_argument("--render", action="store_true", help="ray-cast camera frames")
    p.add_argument(
        "--text-log", action="store_true", help="also write a JSON-lines mirror"
    )
    p.add_argument(
        "--fault-clock-steps",
        type=int,
        default=0,
        help="inject a clock stamp delay of this many physics steps",
    )
    p.set_defaults(fn=cmd_simulate)

    p = subs.add_parser("postprocess", help="corrupt a log with sensor noise")
    _add_common(p)
    p.add_argument("--log", required=True, help="recorded log file")
    p.add_argument("--frames", default=None, help="directory of depth PFM frames")
    p.add_argument(
        "--reindex",
        action="store_true",
        help="also write a copy with stamps rebuilt from record indices",
    )
    p.set_defaults(fn=cmd_postprocess)

    p = subs.add_parser("replay", help="re-run a log, optionally with new sensors")
    _add_common(p)
    p.add_argument("--log", required=True, help="recorded log file")
    p.add_argument("--scene", required=True, help="scene manifest the log was made with")
    p.add_argument(
        "--new-camera",
        action="append",
        default=[],
        metavar="NAME:WxH[:RANGE]",
        help="synthesize channels for an extra camera (repeatable)",
    )
    p.add_argument("--render", action="store_true", help="ray-cast the new camera")
    p.add_argument(
        "--match-manifest",
        action="store_true",
        help="trust that the given manifest is the recorded one despite a moved path",
    )
    p.set_defaults(fn=cmd_replay)

    p = subs.add_parser("eval", help="score an estimated trajectory")
    _add_common(p)
    p.add_argument("--gt", required=True, help="ground-truth trajectory (text)")
    p.add_argument("--est", required=True, help="estimated trajectory (text)")
    p.add_argument(
        "--duration", type=float, default=None, help="sequence duration in seconds"
    )
    p.set_defaults(fn=cmd_eval)

    p = subs.add_parser("stats", help="per-sequence motion and coverage statistics")
    _add_common(p)
    p.add_argument("--log", required=True, help="recorded log file")
    p.add_argument("--scene", default=None, help="scene manifest, for person ids")
    p.add_argument(
        "--human-ids", default=None, help="comma-separated person instance ids"
    )
    p.add_argument("--frames", default=None, help="directory of instance PNG frames")
    p.set_defaults(fn=cmd_stats)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (EvalError, LogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
