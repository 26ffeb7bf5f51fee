"""Re-run a recorded sequence without re-simulating physics.

Robot and camera poses come straight from the log; asset poses are
re-derived from the scene manifest and the shared animation clock, which
are deterministic in simulation time. Existing channels pass through
untouched, so a replay without new sensors reproduces the input log byte
for byte, while new camera channels are synthesized at the recorded
poses.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..sensors.boxes import bounding_boxes, save_boxes_jsonl
from ..sensors.camera import CameraIntrinsics, raycast_camera
from ..sensors.images import (
    proxy_rgb,
    save_depth_png,
    save_instance_png,
    save_pfm,
    save_rgb_png,
)
from . import channels as codec
from .config import ConfigError
from .log import LogError, Record, RecordLog, base_channel
from .scene import SceneBundle


@dataclass
class NewCamera:
    """A sensor to synthesize during replay, recorded under its own name."""

    name: str
    intrinsics: CameraIntrinsics
    render: bool = False


def check_complete(log: RecordLog) -> None:
    """Verify the log holds every record its own header promises."""
    log.check_indices()
    expected = log.config.expected_counts()
    counts = log.counts()
    for name in log.channel_names:
        want = expected.get(base_channel(name))
        if want is None:
            continue
        have = counts.get(name, 0)
        if have < want:
            raise LogError(
                f"missing channel records: {name} has {have} of {want}"
            )


def replay(
    log: RecordLog,
    scene: SceneBundle,
    new_cameras: list | None = None,
    *,
    out_dir=None,
) -> RecordLog:
    """Copy a log, optionally adding channels for new cameras.

    The scene must be the one the log was recorded against; replaying
    against a different manifest raises an error rather than silently
    mixing geometry.
    """
    if log.scene_manifest != scene.manifest_ref:
        raise LogError(
            f"scene manifest mismatch: log was recorded against "
            f"{log.scene_manifest!r}, got {scene.manifest_ref!r}"
        )
    check_complete(log)
    new_cameras = list(new_cameras or ())
    if not new_cameras:
        return RecordLog(
            config=log.config,
            scene_manifest=log.scene_manifest,
            namespaces=log.namespaces,
            start_offset=log.start_offset,
            channel_names=log.channel_names,
            records=list(log.records),
        )

    for cam in new_cameras:
        if cam.render and out_dir is None:
            raise ConfigError("rendering a new camera requires an output directory")

    rates = log.config.schedule.rates
    if rates["depth"] and rates["camera_pose"] % rates["depth"] != 0:
        raise ConfigError(
            "depth rate must divide the camera pose rate to reuse recorded poses"
        )

    prefixes = [f"{ns}/" if ns else "" for ns in (log.namespaces or ("",))]
    extra_names = []
    for prefix in prefixes:
        for cam in new_cameras:
            for base in ("rgb", "depth"):
                name = f"{prefix}{cam.name}/{base}"
                if name in log.channel_names or name in extra_names:
                    raise ConfigError(f"channel {name!r} already exists")
                extra_names.append(name)

    out = RecordLog(
        config=log.config,
        scene_manifest=log.scene_manifest,
        namespaces=log.namespaces,
        start_offset=log.start_offset,
        channel_names=tuple(list(log.channel_names) + extra_names),
        records=list(log.records),
    )

    stride = rates["camera_pose"] // rates["depth"] if rates["depth"] else 0
    for prefix in prefixes:
        pose_records = log.channel_records(f"{prefix}camera_pose")
        picked = pose_records[::stride] if stride else []
        for cam in new_cameras:
            for frame, pose_rec in enumerate(picked):
                pose = codec.unpack_pose(pose_rec.payload)
                if cam.render:
                    _render_new_frame(scene, cam, prefix, frame, pose_rec.sim_time, pose, out_dir)
                payload = codec.pack_frame_ref(frame, pose, cam.render)
                for base in ("rgb", "depth"):
                    out.records.append(
                        Record(
                            f"{prefix}{cam.name}/{base}",
                            frame,
                            pose_rec.sim_time,
                            payload,
                        )
                    )
    out.sort_records()
    out.check_indices()
    return out


def _render_new_frame(
    scene: SceneBundle,
    cam: NewCamera,
    prefix: str,
    frame: int,
    sim_time: float,
    pose,
    out_dir,
) -> None:
    snapshot = scene.snapshot(sim_time)
    depth, inst = raycast_camera(snapshot, pose, cam.intrinsics)
    rgb = proxy_rgb(depth, inst)
    base = Path(out_dir) / (prefix.rstrip("/") if prefix else "") / cam.name
    for sub in ("depth", "rgb", "instance"):
        (base / sub).mkdir(parents=True, exist_ok=True)
    stem = f"{frame:06d}"
    save_pfm(base / "depth" / f"{stem}.pfm", depth)
    save_depth_png(base / "depth" / f"{stem}.png", depth)
    save_rgb_png(base / "rgb" / f"{stem}.png", rgb)
    save_instance_png(base / "instance" / f"{stem}.png", inst)
    boxes = bounding_boxes(snapshot, depth, inst, pose, cam.intrinsics)
    save_boxes_jsonl(base / "boxes.jsonl", frame, boxes)
