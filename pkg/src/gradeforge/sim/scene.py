"""Composed-scene loader for simulation and replay.

Bundles the environment mesh, the animated asset tracks named by a scene
manifest, and the shared animation timeline into one object the engine
can sample at any simulation time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..geometry.io import load_mesh
from ..geometry.mesh import TriMesh
from ..scene.manifest import ManifestAsset, SceneManifest, load_manifest
from ..scene.tracks import AnimationTrack, load_track
from ..sensors.camera import SceneSnapshot, build_snapshot
from .timeline import Timeline

#: Instance id given to an environment mesh that arrives with id 0, so
#: environment hits are distinguishable from no-hit background pixels.
ENVIRONMENT_INSTANCE_ID = 1


@dataclass
class SceneBundle:
    environment: TriMesh
    assets: list = field(default_factory=list)
    manifest_ref: str = ""
    floor_z: float = 0.0

    def __post_init__(self) -> None:
        if self.environment.instance_id == 0:
            self.environment = self.environment.with_instance(
                ENVIRONMENT_INSTANCE_ID, "environment"
            )
        ids = [self.environment.instance_id]
        ids += [track.instance_id for _, track in self.assets]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate instance ids in scene")

    @property
    def timeline(self) -> Timeline:
        return Timeline.from_tracks([track for _, track in self.assets])

    def human_instance_ids(self) -> list[int]:
        return sorted(
            track.instance_id
            for _, track in self.assets
            if track.semantic_label == "human"
        )

    def posed_meshes(self, t: float) -> list[TriMesh]:
        """Environment plus every asset sampled at simulation time ``t``."""
        timeline = self.timeline
        out = [self.environment]
        for pose, track in self.assets:
            local = track.sample(timeline.phase(t))
            out.append(local.transformed(pose))
        return out

    def snapshot(self, t: float) -> SceneSnapshot:
        return build_snapshot(self.posed_meshes(t))


def scene_from_parts(
    environment: TriMesh,
    assets: list = (),
    manifest_ref: str = "",
    floor_z: float = 0.0,
) -> SceneBundle:
    """Build a bundle directly from in-memory meshes and (pose, track) pairs."""
    return SceneBundle(environment, list(assets), manifest_ref, floor_z)


def load_scene(manifest_path: str | Path) -> SceneBundle:
    """Load the environment and all placed asset tracks a manifest names.

    Relative file paths in the manifest resolve against the manifest's
    own directory. Assets that failed placement are skipped.
    """
    manifest_path = Path(manifest_path)
    manifest: SceneManifest = load_manifest(manifest_path)
    base = manifest_path.parent

    def resolve(ref: str) -> Path:
        p = Path(ref)
        return p if p.is_absolute() else base / p

    environment = load_mesh(
        resolve(manifest.environment), semantic_label="environment"
    )
    assets = []
    for entry in manifest.active_assets():
        track = _load_entry_track(entry, resolve(entry.track_file))
        assets.append((entry.world_pose, track))
    return SceneBundle(
        environment=environment,
        assets=assets,
        manifest_ref=str(manifest_path),
        floor_z=manifest.floor_z,
    )


def _load_entry_track(entry: ManifestAsset, path: Path) -> AnimationTrack:
    track = load_track(path)
    if track.instance_id != entry.instance_id:
        raise ValueError(
            f"track {path} has instance id {track.instance_id}, "
            f"manifest says {entry.instance_id}"
        )
    return track
