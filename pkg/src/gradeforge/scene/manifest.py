"""Scene manifest: the composed-scene record handed to the simulator.

A manifest lists the environment source, every asset's track file and
world pose, the placement settings, and the seeds that produced it, so
a run can be reproduced or replayed from this file alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..geometry.pose import Pose
from .placement import PlacedAsset, PlacementConfig

MANIFEST_VERSION = 1


@dataclass
class ManifestAsset:
    name: str
    track_file: str
    instance_id: int
    semantic_label: str
    placed: bool
    world_pose: Pose
    attempts: int = 0


@dataclass
class SceneManifest:
    environment: str
    seed: int
    profile: str
    placement: PlacementConfig
    assets: list[ManifestAsset] = field(default_factory=list)
    floor_z: float = 0.0

    def active_assets(self) -> list[ManifestAsset]:
        """Assets that survived placement; rejected ones never reach the sim."""
        return [a for a in self.assets if a.placed]


def manifest_from_placement(
    environment: str,
    seed: int,
    profile: str,
    placement: PlacementConfig,
    assets: list[tuple[PlacedAsset, str]],
    floor_z: float = 0.0,
) -> SceneManifest:
    entries = [
        ManifestAsset(
            name=pa.track.name,
            track_file=track_file,
            instance_id=pa.track.instance_id,
            semantic_label=pa.track.semantic_label,
            placed=pa.placed,
            world_pose=pa.world_pose,
            attempts=pa.attempts,
        )
        for pa, track_file in assets
    ]
    return SceneManifest(environment, seed, profile, placement, entries, floor_z)


def save_manifest(path: str | Path, manifest: SceneManifest) -> None:
    doc = {
        "manifest_version": MANIFEST_VERSION,
        "environment": manifest.environment,
        "seed": int(manifest.seed),
        "profile": manifest.profile,
        "floor_z": float(manifest.floor_z),
        "placement": {
            "contact_threshold": int(manifest.placement.contact_threshold),
            "max_attempts_per_asset": int(manifest.placement.max_attempts_per_asset),
            "rng_seed": int(manifest.placement.rng_seed),
            "yaw_randomization": bool(manifest.placement.yaw_randomization),
        },
        "assets": [
            {
                "name": a.name,
                "track_file": a.track_file,
                "instance_id": int(a.instance_id),
                "semantic_label": a.semantic_label,
                "placed": bool(a.placed),
                "attempts": int(a.attempts),
                "world_pose": {
                    "position": [float(v) for v in a.world_pose.position],
                    "quaternion_xyzw": [float(v) for v in a.world_pose.quaternion],
                },
            }
            for a in manifest.assets
        ],
    }
    with open(path, "w") as f:
        yaml.safe_dump(doc, f, sort_keys=True)


def load_manifest(path: str | Path) -> SceneManifest:
    with open(path) as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict) or doc.get("manifest_version") != MANIFEST_VERSION:
        raise ValueError("unsupported or missing manifest_version")
    placement = PlacementConfig(
        contact_threshold=int(doc["placement"]["contact_threshold"]),
        max_attempts_per_asset=int(doc["placement"]["max_attempts_per_asset"]),
        rng_seed=int(doc["placement"]["rng_seed"]),
        yaw_randomization=bool(doc["placement"]["yaw_randomization"]),
    )
    assets = [
        ManifestAsset(
            name=a["name"],
            track_file=a["track_file"],
            instance_id=int(a["instance_id"]),
            semantic_label=a["semantic_label"],
            placed=bool(a["placed"]),
            attempts=int(a.get("attempts", 0)),
            world_pose=Pose(
                np.asarray(a["world_pose"]["position"], dtype=float),
                np.asarray(a["world_pose"]["quaternion_xyzw"], dtype=float),
            ),
        )
        for a in doc.get("assets", [])
    ]
    return SceneManifest(
        environment=doc["environment"],
        seed=int(doc["seed"]),
        profile=doc["profile"],
        placement=placement,
        assets=assets,
        floor_z=float(doc.get("floor_z", 0.0)),
    )
