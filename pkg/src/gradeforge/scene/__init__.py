from .tracks import AnimationTrack, load_track, save_track, swept_volume
from .placement import (
    ComposeSpec,
    PlacedAsset,
    PlacementConfig,
    place_humans,
    sample_human_count,
    spawn_flying_objects,
)
from .manifest import (
    ManifestAsset,
    SceneManifest,
    load_manifest,
    manifest_from_placement,
    save_manifest,
)
from .proxies import demo_room, flying_object_mesh, plant_mesh, walking_human_track

__all__ = [
    "AnimationTrack",
    "load_track",
    "save_track",
    "swept_volume",
    "ComposeSpec",
    "PlacedAsset",
    "PlacementConfig",
    "place_humans",
    "sample_human_count",
    "spawn_flying_objects",
    "ManifestAsset",
    "SceneManifest",
    "load_manifest",
    "manifest_from_placement",
    "save_manifest",
    "demo_room",
    "flying_object_mesh",
    "plant_mesh",
    "walking_human_track",
]
