"""Collision-aware scene composition.

Humans are placed one after another: sample a candidate ground pose,
sweep the whole animation trace, and accept only when the contact count
against the environment and every already-placed trace stays within the
threshold.  Flying objects skip collision checks entirely and get
random piecewise-linear motion through the room's bounding prism.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..geometry.bvh import Bvh, build_bvh, contact_count
from ..geometry.footprint import FootprintPolygon, polygon_contains
from ..geometry.mesh import TriMesh
from ..geometry.pose import Pose, quat_from_euler
from .tracks import AnimationTrack, swept_volume

log = logging.getLogger(__name__)

DEFAULT_CONTACT_THRESHOLD = 200
DEFAULT_MAX_ATTEMPTS = 100

PROFILE_OBJECT_COUNTS = {
    "N": (0, 0),
    "HN": (0, 0),
    "F": (5, 5),
    "HF": (5, 5),
    "L": (10, 10),
    "HL": (10, 10),
}


@dataclass
class PlacementConfig:
    contact_threshold: int = DEFAULT_CONTACT_THRESHOLD
    max_attempts_per_asset: int = DEFAULT_MAX_ATTEMPTS
    rng_seed: int = 0
    yaw_randomization: bool = True

    def validate(self) -> None:
        if self.contact_threshold < 0:
            raise ValueError("contact_threshold must be >= 0")
        if self.max_attempts_per_asset < 1:
            raise ValueError("max_attempts_per_asset must be >= 1")


@dataclass
class ComposeSpec:
    profile: str = "N"
    n_humans_range: tuple[int, int] = (7, 40)
    n_gso_objects: int | None = None
    n_shapenet_objects: int | None = None

    def __post_init__(self) -> None:
        if self.profile not in PROFILE_OBJECT_COUNTS:
            raise ValueError(f"unknown profile {self.profile!r}")
        gso, shapenet = PROFILE_OBJECT_COUNTS[self.profile]
        if self.n_gso_objects is None:
            self.n_gso_objects = gso
        if self.n_shapenet_objects is None:
            self.n_shapenet_objects = shapenet
        lo, hi = self.n_humans_range
        if lo > hi or lo < 0:
            raise ValueError("invalid n_humans_range")


@dataclass
class PlacedAsset:
    track: AnimationTrack
    world_pose: Pose
    placed: bool
    attempts: int = 0


def sample_human_count(spec: ComposeSpec, rng_seed: int) -> int:
    """Uniform integer in the inclusive configured range."""
    lo, hi = spec.n_humans_range
    rng = np.random.default_rng(rng_seed)
    return int(rng.integers(lo, hi + 1))


def _polygon_area(polygon: np.ndarray) -> float:
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _sample_in_polygon(rng: np.random.Generator, footprint: FootprintPolygon) -> np.ndarray:
    min_x, min_y, max_x, max_y = footprint.circumscribed_rect
    for _ in range(10000):
        p = rng.uniform((min_x, min_y), (max_x, max_y))
        if polygon_contains(footprint.polygon, p)[0]:
            return p
    raise RuntimeError("rejection sampling failed; footprint polygon may be degenerate")


def place_humans(
    env: TriMesh,
    footprint: FootprintPolygon,
    tracks: list[AnimationTrack],
    cfg: PlacementConfig,
    floor_z: float | None = None,
) -> list[PlacedAsset]:
    """Sequential seeded placement of animation traces.

    Candidates are uniform (x, y) inside the footprint with uniform yaw
    (when enabled); z is pinned to the floor height.  A candidate is
    accepted when its swept volume stays within the contact threshold
    against the environment and all previously accepted traces.
    Assets that exhaust their attempts come back with placed=False.
    """
    cfg.validate()
    env.validate()
    if len(footprint.polygon) < 3 or abs(_polygon_area(footprint.polygon)) <= 0.0:
        raise ValueError("empty footprint")
    if floor_z is None:
        floor_z = float(env.vertices[:, 2].min())

    rng = np.random.default_rng(cfg.rng_seed)
    env_bvh = build_bvh(env)
    placed_bvhs: list[Bvh] = []
    out: list[PlacedAsset] = []

    for track in tracks:
        track.validate()
        swept = swept_volume(track)
        chosen: Pose | None = None
        attempts = 0
        for attempts in range(1, cfg.max_attempts_per_asset + 1):
            xy = _sample_in_polygon(rng, footprint)
            yaw = float(rng.uniform(0.0, 2.0 * np.pi)) if cfg.yaw_randomization else 0.0
            pose = Pose(
                np.array([xy[0], xy[1], floor_z]),
                quat_from_euler(0.0, 0.0, yaw),
            )
            cand = swept.transformed(pose)
            cand_bvh = build_bvh(cand)
            if contact_count(cand_bvh, env_bvh) > cfg.contact_threshold:
                continue
            if any(contact_count(cand_bvh, pb) > cfg.contact_threshold for pb in placed_bvhs):
                continue
            chosen = pose
            placed_bvhs.append(cand_bvh)
            break
        if chosen is None:
            log.info("asset %s unplaceable after %d attempts", track.name, attempts)
            out.append(PlacedAsset(track, Pose.identity(), False, attempts))
        else:
            out.append(PlacedAsset(track, chosen, True, attempts))
    return out


def spawn_flying_objects(
    spec: ComposeSpec,
    footprint: FootprintPolygon,
    rng_seed: int,
    mesh_factory=None,
    z_range: tuple[float, float] = (0.3, 2.0),
    n_waypoints: int = 5,
    speed_range: tuple[float, float] = (0.5, 2.0),
    first_instance_id: int = 1000,
) -> list[PlacedAsset]:
    """Rigid tracks bouncing through the footprint's bounding prism.

    No collision checks by design.  ``mesh_factory(rng, instance_id,
    family)`` supplies geometry; the default builds small primitive
    proxies.
    """
    if mesh_factory is None:
        from .proxies import flying_object_mesh

        mesh_factory = flying_object_mesh
    min_x, min_y, max_x, max_y = footprint.circumscribed_rect
    rng = np.random.default_rng(rng_seed)
    out: list[PlacedAsset] = []
    families = ["gso"] * spec.n_gso_objects + ["shapenet"] * spec.n_shapenet_objects
    for i, family in enumerate(families):
        instance_id = first_instance_id + i
        mesh = mesh_factory(rng, instance_id, family)
        pts = rng.uniform(
            (min_x, min_y, z_range[0]), (max_x, max_y, z_range[1]), size=(n_waypoints, 3)
        )
        quats = [quat_from_euler(*rng.uniform(0.0, 2.0 * np.pi, 3)) for _ in range(n_waypoints)]
        speeds = rng.uniform(speed_range[0], speed_range[1], size=n_waypoints - 1)
        times = [0.0]
        for k in range(n_waypoints - 1):
            dist = float(np.linalg.norm(pts[k + 1] - pts[k]))
            times.append(times[-1] + max(dist / speeds[k], 1e-3))
        poses = [Pose(p, q) for p, q in zip(pts, quats)]
        track = AnimationTrack(
            np.asarray(times), base_mesh=mesh, poses=poses, name=f"{family}_{i:02d}"
        )
        out.append(PlacedAsset(track, Pose.identity(), True, 1))
    return out
