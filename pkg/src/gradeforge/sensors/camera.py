"""Pinhole camera model and ray-cast depth/instance rendering.

The camera uses the optical frame convention: x right, y down, z forward.
Depth is the distance along the optical axis (z-depth), not the Euclidean
ray length, so a flat wall perpendicular to the axis reads the same value
at every pixel. Rays go through pixel centers; pixel (u, v) covers the
continuous square [u, u+1) x [v, v+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry.bvh import Bvh, build_bvh, ray_nearest_hits
from ..geometry.mesh import TriMesh
from ..geometry.pose import Pose

#: Horizontal field of view shared by the default camera pair, degrees.
DEFAULT_HFOV_DEG = 90.0
#: Vertical field of view of the default pair; the 4:3 low-res camera has
#: square pixels, the 16:9 one keeps the same angular extent instead.
DEFAULT_VFOV_DEG = math.degrees(2.0 * math.atan(0.75))

#: Rotation taking camera-frame vectors into the body frame so the optical
#: axis (+z camera) points along body +x, with +x camera toward body -y.
FORWARD_MOUNT = Pose.from_matrix(
    np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
)


@dataclass
class CameraIntrinsics:
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    max_range: float = math.inf
    name: str = "camera"

    def validate(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if not (self.fx > 0.0 and self.fy > 0.0):
            raise ValueError("focal lengths must be positive")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be positive")

    @staticmethod
    def from_fov(
        width: int,
        height: int,
        hfov_deg: float = DEFAULT_HFOV_DEG,
        vfov_deg: float = DEFAULT_VFOV_DEG,
        max_range: float = math.inf,
        name: str = "camera",
    ) -> "CameraIntrinsics":
        fx = width / (2.0 * math.tan(math.radians(hfov_deg) / 2.0))
        fy = height / (2.0 * math.tan(math.radians(vfov_deg) / 2.0))
        return CameraIntrinsics(
            width=width,
            height=height,
            fx=fx,
            fy=fy,
            cx=width / 2.0,
            cy=height / 2.0,
            max_range=max_range,
            name=name,
        )


def default_camera_pair() -> tuple[CameraIntrinsics, CameraIntrinsics]:
    """Low/high resolution cameras with identical horizontal and vertical FOV."""
    low = CameraIntrinsics.from_fov(640, 480, name="low")
    high = CameraIntrinsics.from_fov(1920, 1080, name="high")
    return low, high


@dataclass
class DepthImage:
    """Z-depth in meters, float32; 0 marks pixels with no return."""

    data: np.ndarray
    max_range: float = math.inf

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float32)

    def validate(self) -> None:
        if self.data.ndim != 2:
            raise ValueError("depth image must be 2-D")
        bad = (self.data < 0.0) | (
            (self.data > self.max_range) & np.isfinite(self.data)
        )
        if bad.any():
            raise ValueError("depth values must be 0 or in (0, max_range]")

    def valid_mask(self) -> np.ndarray:
        return self.data > 0.0


@dataclass
class InstanceImage:
    """Per-pixel instance id, uint32; 0 is background."""

    data: np.ndarray

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.uint32)


@dataclass
class SceneSnapshot:
    """World geometry at one instant, flattened for ray queries."""

    vertices: np.ndarray
    triangles: np.ndarray
    tri_instance: np.ndarray
    vertex_slices: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    bvh: Bvh | None = None

    def instance_ids(self) -> list[int]:
        return sorted(self.vertex_slices)

    def instance_vertices(self, instance_id: int) -> np.ndarray:
        lo, hi = self.vertex_slices[instance_id]
        return self.vertices[lo:hi]

    def build_bvh(self) -> Bvh:
        if self.bvh is None:
            self.bvh = build_bvh(TriMesh(self.vertices, self.triangles))
        return self.bvh


def build_snapshot(meshes: list[TriMesh]) -> SceneSnapshot:
    """Flatten posed meshes into one queryable snapshot.

    Every mesh must carry a unique nonzero instance id; id 0 is reserved
    for the background so that a hit can never be confused with a miss.
    """
    verts = []
    tris = []
    tri_inst = []
    slices = {}
    labels = {}
    offset = 0
    for mesh in meshes:
        if mesh.instance_id == 0:
            raise ValueError("snapshot meshes need a nonzero instance id")
        if mesh.instance_id in slices:
            raise ValueError(f"duplicate instance id {mesh.instance_id}")
        verts.append(mesh.vertices)
        tris.append(mesh.triangles + offset)
        tri_inst.append(
            np.full(len(mesh.triangles), mesh.instance_id, dtype=np.uint32)
        )
        slices[mesh.instance_id] = (offset, offset + len(mesh.vertices))
        labels[mesh.instance_id] = mesh.semantic_label
        offset += len(mesh.vertices)
    if not verts:
        return SceneSnapshot(
            vertices=np.zeros((0, 3)),
            triangles=np.zeros((0, 3), dtype=np.int64),
            tri_instance=np.zeros(0, dtype=np.uint32),
        )
    return SceneSnapshot(
        vertices=np.concatenate(verts),
        triangles=np.concatenate(tris),
        tri_instance=np.concatenate(tri_inst),
        vertex_slices=slices,
        labels=labels,
    )


def _pixel_directions(
    intrinsics: CameraIntrinsics, rows: np.ndarray | None = None
) -> np.ndarray:
    """Camera-frame ray directions with unit z, one per pixel, row major."""
    if rows is None:
        rows = np.arange(intrinsics.height)
    u = (np.arange(intrinsics.width) + 0.5 - intrinsics.cx) / intrinsics.fx
    v = (np.asarray(rows) + 0.5 - intrinsics.cy) / intrinsics.fy
    vv, uu = np.meshgrid(v, u, indexing="ij")
    return np.stack([uu, vv, np.ones_like(uu)], axis=-1).reshape(-1, 3)


def raycast_camera(
    snapshot: SceneSnapshot,
    world_from_camera: Pose,
    intrinsics: CameraIntrinsics,
    rows: np.ndarray | None = None,
) -> tuple[DepthImage, InstanceImage]:
    """Render depth and instance ids by casting one ray per pixel center.

    Directions have unit z in the camera frame, so the ray parameter of
    the nearest hit is the z-depth directly. Pixels whose nearest hit
    lies beyond ``max_range`` read 0 / background.
    """
    intrinsics.validate()
    n_rows = intrinsics.height if rows is None else len(np.asarray(rows))
    shape = (n_rows, intrinsics.width)
    if len(snapshot.triangles) == 0:
        return (
            DepthImage(np.zeros(shape, dtype=np.float32), intrinsics.max_range),
            InstanceImage(np.zeros(shape, dtype=np.uint32)),
        )
    bvh = snapshot.build_bvh()
    dirs_cam = _pixel_directions(intrinsics, rows)
    rot = world_from_camera.rotation()
    dirs_world = dirs_cam @ rot.T
    origins = np.broadcast_to(world_from_camera.position, dirs_world.shape)
    t, tri = ray_nearest_hits(
        bvh, origins, dirs_world, t_min=1e-9, t_max=intrinsics.max_range
    )
    hit = tri >= 0
    depth = np.where(hit, t, 0.0).astype(np.float32).reshape(shape)
    inst = np.zeros(len(tri), dtype=np.uint32)
    inst[hit] = snapshot.tri_instance[tri[hit]]
    return DepthImage(depth, intrinsics.max_range), InstanceImage(inst.reshape(shape))


def best_view_yaw(
    snapshot: SceneSnapshot,
    position: np.ndarray,
    max_range: float = 3.5,
    n_samples: int = 36,
    probe: CameraIntrinsics | None = None,
    mount: Pose = FORWARD_MOUNT,
) -> float:
    """Yaw whose forward camera view has the most in-range structure.

    Scores each of ``n_samples`` evenly spaced yaw angles with the mean of
    hit-distance / range over a coarse pixel grid (misses and beyond-range
    hits score zero) and returns the arg max, smallest yaw on ties.
    """
    if probe is None:
        probe = CameraIntrinsics.from_fov(16, 12, max_range=max_range, name="probe")
    position = np.asarray(position, dtype=float).reshape(3)
    bvh = snapshot.build_bvh()
    dirs_cam = _pixel_directions(probe)
    best = (-1.0, 0.0)
    for k in range(n_samples):
        yaw = 2.0 * math.pi * k / n_samples
        body = Pose.from_xyz_rpy(*position, yaw=yaw)
        cam = body.compose(mount)
        dirs_world = dirs_cam @ cam.rotation().T
        origins = np.broadcast_to(cam.position, dirs_world.shape)
        t, tri = ray_nearest_hits(
            bvh, origins, dirs_world, t_min=1e-9, t_max=probe.max_range
        )
        score = float(np.where(tri >= 0, t / probe.max_range, 0.0).mean())
        if score > best[0] + 1e-12:
            best = (score, yaw)
    return best[1]
