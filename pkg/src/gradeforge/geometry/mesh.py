"""Triangle-mesh container and procedural primitives."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .pose import Pose

SEMANTIC_LABELS = ("human", "flying_object", "environment", "robot", "other")


@dataclass
class TriMesh:
    """Indexed triangle soup with an instance id and a semantic label.

    Vertices are float64 meters, triangles are int index triples.  The
    container is treated as immutable after construction; transforms
    return new instances.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    instance_id: int = 0
    semantic_label: str = "other"

    def __post_init__(self) -> None:
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)

    def validate(self, require_triangles: bool = True) -> None:
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("mesh has non-finite coordinates")
        if require_triangles and len(self.triangles) == 0:
            raise ValueError("empty geometry")
        if len(self.triangles) and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of range")
        if self.instance_id < 0:
            raise ValueError("instance_id must be >= 0")
        if self.semantic_label not in SEMANTIC_LABELS:
            raise ValueError(f"unknown semantic_label {self.semantic_label!r}")

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def triangle_corners(self) -> np.ndarray:
        """Return (F, 3, 3) corner coordinates."""
        return self.vertices[self.triangles]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def transformed(self, pose: Pose) -> "TriMesh":
        return replace(self, vertices=pose.transform_points(self.vertices))

    def translated(self, offset: np.ndarray) -> "TriMesh":
        return replace(self, vertices=self.vertices + np.asarray(offset, dtype=float))

    def with_instance(self, instance_id: int, semantic_label: str | None = None) -> "TriMesh":
        return replace(
            self,
            instance_id=instance_id,
            semantic_label=self.semantic_label if semantic_label is None else semantic_label,
        )

    @staticmethod
    def concatenate(meshes: "list[TriMesh]", instance_id: int = 0, semantic_label: str = "other") -> "TriMesh":
        if not meshes:
            raise ValueError("empty geometry")
        verts = []
        tris = []
        offset = 0
        for m in meshes:
            verts.append(m.vertices)
            tris.append(m.triangles + offset)
            offset += len(m.vertices)
        return TriMesh(np.concatenate(verts), np.concatenate(tris), instance_id, semantic_label)


def box_mesh(size: tuple[float, float, float] = (1.0, 1.0, 1.0), center: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> TriMesh:
    """Axis-aligned box as 12 triangles with outward winding."""
    sx, sy, sz = (s / 2.0 for s in size)
    cx, cy, cz = center
    v = np.array(
        [
            [-sx, -sy, -sz], [sx, -sy, -sz], [sx, sy, -sz], [-sx, sy, -sz],
            [-sx, -sy, sz], [sx, -sy, sz], [sx, sy, sz], [-sx, sy, sz],
        ]
    ) + np.array([cx, cy, cz])
    f = np.array(
        [
            [0, 2, 1], [0, 3, 2],      # bottom
            [4, 5, 6], [4, 6, 7],      # top
            [0, 1, 5], [0, 5, 4],      # -y
            [2, 3, 7], [2, 7, 6],      # +y
            [1, 2, 6], [1, 6, 5],      # +x
            [3, 0, 4], [3, 4, 7],      # -x
        ]
    )
    return TriMesh(v, f)


def cylinder_mesh(radius: float = 0.5, height: float = 1.0, segments: int = 16, center: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> TriMesh:
    """Closed cylinder along z."""
    ang = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    ring = np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)
    lo = np.column_stack([ring, np.full(segments, -height / 2.0)])
    hi = np.column_stack([ring, np.full(segments, height / 2.0)])
    v = np.concatenate([lo, hi, [[0.0, 0.0, -height / 2.0]], [[0.0, 0.0, height / 2.0]]])
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        faces.append([i, j, segments + j])
        faces.append([i, segments + j, segments + i])
        faces.append([2 * segments, j, i])
        faces.append([2 * segments + 1, segments + i, segments + j])
    return TriMesh(v + np.asarray(center, dtype=float), np.array(faces))


def sphere_mesh(radius: float = 0.5, rings: int = 8, segments: int = 12, center: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> TriMesh:
    """UV sphere; rings counts latitude bands so the pole caps stay triangles."""
    verts = [[0.0, 0.0, radius]]
    for r in range(1, rings):
        phi = np.pi * r / rings
        for s in range(segments):
            theta = 2.0 * np.pi * s / segments
            verts.append(
                [
                    radius * np.sin(phi) * np.cos(theta),
                    radius * np.sin(phi) * np.sin(theta),
                    radius * np.cos(phi),
                ]
            )
    verts.append([0.0, 0.0, -radius])
    south = len(verts) - 1
    faces = []
    for s in range(segments):
        faces.append([0, 1 + s, 1 + (s + 1) % segments])
    for r in range(rings - 2):
        base0 = 1 + r * segments
        base1 = base0 + segments
        for s in range(segments):
            s1 = (s + 1) % segments
            faces.append([base0 + s, base1 + s, base1 + s1])
            faces.append([base0 + s, base1 + s1, base0 + s1])
    base = 1 + (rings - 2) * segments
    for s in range(segments):
        faces.append([south, base + (s + 1) % segments, base + s])
    return TriMesh(np.asarray(verts) + np.asarray(center, dtype=float), np.array(faces))


def ellipsoid_mesh(radii: tuple[float, float, float], rings: int = 8, segments: int = 12, center: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> TriMesh:
    base = sphere_mesh(1.0, rings, segments)
    v = base.vertices * np.asarray(radii, dtype=float)
    return TriMesh(v + np.asarray(center, dtype=float), base.triangles)
