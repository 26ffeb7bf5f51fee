"""Shared mesh builders for tests."""

from __future__ import annotations

import numpy as np
import pytest

from gradeforge.geometry.mesh import TriMesh, box_mesh


def outline_wall_mesh(
    outline: np.ndarray, z0: float = 0.0, z1: float = 2.5, floor: bool = False, mid_z: float | None = 1.0
) -> TriMesh:
    """Zero-thickness vertical wall quads along a closed 2D outline.

    Walls get a vertex row at ``mid_z`` so horizontal slab queries at
    interior heights find geometry, as tessellated scans would.
    """
    outline = np.asarray(outline, dtype=float)
    rows = [z0, z1] if mid_z is None or not z0 < mid_z < z1 else [z0, mid_z, z1]
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    n = len(outline)
    for i in range(n):
        a = outline[i]
        b = outline[(i + 1) % n]
        for za, zb in zip(rows[:-1], rows[1:]):
            base = len(verts)
            verts += [[a[0], a[1], za], [b[0], b[1], za], [b[0], b[1], zb], [a[0], a[1], zb]]
            faces += [[base, base + 1, base + 2], [base, base + 2, base + 3]]
    if floor:
        base = len(verts)
        lo = outline.min(axis=0)
        hi = outline.max(axis=0)
        verts += [[lo[0], lo[1], z0], [hi[0], lo[1], z0], [hi[0], hi[1], z0], [lo[0], hi[1], z0]]
        faces += [[base, base + 1, base + 2], [base, base + 2, base + 3]]
    return TriMesh(np.asarray(verts), np.asarray(faces), semantic_label="environment")


def thick_wall_room(
    size_x: float = 10.0,
    size_y: float = 10.0,
    height: float = 2.0,
    thickness: float = 0.2,
    floor: bool = True,
) -> TriMesh:
    """Room whose walls are boxes centered on the outline, split at z = 1."""
    zs = [0.0, min(1.0, height), height] if height > 1.0 else [0.0, height]
    parts = []
    for za, zb in zip(zs[:-1], zs[1:]):
        zc = 0.5 * (za + zb)
        h = zb - za
        parts += [
            box_mesh((size_x + thickness, thickness, h), (size_x / 2.0, 0.0, zc)),
            box_mesh((size_x + thickness, thickness, h), (size_x / 2.0, size_y, zc)),
            box_mesh((thickness, size_y - thickness, h), (0.0, size_y / 2.0, zc)),
            box_mesh((thickness, size_y - thickness, h), (size_x, size_y / 2.0, zc)),
        ]
    if floor:
        parts.append(box_mesh((size_x + thickness, size_y + thickness, 0.05), (size_x / 2.0, size_y / 2.0, -0.025)))
    return TriMesh.concatenate(parts, semantic_label="environment")


def random_soup(rng: np.random.Generator, n_tris: int, scale: float = 2.0, offset=(0.0, 0.0, 0.0)) -> TriMesh:
    verts = rng.uniform(-scale, scale, size=(max(4, n_tris // 2 + 3), 3)) + np.asarray(offset)
    faces = rng.integers(0, len(verts), size=(n_tris, 3))
    return TriMesh(verts, faces)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
