"""Procedural stand-in assets and rooms.

External datasets are out of scope, so walking humans, flying objects,
and demo environments are generated from primitives.  Every builder is
deterministic under its seed and keeps triangle counts small enough for
exhaustive collision oracles.
"""

from __future__ import annotations

import numpy as np

from ..geometry.mesh import TriMesh, box_mesh, cylinder_mesh, ellipsoid_mesh, sphere_mesh
from ..geometry.pose import Pose, quat_from_euler
from .tracks import AnimationTrack

# feet float a hair above z=0 so standing on the floor plane is contact-free
FOOT_CLEARANCE = 1e-3


def walking_human_track(
    rng: np.random.Generator,
    instance_id: int,
    n_keyframes: int = 12,
    name: str = "human",
) -> AnimationTrack:
    """Deforming ellipsoid-and-head proxy that walks a short arc.

    The body bobs and sways with the gait while translating along a
    gently curving path; the full vertex trace is what placement sweeps.
    """
    duration = float(rng.uniform(3.0, 6.0))
    speed = float(rng.uniform(0.4, 1.0))
    bob_hz = float(rng.uniform(1.4, 2.2))
    sway = float(rng.uniform(0.02, 0.06))
    turn = float(rng.uniform(-0.5, 0.5))  # rad of heading change over the walk
    height = float(rng.uniform(1.5, 1.9))
    body = ellipsoid_mesh((0.18, 0.14, 0.42 * height), rings=6, segments=8, center=(0.0, 0.0, 0.45 * height))
    head = sphere_mesh(0.09, rings=4, segments=6, center=(0.0, 0.0, 0.93 * height))
    base = TriMesh.concatenate([body, head], instance_id, "human")
    base = base.translated([0.0, 0.0, FOOT_CLEARANCE])

    times = np.linspace(0.0, duration, n_keyframes)
    frames = []
    for t in times:
        heading = turn * t / duration
        along = speed * t
        offset = np.array(
            [
                along * np.cos(heading),
                along * np.sin(heading) + sway * np.sin(2.0 * np.pi * bob_hz * t),
                0.015 * np.abs(np.sin(np.pi * bob_hz * t)),
            ]
        )
        lean = 0.05 * np.sin(2.0 * np.pi * bob_hz * t)
        verts = base.vertices.copy()
        # small roll-axis sway scaled by height above the feet
        verts[:, 1] += lean * verts[:, 2] / height
        frames.append(TriMesh(verts + offset, base.triangles, instance_id, "human"))
    rate = (n_keyframes - 1) / duration if duration > 0 else 0.0
    return AnimationTrack(times, frames=frames, frame_rate=rate, name=name)


def flying_object_mesh(rng: np.random.Generator, instance_id: int, family: str) -> TriMesh:
    """Small rigid object proxy; families give distinct shape mixes."""
    kind = rng.integers(0, 3)
    scale = float(rng.uniform(0.08, 0.22))
    if family == "gso":
        if kind == 0:
            mesh = sphere_mesh(scale, rings=5, segments=8)
        elif kind == 1:
            mesh = cylinder_mesh(scale * 0.6, scale * 2.0, segments=10)
        else:
            mesh = ellipsoid_mesh((scale, scale * 0.7, scale * 1.3), rings=5, segments=8)
    else:
        if kind == 0:
            mesh = box_mesh((scale, scale * 1.4, scale * 0.8))
        elif kind == 1:
            mesh = box_mesh((scale * 2.0, scale * 0.5, scale * 0.5))
        else:
            mesh = cylinder_mesh(scale * 0.5, scale * 1.6, segments=8)
    return TriMesh(mesh.vertices, mesh.triangles, instance_id, "flying_object")


def plant_mesh(instance_id: int, center=(0.0, 0.0, 0.0), n_leaves: int = 24, height: float = 0.9) -> TriMesh:
    """Thin crossed leaf quads: high contact-count surface per unit volume."""
    verts: list[np.ndarray] = []
    faces: list[list[int]] = []
    for i in range(n_leaves):
        ang = 2.0 * np.pi * i / n_leaves
        z0 = 0.05 + 0.8 * height * (i % 5) / 5.0
        d = np.array([np.cos(ang), np.sin(ang), 0.0])
        up = np.array([0.0, 0.0, 1.0])
        tip = d * 0.35 + up * 0.25
        base = len(verts)
        verts += [
            np.array([0.0, 0.0, z0]),
            d * 0.18 + np.array([0.0, 0.0, z0 + 0.02]),
            tip + np.array([0.0, 0.0, z0]),
            d * 0.1 + up * 0.12 + np.array([0.0, 0.0, z0]),
        ]
        faces += [[base, base + 1, base + 2], [base, base + 2, base + 3]]
    mesh = TriMesh(np.asarray(verts) + np.asarray(center, dtype=float), np.asarray(faces), instance_id, "other")
    return mesh


def demo_room(
    size_x: float = 8.0,
    size_y: float = 6.0,
    height: float = 2.5,
    thickness: float = 0.15,
    furniture_seed: int | None = None,
    instance_id: int = 0,
) -> TriMesh:
    """Closed room with a floor plate and optional boxy furniture."""
    # band edge at 1 m keeps wall vertices inside the default footprint slab
    zs = [0.0, 1.0, height] if height > 1.0 else [0.0, height]
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
    parts.append(box_mesh((size_x + thickness, size_y + thickness, 0.04), (size_x / 2.0, size_y / 2.0, -0.02)))
    if furniture_seed is not None:
        rng = np.random.default_rng(furniture_seed)
        for _ in range(int(rng.integers(2, 5))):
            w, d, h = rng.uniform(0.4, 1.2, 3)
            h = min(h, 1.1)
            x = rng.uniform(0.8 + w / 2, size_x - 0.8 - w / 2)
            y = rng.uniform(0.8 + d / 2, size_y - 0.8 - d / 2)
            parts.append(box_mesh((w, d, h), (x, y, h / 2.0)))
    return TriMesh.concatenate(parts, instance_id, "environment")
