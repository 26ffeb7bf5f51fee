"""Animation tracks: deforming vertex sequences or rigid pose sequences.

A deforming track stores one vertex array per keyframe over a shared
triangle topology.  A rigid track stores one pose per keyframe applied
to a base mesh.  Both support linear sampling at arbitrary times and a
swept-volume union used by collision-aware placement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geometry.mesh import TriMesh
from ..geometry.pose import Pose


@dataclass
class AnimationTrack:
    """Keyframed asset animation.

    ``times`` must increase strictly from 0.  Exactly one of ``frames``
    (deforming) or ``poses`` (rigid, with ``base_mesh``) is set.
    ``frame_rate`` is informational for resampled clips; tracks built
    from waypoints leave it at 0.
    """

    times: np.ndarray
    base_mesh: TriMesh | None = None
    poses: list[Pose] | None = None
    frames: list[TriMesh] | None = None
    frame_rate: float = 0.0
    name: str = "asset"

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float).reshape(-1)

    def validate(self) -> None:
        if len(self.times) == 0:
            raise ValueError("track has no keyframes")
        if self.times[0] != 0.0:
            raise ValueError("keyframe times must start at 0")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("keyframe times must be strictly increasing")
        if (self.frames is None) == (self.poses is None):
            raise ValueError("track must be either deforming (frames) or rigid (poses)")
        if self.frames is not None:
            if len(self.frames) != len(self.times):
                raise ValueError("frame count does not match keyframe times")
            first = self.frames[0]
            for f in self.frames:
                if len(f.vertices) != len(first.vertices) or len(f.triangles) != len(first.triangles):
                    raise ValueError("deforming keyframes must share vertex/triangle counts")
        else:
            if self.base_mesh is None:
                raise ValueError("rigid track needs a base_mesh")
            if len(self.poses) != len(self.times):
                raise ValueError("pose count does not match keyframe times")

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def instance_id(self) -> int:
        return (self.frames[0] if self.frames is not None else self.base_mesh).instance_id

    @property
    def semantic_label(self) -> str:
        return (self.frames[0] if self.frames is not None else self.base_mesh).semantic_label

    def keyframe_mesh(self, k: int) -> TriMesh:
        if self.frames is not None:
            return self.frames[k]
        return self.base_mesh.transformed(self.poses[k])

    def _bracket(self, t: float) -> tuple[int, int, float]:
        t = min(max(t, 0.0), self.duration)
        if len(self.times) == 1:
            return 0, 0, 0.0
        hi = int(np.searchsorted(self.times, t, side="right"))
        hi = min(max(hi, 1), len(self.times) - 1)
        lo = hi - 1
        span = self.times[hi] - self.times[lo]
        u = 0.0 if span <= 0 else (t - self.times[lo]) / span
        return lo, hi, float(u)

    def sample(self, t: float) -> TriMesh:
        """Mesh at time t, clamped to the keyframe range, linearly blended."""
        lo, hi, u = self._bracket(t)
        if self.frames is not None:
            a = self.frames[lo]
            if u == 0.0 or lo == hi:
                return a
            b = self.frames[hi]
            verts = (1.0 - u) * a.vertices + u * b.vertices
            return TriMesh(verts, a.triangles, a.instance_id, a.semantic_label)
        pose = self.poses[lo] if u == 0.0 or lo == hi else self.poses[lo].interpolate(self.poses[hi], u)
        return self.base_mesh.transformed(pose)

    def sample_pose(self, t: float) -> Pose:
        """Rigid pose at time t; deforming tracks report identity."""
        if self.poses is None:
            return Pose.identity()
        lo, hi, u = self._bracket(t)
        if u == 0.0 or lo == hi:
            p = self.poses[lo]
            return Pose(p.position.copy(), p.quaternion.copy())
        return self.poses[lo].interpolate(self.poses[hi], u)


def swept_volume(track: AnimationTrack) -> TriMesh:
    """Union-as-soup of every keyframe mesh, carrying the track's identity."""
    track.validate()
    meshes = [track.keyframe_mesh(k) for k in range(len(track.times))]
    if len(meshes) == 1:
        return meshes[0]
    return TriMesh.concatenate(meshes, meshes[0].instance_id, meshes[0].semantic_label)


def save_track(path: str | Path, track: AnimationTrack) -> None:
    track.validate()
    common = dict(
        times=track.times,
        frame_rate=np.float64(track.frame_rate),
        name=np.bytes_(track.name.encode()),
    )
    if track.frames is not None:
        first = track.frames[0]
        np.savez(
            path,
            kind=np.bytes_(b"deforming"),
            vertices=np.stack([f.vertices for f in track.frames]),
            triangles=first.triangles,
            instance_id=np.int64(first.instance_id),
            semantic_label=np.bytes_(first.semantic_label.encode()),
            **common,
        )
    else:
        np.savez(
            path,
            kind=np.bytes_(b"rigid"),
            vertices=track.base_mesh.vertices,
            triangles=track.base_mesh.triangles,
            instance_id=np.int64(track.base_mesh.instance_id),
            semantic_label=np.bytes_(track.base_mesh.semantic_label.encode()),
            positions=np.stack([p.position for p in track.poses]),
            quaternions=np.stack([p.quaternion for p in track.poses]),
            **common,
        )


def load_track(path: str | Path) -> AnimationTrack:
    with np.load(path) as data:
        kind = bytes(data["kind"]).decode()
        times = data["times"]
        frame_rate = float(data["frame_rate"])
        name = bytes(data["name"]).decode()
        instance_id = int(data["instance_id"])
        label = bytes(data["semantic_label"]).decode()
        if kind == "deforming":
            tris = data["triangles"]
            frames = [TriMesh(v, tris, instance_id, label) for v in data["vertices"]]
            track = AnimationTrack(times, frames=frames, frame_rate=frame_rate, name=name)
        elif kind == "rigid":
            base = TriMesh(data["vertices"], data["triangles"], instance_id, label)
            poses = [Pose(p, q) for p, q in zip(data["positions"], data["quaternions"])]
            track = AnimationTrack(times, base_mesh=base, poses=poses, frame_rate=frame_rate, name=name)
        else:
            raise ValueError(f"unknown track kind {kind!r}")
    track.validate()
    return track
