"""Per-instance bounding boxes from a rendered frame.

Two 2-D boxes are reported in pixel coordinates: a tight one from the
visible instance mask, and a loose one from projecting every mesh vertex
of the instance, so occluded or out-of-frame parts still count. The 3-D
box is the world-axis-aligned bound of the posed mesh.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..geometry.pose import Pose
from .camera import CameraIntrinsics, DepthImage, InstanceImage, SceneSnapshot

_BEHIND_EPS = 1e-9


@dataclass
class InstanceBoxes:
    instance_id: int
    visible: bool
    tight: tuple | None
    loose: tuple | None
    bbox_3d: tuple

    def to_dict(self, frame: int) -> dict:
        return {
            "frame": int(frame),
            "instance": int(self.instance_id),
            "visible": bool(self.visible),
            "tight": list(self.tight) if self.tight is not None else None,
            "loose": list(self.loose) if self.loose is not None else None,
            "bbox3d": [list(self.bbox_3d[0]), list(self.bbox_3d[1])],
        }


def _project_box(
    verts: np.ndarray, world_from_camera: Pose, intrinsics: CameraIntrinsics
) -> tuple | None:
    """Pixel AABB of projected vertices, clipped to the image.

    Vertices behind the camera cannot be projected; any such vertex makes
    the box fall back to the whole image, a conservative superset.
    """
    cam = world_from_camera.inverse().transform_points(verts)
    w, h = intrinsics.width, intrinsics.height
    if (cam[:, 2] <= _BEHIND_EPS).any():
        return (0, 0, w - 1, h - 1)
    u = intrinsics.fx * cam[:, 0] / cam[:, 2] + intrinsics.cx - 0.5
    v = intrinsics.fy * cam[:, 1] / cam[:, 2] + intrinsics.cy - 0.5
    x0 = int(np.clip(np.floor(u.min()), 0, w - 1))
    x1 = int(np.clip(np.ceil(u.max()), 0, w - 1))
    y0 = int(np.clip(np.floor(v.min()), 0, h - 1))
    y1 = int(np.clip(np.ceil(v.max()), 0, h - 1))
    if u.max() < -0.5 or u.min() > w - 0.5 or v.max() < -0.5 or v.min() > h - 0.5:
        return None
    return (x0, y0, x1, y1)


def bounding_boxes(
    snapshot: SceneSnapshot,
    depth: DepthImage,
    instances: InstanceImage,
    world_from_camera: Pose,
    intrinsics: CameraIntrinsics,
) -> list[InstanceBoxes]:
    """Boxes for every snapshot instance, whether or not it is visible.

    ``tight`` is the axis-aligned bound of the instance's pixels and is
    None for invisible instances; ``loose`` always contains ``tight``.
    """
    del depth
    out = []
    ids_img = instances.data
    for instance_id in snapshot.instance_ids():
        mask = ids_img == instance_id
        visible = bool(mask.any())
        tight = None
        if visible:
            rows, cols = np.nonzero(mask)
            tight = (
                int(cols.min()),
                int(rows.min()),
                int(cols.max()),
                int(rows.max()),
            )
        verts = snapshot.instance_vertices(instance_id)
        loose = _project_box(verts, world_from_camera, intrinsics)
        if visible and loose is None:
            loose = (0, 0, intrinsics.width - 1, intrinsics.height - 1)
        bbox_3d = (
            tuple(float(v) for v in verts.min(axis=0)),
            tuple(float(v) for v in verts.max(axis=0)),
        )
        out.append(InstanceBoxes(instance_id, visible, tight, loose, bbox_3d))
    return out


def save_boxes_jsonl(path: str | Path, frame: int, boxes: list[InstanceBoxes]) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for box in boxes:
            fh.write(json.dumps(box.to_dict(frame), sort_keys=True) + "\n")


def load_boxes_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
