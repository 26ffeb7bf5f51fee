"""Color-by-id rendering and image file exports.

Real texture rendering is out of scope; the RGB channel is a proxy built
from the depth and instance images, with a stable hue per instance id so
frames are comparable across a sequence. Files use exchange formats that
other tools read directly: float PFM and millimeter 16-bit PNG for depth,
16-bit PNG for instance ids, 8-bit PNG for color.
"""

from __future__ import annotations

import colorsys
from pathlib import Path

import numpy as np
from PIL import Image

from .camera import DepthImage, InstanceImage

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def instance_hue(instance_id: int) -> float:
    """Stable hue in [0, 1) for an instance id; distinct at full precision."""
    return _splitmix64(int(instance_id)) / 2.0**64


def proxy_rgb(
    depth: DepthImage,
    instances: InstanceImage,
    display_range: float | None = None,
) -> np.ndarray:
    """Uint8 color image: hue from the instance id, darker with distance.

    Value falls off as 1 - depth / range; background stays black. The
    range defaults to the depth image's own limit, or to the largest
    depth in the frame when that limit is unbounded.
    """
    z = depth.data.astype(np.float64)
    ids = instances.data
    if z.shape != ids.shape:
        raise ValueError(
            f"depth {z.shape} and instance {ids.shape} images disagree in size"
        )
    if display_range is None:
        if np.isfinite(depth.max_range):
            display_range = float(depth.max_range)
        else:
            peak = float(z.max())
            display_range = peak if peak > 0.0 else 1.0
    value = np.clip(1.0 - z / display_range, 0.0, 1.0)
    out = np.zeros(z.shape + (3,), dtype=np.float64)
    for instance_id in np.unique(ids):
        if instance_id == 0:
            continue
        r, g, b = colorsys.hsv_to_rgb(instance_hue(int(instance_id)), 0.85, 1.0)
        mask = ids == instance_id
        out[mask] = np.array([r, g, b]) * value[mask][:, None]
    out[ids == 0] = 0.0
    return np.round(out * 255.0).astype(np.uint8)


# -- file formats ------------------------------------------------------------


def save_pfm(path: str | Path, depth: DepthImage) -> None:
    """Little-endian float PFM; rows are stored bottom to top."""
    data = np.asarray(depth.data, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{data.shape[1]} {data.shape[0]}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(np.flipud(data).tobytes())


def load_pfm(path: str | Path) -> DepthImage:
    with open(path, "rb") as fh:
        if fh.readline().strip() != b"Pf":
            raise ValueError("not a grayscale PFM file")
        width, height = (int(v) for v in fh.readline().split())
        scale = float(fh.readline())
        count = width * height
        data = np.frombuffer(fh.read(count * 4), dtype="<f4" if scale < 0 else ">f4")
        if len(data) != count:
            raise ValueError("truncated PFM payload")
    return DepthImage(np.flipud(data.reshape(height, width)).copy())


def save_depth_png(path: str | Path, depth: DepthImage) -> None:
    """16-bit grayscale PNG in millimeters, saturating at 65.535 m."""
    mm = np.clip(np.round(depth.data.astype(np.float64) * 1000.0), 0, 65535)
    Image.fromarray(mm.astype(np.uint16)).save(path)


def load_depth_png(path: str | Path) -> DepthImage:
    mm = np.asarray(Image.open(path), dtype=np.float64)
    return DepthImage(mm / 1000.0)


def save_instance_png(path: str | Path, instances: InstanceImage) -> None:
    ids = instances.data
    if ids.max(initial=0) > 65535:
        raise ValueError("instance id does not fit 16-bit PNG")
    Image.fromarray(ids.astype(np.uint16)).save(path)


def load_instance_png(path: str | Path) -> InstanceImage:
    return InstanceImage(np.asarray(Image.open(path), dtype=np.uint32))


def save_rgb_png(path: str | Path, rgb: np.ndarray) -> None:
    rgb = np.asarray(rgb)
    if rgb.dtype != np.uint8 or rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) uint8 image")
    Image.fromarray(rgb, mode="RGB").save(path)


def load_rgb_png(path: str | Path) -> np.ndarray:
    return np.asarray(Image.open(path).convert("RGB"))
