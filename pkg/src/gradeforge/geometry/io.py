"""Mesh ingestion (STL, OBJ) and 2D map export (polygon list, PGM)."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import TriMesh


def load_mesh(path: str | Path, instance_id: int = 0, semantic_label: str = "other") -> TriMesh:
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".stl":
        mesh = load_stl(path)
    elif ext == ".obj":
        mesh = load_obj(path)
    else:
        raise ValueError(f"unsupported mesh format {ext!r}")
    return mesh.with_instance(instance_id, semantic_label)


def _is_ascii_stl(data: bytes) -> bool:
    if not data.lstrip().startswith(b"solid"):
        return False
    # binary files may also start with "solid"; look for an ASCII keyword
    return b"facet" in data[:1024] or b"endsolid" in data[:1024]


def load_stl(path: str | Path) -> TriMesh:
    data = Path(path).read_bytes()
    if _is_ascii_stl(data):
        return _parse_stl_ascii(data.decode("ascii", errors="replace"))
    return _parse_stl_binary(data)


def _parse_stl_binary(data: bytes) -> TriMesh:
    if len(data) < 84:
        raise ValueError("truncated binary STL")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + count * 50
    if len(data) < expected:
        raise ValueError("truncated binary STL")
    rec = np.frombuffer(data, dtype=np.uint8, count=count * 50, offset=84).reshape(count, 50)
    tri = rec[:, 12:48].copy().view("<f4").reshape(count, 3, 3).astype(np.float64)
    verts = tri.reshape(-1, 3)
    faces = np.arange(count * 3, dtype=np.int64).reshape(count, 3)
    return TriMesh(verts, faces)


def _parse_stl_ascii(text: str) -> TriMesh:
    verts: list[list[float]] = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 4 and parts[0] == "vertex":
            verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
    if len(verts) % 3 != 0:
        raise ValueError("ASCII STL vertex count not a multiple of 3")
    v = np.asarray(verts, dtype=np.float64)
    faces = np.arange(len(verts), dtype=np.int64).reshape(-1, 3)
    return TriMesh(v, faces)


def save_stl(path: str | Path, mesh: TriMesh) -> None:
    """Write binary STL (normals recomputed from winding)."""
    tris = mesh.triangle_corners().astype(np.float32)
    n = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    norm = np.linalg.norm(n, axis=1, keepdims=True)
    n = np.where(norm > 0, n / np.maximum(norm, 1e-30), 0.0).astype(np.float32)
    count = len(tris)
    rec = np.zeros((count, 50), dtype=np.uint8)
    rec[:, 0:12] = n.view(np.uint8).reshape(count, 12)
    rec[:, 12:48] = tris.reshape(count, 9).view(np.uint8).reshape(count, 36)
    with open(path, "wb") as f:
        f.write(b"\0" * 80)
        f.write(struct.pack("<I", count))
        f.write(rec.tobytes())


def load_obj(path: str | Path) -> TriMesh:
    """Parse v/f records; polygons are fan-triangulated, indices may be negative."""
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v" and len(parts) >= 4:
            verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
        elif parts[0] == "f" and len(parts) >= 4:
            idx = []
            for tok in parts[1:]:
                i = int(tok.split("/")[0])
                idx.append(i - 1 if i > 0 else len(verts) + i)
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not verts:
        raise ValueError("OBJ file has no vertices")
    return TriMesh(np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64).reshape(-1, 3))


def save_polygon_txt(path: str | Path, polygon: np.ndarray) -> None:
    """One 'x y' pair per line, counter-clockwise order."""
    with open(path, "w") as f:
        for x, y in np.asarray(polygon, dtype=float):
            f.write(f"{float(x)!r} {float(y)!r}\n")


def load_polygon_txt(path: str | Path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if parts:
            rows.append([float(parts[0]), float(parts[1])])
    return np.asarray(rows, dtype=float).reshape(-1, 2)


def save_pgm(path: str | Path, cells: np.ndarray) -> None:
    """Binary P5 image; row 0 of the file is the max-y row of the grid."""
    cells = np.asarray(cells, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{cells.shape[1]} {cells.shape[0]}\n255\n".encode("ascii"))
        f.write(cells[::-1].tobytes())


def load_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM file")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1
    w, h, _ = (int(t) for t in fields)
    img = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos).reshape(h, w)
    return img[::-1].copy()
