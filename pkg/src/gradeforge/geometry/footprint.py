"""Environment footprint polygon and 2D occupancy rasterization.

The footprint starts from the convex hull of the wall vertices found in
a thin horizontal slab.  Hull corners that are not right angles get an
axis-aligned notch cut in, provided some slab vertex supports the notch
corner and the cut does not orphan any slab vertex.  Corners that stay
non-rectilinear are reported in ``flagged_corners`` instead of being
forced into a shape the data does not support.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .intersect import _cross2, tri_box_overlap
from .mesh import TriMesh

log = logging.getLogger(__name__)

SLAB_HALF_WIDTH = 0.1
ANGLE_TOL_DEG = 2.0
CONTAIN_TOL = 1e-6

OCCUPIED = 0
FREE = 255
UNKNOWN = 127


@dataclass
class FootprintPolygon:
    polygon: np.ndarray
    circumscribed_rect: tuple[float, float, float, float]
    flagged_corners: list[int] = field(default_factory=list)
    used_fallback: bool = False

    def __post_init__(self) -> None:
        self.polygon = np.asarray(self.polygon, dtype=float).reshape(-1, 2)


@dataclass
class OccupancyGrid:
    resolution: float
    origin: np.ndarray
    cells: np.ndarray

    def __post_init__(self) -> None:
        self.origin = np.asarray(self.origin, dtype=float).reshape(2)
        self.cells = np.asarray(self.cells, dtype=np.uint8)


def convex_hull_2d(pts: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = np.unique(np.asarray(pts, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[np.ndarray] = []
        for p in seq:
            while len(out) >= 2 and _cross2(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def polygon_contains(polygon: np.ndarray, pts: np.ndarray, tol: float = CONTAIN_TOL) -> np.ndarray:
    """Boundary-inclusive point-in-polygon (crossing number plus edge distance)."""
    polygon = np.asarray(polygon, dtype=float)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    a = polygon
    b = np.roll(polygon, -1, axis=0)
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    ax, ay = a[:, 0][None, :], a[:, 1][None, :]
    bx, by = b[:, 0][None, :], b[:, 1][None, :]

    crosses = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at = ax + (y - ay) * (bx - ax) / (by - ay)
    inside = (crosses & (x < x_at)).sum(axis=1) % 2 == 1

    # distance to each edge picks up points sitting on the boundary
    ex = bx - ax
    ey = by - ay
    len2 = ex * ex + ey * ey
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.clip(((x - ax) * ex + (y - ay) * ey) / np.where(len2 > 0, len2, 1.0), 0.0, 1.0)
    dx = x - (ax + u * ex)
    dy = y - (ay + u * ey)
    on_edge = (dx * dx + dy * dy <= tol * tol).any(axis=1)
    return inside | on_edge


def _interior_angle_deg(prev: np.ndarray, corner: np.ndarray, nxt: np.ndarray) -> float:
    u = prev - corner
    v = nxt - corner
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 180.0
    c = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return math.degrees(math.acos(c))


def _edge_axis_aligned(p: np.ndarray, q: np.ndarray, angle_tol_deg: float) -> bool:
    d = q - p
    if np.allclose(d, 0.0):
        return True
    ang = math.degrees(math.atan2(abs(d[1]), abs(d[0])))
    return min(ang, 90.0 - ang) <= angle_tol_deg


def _canonical_start(polygon: np.ndarray) -> np.ndarray:
    keys = [(x, y) for x, y in polygon]
    start = min(range(len(keys)), key=lambda i: keys[i])
    return np.roll(polygon, -start, axis=0)


def extract_footprint(
    env: TriMesh,
    slice_height: float,
    slab_half_width: float = SLAB_HALF_WIDTH,
    angle_tol_deg: float = ANGLE_TOL_DEG,
) -> FootprintPolygon:
    """Enclosing polygon of the wall cross-section at ``slice_height``.

    Falls back to the hull of all vertices (with a warning) when the
    slab is empty.  The returned polygon always contains every slab
    vertex within ``CONTAIN_TOL``.
    """
    env.validate(require_triangles=False)
    if len(env.vertices) == 0:
        raise ValueError("empty geometry")
    verts = env.vertices
    rect = (
        float(verts[:, 0].min()),
        float(verts[:, 1].min()),
        float(verts[:, 0].max()),
        float(verts[:, 1].max()),
    )
    z = verts[:, 2]
    in_slab = np.abs(z - slice_height) <= slab_half_width
    used_fallback = False
    if not in_slab.any():
        log.warning(
            "no vertices within %.3f m of slice height %.3f; using full-mesh hull",
            slab_half_width,
            slice_height,
        )
        used_fallback = True
        slab_pts = verts[:, :2]
    else:
        slab_pts = verts[in_slab][:, :2]

    hull = convex_hull_2d(slab_pts)
    if len(hull) < 3:
        return FootprintPolygon(_canonical_start(hull) if len(hull) else hull, rect, [], used_fallback)

    refined = _refine_rectilinear(hull, slab_pts, angle_tol_deg)
    refined = _canonical_start(refined)
    flagged = []
    n = len(refined)
    for i in range(n):
        ang = _interior_angle_deg(refined[(i - 1) % n], refined[i], refined[(i + 1) % n])
        if abs(ang - 90.0) > angle_tol_deg and abs(ang - 180.0) > angle_tol_deg:
            flagged.append(i)
    return FootprintPolygon(refined, rect, flagged, used_fallback)


def _refine_rectilinear(hull: np.ndarray, slab_pts: np.ndarray, angle_tol_deg: float) -> np.ndarray:
    out: list[np.ndarray] = []
    n = len(hull)
    for i in range(n):
        p = hull[i]
        q = hull[(i + 1) % n]
        out.append(p)
        if _edge_axis_aligned(p, q, angle_tol_deg):
            continue
        notch = _notch_for_edge(p, q, slab_pts)
        if notch is not None:
            out.append(notch)
    return np.asarray(out)


def _notch_for_edge(p: np.ndarray, q: np.ndarray, slab_pts: np.ndarray) -> np.ndarray | None:
    """Axis-aligned corner replacing diagonal edge p->q, if the data supports it.

    The candidate on the interior side of the edge is accepted when a
    slab vertex coincides with it and no slab vertex lies strictly
    inside the triangle that the notch would cut away.
    """
    for cand in (np.array([q[0], p[1]]), np.array([p[0], q[1]])):
        if _cross2(q - p, cand - p) <= 0:
            continue  # exterior side, would grow the polygon
        support = np.min(np.linalg.norm(slab_pts - cand, axis=1)) <= CONTAIN_TOL
        if not support:
            continue
        tri = np.stack([p, cand, q])
        if _any_strictly_inside(tri, slab_pts):
            continue
        return cand
    return None


def _any_strictly_inside(tri: np.ndarray, pts: np.ndarray, tol: float = CONTAIN_TOL) -> bool:
    """True when some point sits more than tol inside the triangle."""
    area = _cross2(tri[1] - tri[0], tri[2] - tri[0])
    if area < 0:
        tri = tri[::-1]
    hit = np.ones(len(pts), dtype=bool)
    for i in range(3):
        a = tri[i]
        b = tri[(i + 1) % 3]
        edge_len = max(float(np.linalg.norm(b - a)), 1e-30)
        # cross / edge length is the signed point-line distance
        hit &= _cross2(b - a, pts - a) > tol * edge_len
    return bool(hit.any())


def rasterize_occupancy(
    env: TriMesh,
    resolution: float,
    slab: tuple[float, float],
    footprint: FootprintPolygon | None = None,
) -> OccupancyGrid:
    """Classify grid cells as occupied, free, or unknown.

    A cell is occupied when any environment triangle intersects the
    cell's vertical prism within the z slab (exact separating-axis
    test).  Remaining cells are free inside the footprint polygon and
    unknown outside it.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    z_min, z_max = slab
    if not z_min < z_max:
        raise ValueError("slab z_min must be below z_max")
    env.validate()
    if footprint is None:
        footprint = extract_footprint(env, 0.5 * (z_min + z_max))
    min_x, min_y, max_x, max_y = footprint.circumscribed_rect
    nx = max(1, math.ceil((max_x - min_x) / resolution - 1e-9))
    ny = max(1, math.ceil((max_y - min_y) / resolution - 1e-9))
    cells = np.full((ny, nx), UNKNOWN, dtype=np.uint8)

    tris = env.triangle_corners()
    zs = tris[..., 2]
    near_slab = (zs.min(axis=1) <= z_max) & (zs.max(axis=1) >= z_min)
    tris = tris[near_slab]

    occupied = np.zeros((ny, nx), dtype=bool)
    for tri in tris:
        t_min = tri.min(axis=0)
        t_max = tri.max(axis=0)
        ix0 = max(0, int(math.floor((t_min[0] - min_x) / resolution)))
        ix1 = min(nx - 1, int(math.floor((t_max[0] - min_x) / resolution + 1e-12)))
        iy0 = max(0, int(math.floor((t_min[1] - min_y) / resolution)))
        iy1 = min(ny - 1, int(math.floor((t_max[1] - min_y) / resolution + 1e-12)))
        if ix1 < ix0 or iy1 < iy0:
            continue
        gx, gy = np.meshgrid(np.arange(ix0, ix1 + 1), np.arange(iy0, iy1 + 1))
        gx = gx.ravel()
        gy = gy.ravel()
        todo = ~occupied[gy, gx]
        gx = gx[todo]
        gy = gy[todo]
        if not len(gx):
            continue
        box_min = np.stack([min_x + gx * resolution, min_y + gy * resolution, np.full(len(gx), z_min)], axis=1)
        box_max = box_min + np.array([resolution, resolution, z_max - z_min])
        # open x/y intervals keep grid-aligned faces out of neighbor columns
        hit = tri_box_overlap(
            np.broadcast_to(tri, (len(gx), 3, 3)), box_min, box_max, open_axes=(True, True, False)
        )
        occupied[gy[hit], gx[hit]] = True

    cx = min_x + (np.arange(nx) + 0.5) * resolution
    cy = min_y + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(cx, cy)
    centers = np.stack([gx.ravel(), gy.ravel()], axis=1)
    in_rect = (
        (centers[:, 0] >= min_x)
        & (centers[:, 0] <= max_x)
        & (centers[:, 1] >= min_y)
        & (centers[:, 1] <= max_y)
    )
    inside = np.zeros(len(centers), dtype=bool)
    if len(footprint.polygon) >= 3:
        inside[in_rect] = polygon_contains(footprint.polygon, centers[in_rect])
    free = inside.reshape(ny, nx) & ~occupied
    cells[occupied] = OCCUPIED
    cells[free] = FREE
    return OccupancyGrid(resolution, np.array([min_x, min_y]), cells)
