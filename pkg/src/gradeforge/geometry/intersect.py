"""Exact triangle intersection predicates, vectorized over candidate pairs.

The triangle-triangle test is the interval variant of the classic
separating-plane predicate: each triangle is tested against the other's
supporting plane, surviving pairs project onto the line of plane
intersection, and the two parameter intervals are compared.  Coplanar
pairs drop to a 2D segment/containment test.  Plane distances within
``eps`` of zero are snapped to zero so that touching surfaces count as
intersecting.

Degenerate (zero-area) triangles never intersect anything.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-9
DEGENERATE_NORMAL = 1e-14

# pairs processed per chunk in brute-force contact counting
_CHUNK = 1 << 18


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def _cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _plane_distances(n: np.ndarray, ref: np.ndarray, tri: np.ndarray, eps: float) -> np.ndarray:
    d = _dot(n[:, None, :], tri - ref[:, None, :])
    return np.where(np.abs(d) < eps, 0.0, d)


def _interval_on_line(p: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Parameter interval cut by a triangle on the plane-intersection line.

    ``p`` holds the three vertex projections, ``d`` the snapped signed
    plane distances.  The vertex sitting alone on its side of the plane
    anchors both interval endpoints.
    """
    d0, d1, d2 = d[:, 0], d[:, 1], d[:, 2]
    alone = np.where(
        d0 * d1 > 0.0,
        2,
        np.where(
            d0 * d2 > 0.0,
            1,
            np.where(
                d1 * d2 > 0.0,
                0,
                np.where(d0 != 0.0, 0, np.where(d1 != 0.0, 1, 2)),
            ),
        ),
    )
    rows = np.arange(len(d))
    da = d[rows, alone]
    db = d[rows, (alone + 1) % 3]
    dc = d[rows, (alone + 2) % 3]
    pa = p[rows, alone]
    pb = p[rows, (alone + 1) % 3]
    pc = p[rows, (alone + 2) % 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = pa + (pb - pa) * da / (da - db)
        t1 = pa + (pc - pa) * da / (da - dc)
    return np.minimum(t0, t1), np.maximum(t0, t1)


def _segments_cross_2d(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Segment intersection including endpoint touching and collinear overlap."""
    r = p2 - p1
    s = q2 - q1
    d1 = _cross2(s, p1 - q1)
    d2 = _cross2(s, p2 - q1)
    d3 = _cross2(r, q1 - p1)
    d4 = _cross2(r, q2 - p1)
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (
        ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
    )

    def on_span(a, b, x):
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        return np.all((x >= lo) & (x <= hi), axis=-1)

    touch = (
        ((d1 == 0) & on_span(q1, q2, p1))
        | ((d2 == 0) & on_span(q1, q2, p2))
        | ((d3 == 0) & on_span(p1, p2, q1))
        | ((d4 == 0) & on_span(p1, p2, q2))
    )
    return proper | touch


def _points_in_tri_2d(pts: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Boundary-inclusive point-in-triangle for either winding."""
    s0 = _cross2(tri[:, 1] - tri[:, 0], pts - tri[:, 0])
    s1 = _cross2(tri[:, 2] - tri[:, 1], pts - tri[:, 1])
    s2 = _cross2(tri[:, 0] - tri[:, 2], pts - tri[:, 2])
    return ((s0 >= 0) & (s1 >= 0) & (s2 >= 0)) | ((s0 <= 0) & (s1 <= 0) & (s2 <= 0))


def _coplanar_intersect(ta: np.ndarray, tb: np.ndarray, n: np.ndarray) -> np.ndarray:
    drop = np.argmax(np.abs(n), axis=-1)
    keep = np.stack([(drop + 1) % 3, (drop + 2) % 3], axis=-1)
    rows = np.arange(len(ta))[:, None, None]
    a2 = ta[rows, np.arange(3)[None, :, None], keep[:, None, :]]
    b2 = tb[rows, np.arange(3)[None, :, None], keep[:, None, :]]

    ea0 = a2[:, :, None, :]
    ea1 = np.roll(a2, -1, axis=1)[:, :, None, :]
    eb0 = b2[:, None, :, :]
    eb1 = np.roll(b2, -1, axis=1)[:, None, :, :]
    edge_hit = _segments_cross_2d(
        np.broadcast_to(ea0, ea0.shape[:2] + (3, 2)),
        np.broadcast_to(ea1, ea1.shape[:2] + (3, 2)),
        np.broadcast_to(eb0, (eb0.shape[0], 3, 3, 2)),
        np.broadcast_to(eb1, (eb1.shape[0], 3, 3, 2)),
    ).any(axis=(1, 2))

    a_in_b = _points_in_tri_2d(a2[:, 0], b2)
    b_in_a = _points_in_tri_2d(b2[:, 0], a2)
    return edge_hit | a_in_b | b_in_a


def tri_pairs_intersect(ta: np.ndarray, tb: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Exact intersection flags for aligned triangle pairs.

    ``ta`` and ``tb`` are (N, 3, 3) corner arrays; returns a boolean
    (N,) mask.  Touching counts as intersecting; degenerate triangles
    do not intersect anything.
    """
    ta = np.asarray(ta, dtype=float)
    tb = np.asarray(tb, dtype=float)
    n = len(ta)
    if n == 0:
        return np.zeros(0, dtype=bool)
    n1 = np.cross(ta[:, 1] - ta[:, 0], ta[:, 2] - ta[:, 0])
    n2 = np.cross(tb[:, 1] - tb[:, 0], tb[:, 2] - tb[:, 0])
    l1 = np.linalg.norm(n1, axis=1)
    l2 = np.linalg.norm(n2, axis=1)
    ok = (l1 > DEGENERATE_NORMAL) & (l2 > DEGENERATE_NORMAL)

    # unit normals keep the eps snap a metric tolerance
    with np.errstate(divide="ignore", invalid="ignore"):
        n1u = n1 / l1[:, None]
        n2u = n2 / l2[:, None]
    du = _plane_distances(n1u, ta[:, 0], tb, eps)
    dv = _plane_distances(n2u, tb[:, 0], ta, eps)
    separated = ((du > 0).all(axis=1) | (du < 0).all(axis=1)) | (
        (dv > 0).all(axis=1) | (dv < 0).all(axis=1)
    )
    active = ok & ~separated
    coplanar = active & (du == 0).all(axis=1)
    lined = active & ~coplanar

    out = np.zeros(n, dtype=bool)
    if lined.any():
        idx = np.nonzero(lined)[0]
        line_dir = np.cross(n1[idx], n2[idx])
        axis = np.argmax(np.abs(line_dir), axis=-1)
        rows = np.arange(len(idx))
        pv = ta[idx][rows[:, None], np.arange(3)[None, :], axis[:, None]]
        pu = tb[idx][rows[:, None], np.arange(3)[None, :], axis[:, None]]
        lo1, hi1 = _interval_on_line(pv, dv[idx])
        lo2, hi2 = _interval_on_line(pu, du[idx])
        # eps slack keeps exact touching robust under rounding
        out[idx] = ~((hi1 < lo2 - eps) | (hi2 < lo1 - eps))
    if coplanar.any():
        idx = np.nonzero(coplanar)[0]
        out[idx] = _coplanar_intersect(ta[idx], tb[idx], n1[idx])
    return out


def triangle_aabbs(tris: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return tris.min(axis=1), tris.max(axis=1)


def aabbs_overlap(
    min_a: np.ndarray,
    max_a: np.ndarray,
    min_b: np.ndarray,
    max_b: np.ndarray,
    margin: float = 0.0,
) -> np.ndarray:
    """Inclusive overlap test so touching boxes are never pruned."""
    return np.all(min_a <= max_b + margin, axis=-1) & np.all(min_b <= max_a + margin, axis=-1)


def count_contacts_brute(a, b, eps: float = EPS) -> int:
    """Exhaustive pairwise contact count, chunked to bound memory."""
    ta = a.triangle_corners()
    tb = b.triangle_corners()
    na, nb = len(ta), len(tb)
    if na == 0 or nb == 0:
        raise ValueError("empty geometry")
    min_a, max_a = triangle_aabbs(ta)
    min_b, max_b = triangle_aabbs(tb)
    total = 0
    rows_per_chunk = max(1, _CHUNK // nb)
    for start in range(0, na, rows_per_chunk):
        stop = min(na, start + rows_per_chunk)
        near = aabbs_overlap(
            min_a[start:stop, None, :],
            max_a[start:stop, None, :],
            min_b[None, :, :],
            max_b[None, :, :],
            margin=eps,
        )
        ai, bj = np.nonzero(near)
        if len(ai) == 0:
            continue
        total += int(tri_pairs_intersect(ta[start + ai], tb[bj], eps).sum())
    return total


def count_contacts(a, b, eps: float = EPS, accel: bool = True) -> int:
    """Number of intersecting triangle pairs between two meshes.

    Zero iff the surfaces are disjoint.  The accelerated path prunes
    with bounding-volume hierarchies and must agree exactly with
    :func:`count_contacts_brute`; set ``accel=False`` to force the
    exhaustive path.
    """
    a.validate()
    b.validate()
    if not accel or a.num_triangles * b.num_triangles <= 4096:
        return count_contacts_brute(a, b, eps)
    from .bvh import build_bvh, candidate_tri_pairs

    bvh_a = build_bvh(a)
    bvh_b = build_bvh(b)
    ai, bj = candidate_tri_pairs(bvh_a, bvh_b, margin=eps)
    if len(ai) == 0:
        return 0
    ta = a.triangle_corners()[ai]
    tb = b.triangle_corners()[bj]
    return int(tri_pairs_intersect(ta, tb, eps).sum())


def ray_triangles(
    origins: np.ndarray,
    directions: np.ndarray,
    tris: np.ndarray,
    eps: float = EPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Ray/triangle parameters for aligned (K,) ray-triangle pairs.

    Returns ``(t, hit)`` where ``hit`` flags rays that pierce their
    triangle (double-sided, barycentric tolerance ``eps``).  ``t`` is
    measured in units of the unnormalized direction vector.
    """
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    pvec = np.cross(directions, e2)
    det = _dot(e1, pvec)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / det
        tvec = origins - tris[:, 0]
        u = _dot(tvec, pvec) * inv
        qvec = np.cross(tvec, e1)
        v = _dot(directions, qvec) * inv
        t = _dot(e2, qvec) * inv
        hit = (
            (np.abs(det) > DEGENERATE_NORMAL)
            & (u >= -eps)
            & (v >= -eps)
            & (u + v <= 1.0 + eps)
        )
    return t, hit


def ray_aabb_overlap(
    origins: np.ndarray,
    directions: np.ndarray,
    box_min: np.ndarray,
    box_max: np.ndarray,
    t_max: float = np.inf,
) -> np.ndarray:
    """Slab test, inclusive at box faces.

    Zero direction components are handled explicitly: the axis admits
    every t when the origin lies within the slab (boundary included)
    and no t otherwise.  This avoids 0 * inf artifacts that could prune
    a ray grazing a flat node box.
    """
    zero = directions == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / directions
        t0 = (box_min - origins) * inv
        t1 = (box_max - origins) * inv
    inside = (origins >= box_min) & (origins <= box_max)
    lo = np.where(zero, np.where(inside, -np.inf, np.inf), np.minimum(t0, t1))
    hi = np.where(zero, np.where(inside, np.inf, -np.inf), np.maximum(t0, t1))
    t_near = lo.max(axis=-1)
    t_far = hi.min(axis=-1)
    return (t_far >= np.maximum(t_near, 0.0)) & (t_near <= t_max)


_BOX_AXES = np.eye(3)


def tri_box_overlap(
    tris: np.ndarray,
    box_min: np.ndarray,
    box_max: np.ndarray,
    open_axes: tuple[bool, bool, bool] = (False, False, False),
) -> np.ndarray:
    """Separating-axis triangle/AABB test for aligned (N,) pairs.

    Inclusive at the boundary by default: a triangle touching a box
    face overlaps.  Axes listed in ``open_axes`` treat the box as an
    open interval instead, so a triangle lying exactly on a face does
    not overlap; occupancy rasterization uses this to assign
    grid-aligned geometry to a single cell column.
    """
    center = 0.5 * (box_min + box_max)
    half = 0.5 * (box_max - box_min)
    v = tris - center[:, None, :]

    sep = np.zeros(len(tris), dtype=bool)
    vmin = v.min(axis=1)
    vmax = v.max(axis=1)
    for ax in range(3):
        if open_axes[ax]:
            sep |= (vmin[:, ax] >= half[:, ax]) | (vmax[:, ax] <= -half[:, ax])
        else:
            sep |= (vmin[:, ax] > half[:, ax]) | (vmax[:, ax] < -half[:, ax])

    edges = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 1], v[:, 0] - v[:, 2]], axis=1)
    for ei in range(3):
        for ax in range(3):
            a = np.cross(_BOX_AXES[ax], edges[:, ei])
            p = _dot(a[:, None, :], v)
            r = np.abs(a[:, 0]) * half[:, 0] + np.abs(a[:, 1]) * half[:, 1] + np.abs(a[:, 2]) * half[:, 2]
            sep |= (p.min(axis=1) > r) | (p.max(axis=1) < -r)

    n = np.cross(edges[:, 0], -edges[:, 2])
    r = np.abs(n[:, 0]) * half[:, 0] + np.abs(n[:, 1]) * half[:, 1] + np.abs(n[:, 2]) * half[:, 2]
    s = _dot(n, v[:, 0])
    sep |= np.abs(s) > r
    return ~sep
