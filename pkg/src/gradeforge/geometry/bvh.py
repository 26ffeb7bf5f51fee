"""Bounding-volume hierarchy over mesh triangles, stored as flat arrays.

Construction is a deterministic median split on the longest centroid
axis.  Queries are batched: frontiers of (node, node) or (ray, node)
pairs advance one level per iteration, which keeps all geometry math
inside numpy.  The BVH only ever prunes pairs whose boxes are disjoint
(inclusive overlap test), so accelerated queries return exactly the
same results as exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intersect import aabbs_overlap, ray_aabb_overlap, ray_triangles
from .mesh import TriMesh

DEFAULT_LEAF_SIZE = 8


@dataclass
class Bvh:
    nodes_min: np.ndarray
    nodes_max: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    count: np.ndarray
    order: np.ndarray
    tris: np.ndarray
    leaf_size: int

    @property
    def num_nodes(self) -> int:
        return len(self.left)

    def is_leaf(self, nodes: np.ndarray) -> np.ndarray:
        return self.left[nodes] < 0


def build_bvh(mesh: TriMesh, leaf_size: int = DEFAULT_LEAF_SIZE) -> Bvh:
    mesh.validate()
    tris = mesh.triangle_corners()
    tri_min = tris.min(axis=1)
    tri_max = tris.max(axis=1)
    centroids = tris.mean(axis=1)

    nodes_min: list[np.ndarray] = []
    nodes_max: list[np.ndarray] = []
    left: list[int] = []
    right: list[int] = []
    start: list[int] = []
    count: list[int] = []

    order = np.arange(len(tris), dtype=np.int64)
    # stack holds (node_index, lo, hi) ranges into order awaiting a split
    stack: list[tuple[int, int, int]] = []

    def alloc(lo: int, hi: int) -> int:
        idx = len(left)
        sel = order[lo:hi]
        nodes_min.append(tri_min[sel].min(axis=0))
        nodes_max.append(tri_max[sel].max(axis=0))
        left.append(-1)
        right.append(-1)
        start.append(lo)
        count.append(hi - lo)
        return idx

    root = alloc(0, len(tris))
    stack.append((root, 0, len(tris)))
    while stack:
        node, lo, hi = stack.pop()
        if hi - lo <= leaf_size:
            continue
        sel = order[lo:hi]
        cmin = centroids[sel].min(axis=0)
        cmax = centroids[sel].max(axis=0)
        axis = int(np.argmax(cmax - cmin))
        if cmax[axis] - cmin[axis] <= 0.0:
            continue  # coincident centroids, keep as a fat leaf
        perm = np.argsort(centroids[sel, axis], kind="stable")
        order[lo:hi] = sel[perm]
        mid = lo + (hi - lo) // 2
        li = alloc(lo, mid)
        stack.append((li, lo, mid))
        ri = alloc(mid, hi)
        stack.append((ri, mid, hi))
        left[node] = li
        right[node] = ri

    return Bvh(
        nodes_min=np.asarray(nodes_min),
        nodes_max=np.asarray(nodes_max),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        start=np.asarray(start, dtype=np.int64),
        count=np.asarray(count, dtype=np.int64),
        order=order,
        tris=tris,
        leaf_size=leaf_size,
    )


def _expand_leaf_pairs(
    a: Bvh, b: Bvh, na: np.ndarray, nb: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    ca = a.count[na]
    cb = b.count[nb]
    reps = ca * cb
    total = int(reps.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    pair_of = np.repeat(np.arange(len(na)), reps)
    offsets = np.concatenate([[0], np.cumsum(reps)])
    local = np.arange(total) - offsets[pair_of]
    ia = local // cb[pair_of]
    ib = local % cb[pair_of]
    tri_a = a.order[a.start[na][pair_of] + ia]
    tri_b = b.order[b.start[nb][pair_of] + ib]
    return tri_a, tri_b


def candidate_tri_pairs(a: Bvh, b: Bvh, margin: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Triangle index pairs whose AABBs overlap, found by dual traversal."""
    na = np.zeros(1, dtype=np.int64)
    nb = np.zeros(1, dtype=np.int64)
    out_a: list[np.ndarray] = []
    out_b: list[np.ndarray] = []
    while len(na):
        keep = aabbs_overlap(a.nodes_min[na], a.nodes_max[na], b.nodes_min[nb], b.nodes_max[nb], margin)
        na = na[keep]
        nb = nb[keep]
        if not len(na):
            break
        leaf_a = a.is_leaf(na)
        leaf_b = b.is_leaf(nb)
        both = leaf_a & leaf_b
        if both.any():
            ta, tb = _expand_leaf_pairs(a, b, na[both], nb[both])
            out_a.append(ta)
            out_b.append(tb)
        only_a = leaf_a & ~leaf_b
        only_b = leaf_b & ~leaf_a
        neither = ~leaf_a & ~leaf_b
        # descend: a-leaf pairs split b, b-leaf pairs split a, inner pairs split both
        next_a: list[np.ndarray] = []
        next_b: list[np.ndarray] = []
        if only_a.any():
            next_a.append(np.repeat(na[only_a], 2))
            next_b.append(np.stack([b.left[nb[only_a]], b.right[nb[only_a]]], axis=1).ravel())
        if only_b.any():
            next_a.append(np.stack([a.left[na[only_b]], a.right[na[only_b]]], axis=1).ravel())
            next_b.append(np.repeat(nb[only_b], 2))
        if neither.any():
            la = a.left[na[neither]]
            ra = a.right[na[neither]]
            lb = b.left[nb[neither]]
            rb = b.right[nb[neither]]
            next_a.append(np.stack([la, la, ra, ra], axis=1).ravel())
            next_b.append(np.stack([lb, rb, lb, rb], axis=1).ravel())
        na = np.concatenate(next_a) if next_a else np.zeros(0, dtype=np.int64)
        nb = np.concatenate(next_b) if next_b else np.zeros(0, dtype=np.int64)
    if not out_a:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    ta = np.concatenate(out_a)
    tb = np.concatenate(out_b)
    # per-triangle box filter tightens the candidate set
    min_a = a.tris[ta].min(axis=1)
    max_a = a.tris[ta].max(axis=1)
    min_b = b.tris[tb].min(axis=1)
    max_b = b.tris[tb].max(axis=1)
    near = aabbs_overlap(min_a, max_a, min_b, max_b, margin)
    return ta[near], tb[near]


def contact_count(a: Bvh, b: Bvh, eps: float = 1e-9) -> int:
    """Intersecting-pair count between two prebuilt hierarchies.

    Equals the exhaustive pairwise count; prebuilding lets callers
    amortize construction across repeated queries.
    """
    from .intersect import tri_pairs_intersect

    ai, bj = candidate_tri_pairs(a, b, margin=eps)
    if len(ai) == 0:
        return 0
    return int(tri_pairs_intersect(a.tris[ai], b.tris[bj], eps).sum())


def ray_nearest_hits(
    bvh: Bvh,
    origins: np.ndarray,
    directions: np.ndarray,
    t_min: float = 0.0,
    t_max: float = np.inf,
    chunk: int = 1 << 15,
) -> tuple[np.ndarray, np.ndarray]:
    """Nearest triangle per ray.

    Returns ``(t, tri_index)`` with ``tri_index = -1`` for misses.  Ties
    on ``t`` resolve to the smallest triangle index, which pins down the
    result when rays hit shared edges.
    """
    origins = np.asarray(origins, dtype=float).reshape(-1, 3)
    directions = np.asarray(directions, dtype=float).reshape(-1, 3)
    n_rays = len(origins)
    best_t = np.full(n_rays, np.inf)
    best_tri = np.full(n_rays, -1, dtype=np.int64)
    for lo in range(0, n_rays, chunk):
        hi = min(n_rays, lo + chunk)
        t, tri = _ray_nearest_chunk(bvh, origins[lo:hi], directions[lo:hi], t_min, t_max)
        best_t[lo:hi] = t
        best_tri[lo:hi] = tri
    return best_t, best_tri


def _ray_nearest_chunk(
    bvh: Bvh, origins: np.ndarray, directions: np.ndarray, t_min: float, t_max: float
) -> tuple[np.ndarray, np.ndarray]:
    n_rays = len(origins)
    rr = np.arange(n_rays, dtype=np.int64)
    nn = np.zeros(n_rays, dtype=np.int64)
    cand_r: list[np.ndarray] = []
    cand_t: list[np.ndarray] = []
    while len(rr):
        keep = ray_aabb_overlap(origins[rr], directions[rr], bvh.nodes_min[nn], bvh.nodes_max[nn], t_max)
        rr = rr[keep]
        nn = nn[keep]
        if not len(rr):
            break
        leaf = bvh.is_leaf(nn)
        if leaf.any():
            lr = rr[leaf]
            ln = nn[leaf]
            counts = bvh.count[ln]
            ray_of = np.repeat(lr, counts)
            offsets = np.concatenate([[0], np.cumsum(counts)])
            local = np.arange(int(counts.sum())) - offsets[np.repeat(np.arange(len(ln)), counts)]
            tris_idx = bvh.order[np.repeat(bvh.start[ln], counts) + local]
            cand_r.append(ray_of)
            cand_t.append(tris_idx)
        inner = ~leaf
        rr2 = np.repeat(rr[inner], 2)
        nn2 = np.stack([bvh.left[nn[inner]], bvh.right[nn[inner]]], axis=1).ravel()
        rr, nn = rr2, nn2

    best_t = np.full(n_rays, np.inf)
    best_tri = np.full(n_rays, -1, dtype=np.int64)
    if not cand_r:
        return best_t, best_tri
    ray_of = np.concatenate(cand_r)
    tri_of = np.concatenate(cand_t)
    t, hit = ray_triangles(origins[ray_of], directions[ray_of], bvh.tris[tri_of])
    valid = hit & (t >= t_min) & (t <= t_max)
    ray_of = ray_of[valid]
    tri_of = tri_of[valid]
    t = t[valid]
    if not len(t):
        return best_t, best_tri
    # nearest hit, ties broken by triangle index
    order = np.lexsort((tri_of, t, ray_of))
    ray_sorted = ray_of[order]
    first = np.concatenate([[True], ray_sorted[1:] != ray_sorted[:-1]])
    best_t[ray_sorted[first]] = t[order][first]
    best_tri[ray_sorted[first]] = tri_of[order][first]
    return best_t, best_tri
