"""BVH construction and query equivalence with exhaustive enumeration."""

from __future__ import annotations

import numpy as np
import pytest

from gradeforge.geometry.bvh import build_bvh, candidate_tri_pairs, ray_nearest_hits
from gradeforge.geometry.intersect import (
    count_contacts,
    count_contacts_brute,
    ray_triangles,
    tri_pairs_intersect,
)
from gradeforge.geometry.mesh import TriMesh, box_mesh

from conftest import random_soup


def brute_nearest_hits(mesh: TriMesh, origins: np.ndarray, directions: np.ndarray):
    """All-triangle reference with the same (t, index) tie-break."""
    tris = mesh.triangle_corners()
    n_rays = len(origins)
    n_tris = len(tris)
    ro = np.repeat(origins, n_tris, axis=0)
    rd = np.repeat(directions, n_tris, axis=0)
    tt = np.tile(tris, (n_rays, 1, 1))
    t, hit = ray_triangles(ro, rd, tt)
    ray_of = np.repeat(np.arange(n_rays), n_tris)
    tri_of = np.tile(np.arange(n_tris), n_rays)
    valid = hit & (t >= 0.0)
    ray_of, tri_of, t = ray_of[valid], tri_of[valid], t[valid]
    best_t = np.full(n_rays, np.inf)
    best_tri = np.full(n_rays, -1, dtype=np.int64)
    order = np.lexsort((tri_of, t, ray_of))
    rs = ray_of[order]
    first = np.concatenate([[True], rs[1:] != rs[:-1]]) if len(rs) else np.zeros(0, dtype=bool)
    best_t[rs[first]] = t[order][first]
    best_tri[rs[first]] = tri_of[order][first]
    return best_t, best_tri


def bvh_contact_count(a: TriMesh, b: TriMesh) -> int:
    ai, bj = candidate_tri_pairs(build_bvh(a), build_bvh(b), margin=1e-9)
    if len(ai) == 0:
        return 0
    return int(tri_pairs_intersect(a.triangle_corners()[ai], b.triangle_corners()[bj]).sum())


class TestBuild:
    def test_single_triangle_single_leaf(self):
        mesh = TriMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]), np.array([[0, 1, 2]]))
        bvh = build_bvh(mesh)
        assert bvh.num_nodes == 1
        assert bvh.left[0] == -1 and bvh.right[0] == -1

    def test_root_box_spans_disjoint_cubes(self):
        mesh = TriMesh.concatenate(
            [box_mesh((1, 1, 1)), box_mesh((1, 1, 1), center=(5.0, 0.0, 0.0))]
        )
        bvh = build_bvh(mesh, leaf_size=4)
        assert np.allclose(bvh.nodes_min[0], [-0.5, -0.5, -0.5])
        assert np.allclose(bvh.nodes_max[0], [5.5, 0.5, 0.5])

    def test_leaves_partition_triangles(self, rng):
        mesh = random_soup(rng, 300)
        bvh = build_bvh(mesh)
        leaves = np.nonzero(bvh.left < 0)[0]
        seen = np.concatenate([bvh.order[bvh.start[i] : bvh.start[i] + bvh.count[i]] for i in leaves])
        assert sorted(seen.tolist()) == list(range(300))
        for i in leaves:
            sel = bvh.order[bvh.start[i] : bvh.start[i] + bvh.count[i]]
            assert np.all(bvh.tris[sel].min(axis=(0, 1)) >= bvh.nodes_min[i] - 1e-12)
            assert np.all(bvh.tris[sel].max(axis=(0, 1)) <= bvh.nodes_max[i] + 1e-12)

    def test_empty_mesh_rejected(self):
        with pytest.raises(ValueError, match="empty geometry"):
            build_bvh(TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int)))


class TestContactEquivalence:
    def test_matches_brute_randomized(self):
        failures = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            na = int(rng.integers(8, 120))
            nb = int(rng.integers(8, 120))
            a = random_soup(rng, na)
            b = random_soup(rng, nb, offset=rng.uniform(-1.5, 1.5, 3))
            brute = count_contacts_brute(a, b)
            accel = bvh_contact_count(a, b)
            if brute != accel:
                failures.append((seed, brute, accel))
        assert not failures, failures

    def test_matches_brute_large(self):
        rng = np.random.default_rng(7)
        a = random_soup(rng, 1100, scale=3.0)
        b = random_soup(rng, 900, scale=3.0, offset=(0.5, -0.25, 0.1))
        assert bvh_contact_count(a, b) == count_contacts_brute(a, b)

    def test_touching_cubes_not_pruned(self):
        a = box_mesh((1, 1, 1))
        b = box_mesh((1, 1, 1), center=(1.0, 0.0, 0.0))  # faces exactly touching
        brute = count_contacts_brute(a, b)
        assert brute > 0
        assert bvh_contact_count(a, b) == brute
        assert count_contacts(a, b) == brute

    def test_public_entry_uses_equal_paths(self, rng):
        a = random_soup(rng, 90, scale=1.0)
        b = random_soup(rng, 80, scale=1.0)
        assert count_contacts(a, b, accel=True) == count_contacts(a, b, accel=False)


class TestRayEquivalence:
    def test_matches_brute_on_random_mesh(self):
        rng = np.random.default_rng(42)
        mesh = random_soup(rng, 1000, scale=2.5)
        bvh = build_bvh(mesh)
        origins = rng.uniform(-4, 4, size=(100, 3))
        directions = rng.normal(size=(100, 3))
        bt, btri = brute_nearest_hits(mesh, origins, directions)
        t, tri = ray_nearest_hits(bvh, origins, directions)
        assert np.array_equal(tri, btri)
        hit = tri >= 0
        assert np.allclose(t[hit], bt[hit], rtol=0, atol=0)

    def test_axis_aligned_rays_and_misses(self):
        mesh = box_mesh((2, 2, 2))
        bvh = build_bvh(mesh, leaf_size=2)
        origins = np.array([[0.0, 0.0, 5.0], [0.0, 0.0, 5.0], [5.0, 5.0, 5.0]])
        directions = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        t, tri = ray_nearest_hits(bvh, origins, directions)
        assert t[0] == pytest.approx(4.0)
        assert tri[0] >= 0
        assert tri[1] == -1 and tri[2] == -1

    def test_tie_break_prefers_lower_index(self):
        # two stacked copies of the same quad, ray hits the shared plane
        quad = TriMesh(
            np.array([[-1.0, -1, 0], [1, -1, 0], [1, 1, 0], [-1, 1, 0]]),
            np.array([[0, 1, 2], [0, 2, 3]]),
        )
        mesh = TriMesh.concatenate([quad, quad])
        bvh = build_bvh(mesh, leaf_size=1)
        t, tri = ray_nearest_hits(bvh, np.array([[0.25, 0.1, 3.0]]), np.array([[0.0, 0.0, -1.0]]))
        assert t[0] == pytest.approx(3.0)
        assert tri[0] == 0

    def test_t_window(self):
        mesh = box_mesh((2, 2, 2))
        bvh = build_bvh(mesh)
        t, tri = ray_nearest_hits(
            bvh, np.array([[0.0, 0.0, 5.0]]), np.array([[0.0, 0.0, -1.0]]), t_min=4.5
        )
        assert t[0] == pytest.approx(6.0)  # near face skipped, far face found
        t2, tri2 = ray_nearest_hits(
            bvh, np.array([[0.0, 0.0, 5.0]]), np.array([[0.0, 0.0, -1.0]]), t_max=3.0
        )
        assert tri2[0] == -1
