"""Mesh container, primitives, file ingestion, and map export formats."""

from __future__ import annotations

import numpy as np
import pytest

from gradeforge.geometry.io import (
    load_mesh,
    load_obj,
    load_pgm,
    load_polygon_txt,
    load_stl,
    save_pgm,
    save_polygon_txt,
    save_stl,
)
from gradeforge.geometry.mesh import TriMesh, box_mesh, cylinder_mesh, ellipsoid_mesh, sphere_mesh
from gradeforge.geometry.pose import Pose


def euler_characteristic(mesh: TriMesh) -> int:
    f = mesh.num_triangles
    edges = set()
    for tri in mesh.triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edges.add((min(a, b), max(a, b)))
    return len(np.unique(mesh.triangles)) - len(edges) + f


class TestPrimitives:
    @pytest.mark.parametrize(
        "mesh",
        [box_mesh(), cylinder_mesh(), sphere_mesh(), ellipsoid_mesh((0.3, 0.2, 0.9))],
        ids=["box", "cylinder", "sphere", "ellipsoid"],
    )
    def test_valid_and_closed(self, mesh):
        mesh.validate()
        assert euler_characteristic(mesh) == 2  # closed surface, genus 0

    def test_box_bounds(self):
        lo, hi = box_mesh((2, 4, 6), center=(1, 0, -1)).bounds()
        assert np.allclose(lo, [0, -2, -4])
        assert np.allclose(hi, [2, 2, 2])

    def test_transform_round_trip(self):
        mesh = sphere_mesh(0.4, center=(0.1, 0.2, 0.3))
        pose = Pose.from_xyz_rpy(1.0, -2.0, 0.5, 0.3, -0.2, 1.1)
        back = mesh.transformed(pose).transformed(pose.inverse())
        assert np.allclose(back.vertices, mesh.vertices, atol=1e-12)

    def test_validate_rejects_bad_meshes(self):
        with pytest.raises(ValueError):
            TriMesh(np.array([[0.0, 0, 0]]), np.array([[0, 0, 1]])).validate()
        with pytest.raises(ValueError):
            TriMesh(np.array([[np.nan, 0, 0], [1, 0, 0], [0, 1, 0]]), np.array([[0, 1, 2]])).validate()
        with pytest.raises(ValueError):
            TriMesh(np.zeros((3, 3)), np.array([[0, 1, 2]]), instance_id=-1).validate()
        with pytest.raises(ValueError):
            TriMesh(np.zeros((3, 3)), np.array([[0, 1, 2]]), semantic_label="tree").validate()


class TestStl:
    def test_binary_round_trip(self, tmp_path):
        mesh = cylinder_mesh(0.3, 1.2, segments=10)
        path = tmp_path / "cyl.stl"
        save_stl(path, mesh)
        back = load_stl(path)
        assert back.num_triangles == mesh.num_triangles
        assert np.allclose(back.triangle_corners(), mesh.triangle_corners(), atol=1e-6)

    def test_ascii_parse(self, tmp_path):
        path = tmp_path / "tri.stl"
        path.write_text(
            "solid test\n"
            " facet normal 0 0 1\n"
            "  outer loop\n"
            "   vertex 0 0 0\n"
            "   vertex 1 0 0\n"
            "   vertex 0 1 0\n"
            "  endloop\n"
            " endfacet\n"
            "endsolid test\n"
        )
        mesh = load_stl(path)
        assert mesh.num_triangles == 1
        assert np.allclose(mesh.vertices, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])

    def test_truncated_binary_rejected(self, tmp_path):
        import struct

        path = tmp_path / "bad.stl"
        path.write_bytes(b"\0" * 80 + struct.pack("<I", 10) + b"\0" * 20)
        with pytest.raises(ValueError, match="truncated"):
            load_stl(path)

    def test_load_mesh_assigns_identity(self, tmp_path):
        path = tmp_path / "box.stl"
        save_stl(path, box_mesh())
        mesh = load_mesh(path, instance_id=7, semantic_label="environment")
        assert mesh.instance_id == 7
        assert mesh.semantic_label == "environment"


class TestObj:
    def test_quads_fan_triangulated(self, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        mesh = load_obj(path)
        assert mesh.num_triangles == 2
        assert np.array_equal(mesh.triangles, [[0, 1, 2], [0, 2, 3]])

    def test_negative_and_slash_indices(self, tmp_path):
        path = tmp_path / "neg.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1/1 -2/2/2 -1/3/3\n")
        mesh = load_obj(path)
        assert np.array_equal(mesh.triangles, [[0, 1, 2]])

    def test_unsupported_extension(self, tmp_path):
        path = tmp_path / "scene.ply"
        path.write_text("ply\n")
        with pytest.raises(ValueError, match="unsupported mesh format"):
            load_mesh(path)


class TestMapExports:
    def test_polygon_round_trip(self, tmp_path):
        poly = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 8.25], [0.0, 8.25]])
        path = tmp_path / "footprint.txt"
        save_polygon_txt(path, poly)
        assert np.array_equal(load_polygon_txt(path), poly)

    def test_pgm_round_trip(self, tmp_path):
        cells = np.array([[0, 255, 127], [255, 0, 127]], dtype=np.uint8)
        path = tmp_path / "map.pgm"
        save_pgm(path, cells)
        data = path.read_bytes()
        assert data.startswith(b"P5\n3 2\n255\n")
        assert np.array_equal(load_pgm(path), cells)
