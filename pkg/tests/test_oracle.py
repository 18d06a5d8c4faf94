"""Mesh oracle: build contract, snapping, bounds, refinement."""

import math

import numpy as np
import pytest

from mangoldt.errors import DomainError
from mangoldt.geodesic import PolarPoint, distance
from mangoldt.oracle import build_mesh, dijkstra_distance, refine_mesh


def plane_law(t1, t2, dth):
    return math.sqrt(t1 * t1 + t2 * t2 - 2.0 * t1 * t2 * math.cos(dth))


class TestBuild:
    def test_vertex_count(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        assert mesh.n_vertices == 81  # pole + 10 rings x 8

    def test_rings_exclude_pole_knot(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        assert mesh.rings.size == 10
        assert mesh.rings[0] > 0.0
        assert mesh.rings[-1] == 10.0

    def test_degenerate_angular_resolution_rejected(self, plane):
        with pytest.raises(DomainError):
            build_mesh(plane, 10.0, 11, 2)

    def test_too_few_knots_rejected(self, plane):
        with pytest.raises(DomainError):
            build_mesh(plane, 10.0, 1, 8)

    def test_bad_t_max_rejected(self, plane):
        with pytest.raises(DomainError):
            build_mesh(plane, 0.0, 11, 8)

    def test_edge_weights_positive(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        assert np.all(mesh.graph.data > 0.0)

    def test_acceptance_resolution_builds(self, sinclair):
        mesh = build_mesh(sinclair, 10.0, 2000, 512)
        assert mesh.n_vertices == 1 + 1999 * 512


class TestSnap:
    def test_vertex_point_roundtrip(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        idx, snapped, tol = mesh.snap(mesh.vertex_point(37))
        assert idx == 37
        assert tol == 0.0

    def test_tolerance_reported(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        d = dijkstra_distance(mesh, PolarPoint(3.4, 0.1), PolarPoint(7.1, 2.0))
        # snap moves at most half a cell in each coordinate
        dth = 2.0 * math.pi / 8
        assert 0.0 < d.snap_tolerance <= 2 * (0.5 + 7.2 * dth / 2)
        assert abs(d.snap_a.t - 3.4) <= 0.5 + 1e-12
        assert abs(d.snap_b.t - 7.1) <= 0.5 + 1e-12

    def test_near_axis_point_snaps_to_pole(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        idx, snapped, tol = mesh.snap(PolarPoint(0.05, 2.0))
        assert idx == 0
        assert tol == pytest.approx(0.05)


class TestDistance:
    def test_pole_to_ring_is_meridian_sum(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        d = dijkstra_distance(mesh, PolarPoint(0.0, 0.0), PolarPoint(5.0, 1.3))
        assert float(d) == 5.0
        assert d.graph_length == 5.0

    def test_identical_snaps_give_zero(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        d = dijkstra_distance(mesh, PolarPoint(3.01, 0.0), PolarPoint(2.99, 0.01))
        assert float(d) == 0.0

    def test_plane_pair_within_two_percent(self, plane):
        # target 5 by the law of cosines; the raw lattice value misses by
        # several percent, the straightened value by ~1e-6
        mesh = build_mesh(plane, 10.0, 500, 256)
        d = dijkstra_distance(mesh, PolarPoint(3.0, 0.0), PolarPoint(4.0, math.pi / 2))
        gap = abs(d.snap_b.theta - d.snap_a.theta)
        exact = plane_law(d.snap_a.t, d.snap_b.t, min(gap, 2 * math.pi - gap))
        assert abs(float(d) / exact - 1.0) <= 2e-2
        assert abs(float(d) / exact - 1.0) <= 1e-4
        assert float(d) >= exact - 1e-12

    def test_plane_random_pairs_certified(self, plane):
        mesh = build_mesh(plane, 10.0, 500, 256)
        rng = np.random.default_rng(11)
        for _ in range(4):
            a = PolarPoint(rng.uniform(0.5, 9.5), rng.uniform(0.0, 2 * math.pi))
            b = PolarPoint(rng.uniform(0.5, 9.5), rng.uniform(0.0, 2 * math.pi))
            d = dijkstra_distance(mesh, a, b)
            gap = abs(d.snap_b.theta - d.snap_a.theta)
            exact = plane_law(d.snap_a.t, d.snap_b.t, min(gap, 2 * math.pi - gap))
            assert float(d) >= exact - 1e-12
            assert float(d) <= exact * (1.0 + 1e-2)

    def test_near_antipodal_does_not_undershoot(self, plane):
        mesh = build_mesh(plane, 10.0, 500, 256)
        d = dijkstra_distance(mesh, PolarPoint(2.0, 0.1), PolarPoint(2.0, 0.1 + math.pi - 0.01))
        gap = abs(d.snap_b.theta - d.snap_a.theta)
        exact = plane_law(d.snap_a.t, d.snap_b.t, min(gap, 2 * math.pi - gap))
        assert exact - 1e-12 <= float(d) <= exact * (1.0 + 1e-2)
        # the two-meridian route caps the value as well
        assert float(d) <= d.snap_a.t + d.snap_b.t + 1e-12

    def test_raw_graph_length_rides_along(self, plane):
        mesh = build_mesh(plane, 10.0, 500, 256)
        d = dijkstra_distance(mesh, PolarPoint(3.0, 0.0), PolarPoint(8.0, 1.0))
        assert d.graph_length >= float(d) * (1.0 - 1e-5)
        assert d.graph_length < float(d) * 1.2


class TestAgainstShooting:
    def test_oracle_upper_bounds_shooting(self, paraboloid):
        mesh = build_mesh(paraboloid, 10.0, 500, 256)
        rng = np.random.default_rng(7)
        for _ in range(4):
            a = PolarPoint(rng.uniform(0.3, 9.5), rng.uniform(0.0, 2 * math.pi))
            b = PolarPoint(rng.uniform(0.3, 9.5), rng.uniform(0.0, 2 * math.pi))
            d = dijkstra_distance(mesh, a, b)
            ref = distance(paraboloid, d.snap_a, d.snap_b).length
            assert float(d) >= ref - 1e-9
            assert float(d) / ref - 1.0 <= 1e-2

    def test_horn_pairs_collapse_to_meridian_gap(self, sinclair):
        # beyond the waist f underflows the twist cost; both routes must
        # agree on |t2 - t1| to full precision
        mesh = build_mesh(sinclair, 10.0, 500, 256)
        d = dijkstra_distance(mesh, PolarPoint(6.0, 4.9), PolarPoint(8.5, 1.4))
        ref = distance(sinclair, d.snap_a, d.snap_b).length
        assert float(d) == pytest.approx(ref, rel=1e-12)
        assert float(d) == pytest.approx(d.snap_b.t - d.snap_a.t, rel=1e-12)


class TestRefinement:
    def test_nested_doubling_never_increases(self, plane):
        mesh = build_mesh(plane, 10.0, 60, 48)
        fine = refine_mesh(mesh)
        assert fine.n_t == 119 and fine.n_theta == 96
        pairs = [(5, 12, 40, 30), (1, 0, 58, 47), (20, 7, 21, 8)]
        for i1, j1, i2, j2 in pairs:
            a = mesh.vertex_point(1 + i1 * 48 + j1)
            b = mesh.vertex_point(1 + i2 * 48 + j2)
            coarse = dijkstra_distance(mesh, a, b)
            refined = dijkstra_distance(fine, a, b)
            assert float(refined) <= float(coarse) + 1e-12
            assert refined.graph_length <= coarse.graph_length + 1e-12
            # parent knots survive bitwise, so the snap does not move
            assert refined.snap_a == coarse.snap_a
            assert refined.snap_b == coarse.snap_b

    def test_refined_mesh_keeps_parent_paths(self, plane):
        mesh = build_mesh(plane, 10.0, 11, 8)
        fine = refine_mesh(mesh)
        assert fine.n_vertices == 1 + 20 * 16
        assert np.all(fine.graph.data > 0.0)
