"""Geodesic integration and distance solving.

Closed-form distance laws on the flat and hyperbolic models are exact
references. The two sinclair values were frozen from an independent
high-precision Clairaut quadrature (root-solving the swept angle in the
conserved quantity, no shared code with the ODE solver here).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from mangoldt.geodesic import PolarPoint, angle_at, distance, exp_map, integrate

# direct route (0.5, 0) -> (2.0, pi), mirror pair at +-phi
SINCLAIR_WAIST_D = 1.510788876966500965523
SINCLAIR_WAIST_PHI = 0.018740556415417092

# symmetric outward arc (0.85, 0) -> (0.85, 0.5), apocenter at t = 0.85335
SINCLAIR_EQUAL_D = 0.1675932180538631767


def plane_law(t1, t2, dth):
    return math.sqrt(t1 * t1 + t2 * t2 - 2.0 * t1 * t2 * math.cos(dth))


def hyperbolic_law(t1, t2, dth):
    c = math.cosh(t1) * math.cosh(t2) - math.sinh(t1) * math.sinh(t2) * math.cos(dth)
    return math.acosh(max(1.0, c))


class TestDistanceClosedForms:
    def test_plane_law_of_cosines(self, plane):
        for t1, t2, dth in [
            (1.0, 1.0, 1.0),
            (0.5, 3.0, 0.3),
            (2.0, 5.0, 2.8),
            (4.0, 4.0, math.pi / 2),
            (0.3, 7.5, 1.9),
        ]:
            res = distance(plane, (t1, 0.0), (t2, dth))
            assert res.length == pytest.approx(plane_law(t1, t2, dth), abs=1e-9)

    def test_hyperbolic_law_of_cosines(self, hyperbolic):
        for t1, t2, dth in [
            (0.7, 1.1, 0.8),
            (2.0, 3.0, 2.5),
            (1.5, 1.5, 3.0),
            (0.4, 3.8, 1.2),
        ]:
            res = distance(hyperbolic, (t1, 0.0), (t2, dth))
            assert res.length == pytest.approx(hyperbolic_law(t1, t2, dth), abs=1e-9)

    def test_angular_gap_reduction(self, plane):
        # gaps beyond pi and negative gaps fold back into [0, pi]
        d1 = distance(plane, (1.0, 0.0), (2.0, 1.1)).length
        d2 = distance(plane, (1.0, 0.0), (2.0, -1.1)).length
        d3 = distance(plane, (1.0, 0.0), (2.0, 2.0 * math.pi - 1.1)).length
        d4 = distance(plane, (1.0, 5.0), (2.0, 5.0 + 1.1)).length
        assert d1 == d2 == d3 == d4

    def test_swapped_endpoints_share_length(self, hyperbolic):
        a, b = (0.9, 0.2), (2.4, 2.1)
        assert distance(hyperbolic, a, b).length == distance(hyperbolic, b, a).length


class TestBoundaryLayers:
    """Targets pinned against the ends of the Clairaut range."""

    def test_near_antipodal(self, hyperbolic):
        for eps in (1e-3, 1e-5, 1e-7):
            dth = math.pi - eps
            res = distance(hyperbolic, (1.8733, 0.0), (2.5948, dth))
            assert res.length == pytest.approx(
                hyperbolic_law(1.8733, 2.5948, dth), abs=1e-9
            )

    def test_near_meridian(self, hyperbolic):
        for dth in (1e-3, 1e-5):
            res = distance(hyperbolic, (0.5, 0.0), (3.0, dth))
            assert res.length == pytest.approx(
                hyperbolic_law(0.5, 3.0, dth), abs=1e-10
            )

    def test_equal_radii_grazing(self, hyperbolic):
        # the minimizer's turning point sits a hair below the shared radius
        for dth in (1e-3, 0.5, 2.0):
            res = distance(hyperbolic, (2.0, 0.0), (2.0, dth))
            assert res.length == pytest.approx(
                hyperbolic_law(2.0, 2.0, dth), abs=1e-9
            )

    def test_equal_radii_parallel_snap(self, plane):
        res = distance(plane, (2.0, 1.0), (2.0, 1.0 + 1e-7))
        assert res.method == "parallel"
        assert res.length == pytest.approx(2.0 * 2.0 * math.sin(5e-8), rel=1e-12)
        assert res.error_bound is not None and res.error_bound < 1e-19

    def test_exact_antipode_through_pole(self, hyperbolic):
        res = distance(hyperbolic, (1.3, 0.0), (2.2, math.pi))
        assert res.length == pytest.approx(3.5, abs=1e-9)

    def test_pole_endpoint(self, sinclair):
        res = distance(sinclair, (0.0, 0.0), (1.7, 2.3))
        assert res.length == 1.7
        assert res.method == "meridian"

    def test_same_meridian(self, sinclair):
        res = distance(sinclair, (0.4, 1.0), (2.9, 1.0))
        assert res.length == 2.5
        assert res.method == "meridian"

    def test_thin_end_certificate(self, sinclair):
        res = distance(sinclair, (10.0, 0.0), (12.0, 2.0))
        assert res.method == "thin-end"
        assert res.length == 2.0
        assert res.error_bound < 1e-40


class TestSinclairFrozen:
    def test_waist_pair(self, sinclair):
        res = distance(sinclair, (0.5, 0.0), (2.0, math.pi))
        assert res.length == pytest.approx(SINCLAIR_WAIST_D, abs=1e-10)
        # antipodal target: the minimizer and its mirror tie
        assert res.multiplicity == 2
        phis = sorted(abs(p.phi0) for p in res.paths)
        assert phis[0] == pytest.approx(SINCLAIR_WAIST_PHI, abs=1e-10)
        assert phis[1] == pytest.approx(SINCLAIR_WAIST_PHI, abs=1e-10)

    def test_equal_radius_arc(self, sinclair):
        res = distance(sinclair, (0.85, 0.0), (0.85, 0.5))
        assert res.length == pytest.approx(SINCLAIR_EQUAL_D, abs=1e-10)
        # launched nearly tangent to the parallel, swinging outward
        assert abs(res.path.phi0) > 1.4


class TestIntegrate:
    def test_against_scipy(self, sinclair):
        t0, th0, phi = 0.7, 0.3, 1.2
        f0 = float(sinclair.f(t0))
        y0 = [t0, th0, math.cos(phi), math.sin(phi) / f0]

        def rhs(s, y):
            t, th, u, v = y
            fv = float(sinclair.f(t))
            dv = float(sinclair.df(t))
            return [u, v, fv * dv * v * v, -2.0 * dv / fv * u * v]

        ref = solve_ivp(rhs, (0.0, 8.0), y0, method="RK45", rtol=1e-12, atol=1e-14)
        path = integrate(sinclair, (t0, th0), phi, 8.0, rtol=1e-11)
        assert path.t[-1] == pytest.approx(ref.y[0, -1], abs=1e-7)
        assert path.theta[-1] == pytest.approx(ref.y[1, -1], abs=1e-7)

    def test_conserved_quantities(self, paraboloid):
        path = integrate(paraboloid, (1.5, 0.0), 0.9, 30.0, rtol=1e-9)
        assert path.nu_drift < 1e-7
        assert path.speed_drift < 1e-7

    def test_meridian_launch(self, hyperbolic):
        path = integrate(hyperbolic, (2.0, 1.0), 0.0, 5.0)
        assert np.allclose(path.theta, 1.0)
        assert path.t[-1] == pytest.approx(7.0, abs=1e-9)

    def test_turning_points_recorded(self, sinclair):
        # trapped trajectory oscillates, so turning points accumulate
        path = integrate(sinclair, (0.7, 0.0), 1.2, 25.0, rtol=1e-9)
        assert len(path.turning_points) >= 2
        for s_star in path.turning_points:
            k = int(np.searchsorted(path.s, s_star))
            k = min(max(k, 1), len(path.s) - 1)
            assert min(abs(path.u[k - 1]), abs(path.u[k])) < 0.05

    def test_exp_map_wraps_theta(self, sinclair):
        path = integrate(sinclair, (0.7, 0.3), 1.2, 25.0, rtol=1e-9)
        p = exp_map(sinclair, (0.7, 0.3), 1.2, 25.0)
        assert p.t == pytest.approx(path.t[-1], abs=1e-12)
        assert math.cos(p.theta) == pytest.approx(math.cos(path.theta[-1]), abs=1e-9)
        assert math.sin(p.theta) == pytest.approx(math.sin(path.theta[-1]), abs=1e-9)


class TestPathContract:
    def test_endpoints_and_sampling(self, hyperbolic):
        a, b = (0.9, 0.2), (2.4, 2.1)
        res = distance(hyperbolic, a, b)
        path = res.path
        assert path.s[0] == 0.0
        assert path.s[-1] == pytest.approx(res.length, rel=1e-12)
        assert np.all(np.diff(path.s) > 0)
        assert (path.t[0], path.theta[0]) == pytest.approx(a, abs=1e-8)
        assert (path.t[-1], path.theta[-1]) == pytest.approx(b, abs=1e-8)
        # unit speed at the stored nodes
        fv = np.asarray(hyperbolic.f(path.t), dtype=float)
        speed = path.u**2 + (fv * path.v) ** 2
        assert np.max(np.abs(speed - 1.0)) < 1e-8

    def test_reversal_when_swapped(self, hyperbolic):
        a, b = (2.4, 2.1), (0.9, 0.2)  # larger radius first forces a swap
        path = distance(hyperbolic, a, b).path
        assert (path.t[0], path.theta[0]) == pytest.approx(a, abs=1e-8)
        assert (path.t[-1], path.theta[-1]) == pytest.approx(b, abs=1e-8)

    def test_upper_bound_hint_is_harmless(self, plane):
        d0 = distance(plane, (1.0, 0.0), (2.0, 1.1)).length
        d1 = distance(plane, (1.0, 0.0), (2.0, 1.1), upper_bound=d0 * 1.0001).length
        assert d1 == pytest.approx(d0, abs=1e-12)

    def test_polar_point_type(self, plane):
        res = distance(plane, PolarPoint(1.0, 0.0), PolarPoint(2.0, 1.1))
        assert res.length == pytest.approx(plane_law(1.0, 2.0, 1.1), abs=1e-9)


class TestAngleAt:
    def test_plane_triangle_angle_sum(self, plane):
        A, B, C = (1.0, 0.0), (2.0, 1.2), (1.5, 2.4)
        ab = distance(plane, A, B).path
        bc = distance(plane, B, C).path
        ca = distance(plane, C, A).path
        total = (
            angle_at(plane, A, ab, ca)
            + angle_at(plane, B, ab, bc)
            + angle_at(plane, C, bc, ca)
        )
        assert total == pytest.approx(math.pi, abs=1e-9)

    def test_hyperbolic_vertex_angle(self, hyperbolic):
        t1, t2, dth = 1.3, 2.1, 1.7
        a = hyperbolic_law(t1, t2, dth)
        to_b = distance(hyperbolic, (t1, 0.0), (t2, dth)).path
        to_pole = distance(hyperbolic, (t1, 0.0), (0.0, 0.0)).path
        got = angle_at(hyperbolic, (t1, 0.0), to_b, to_pole)
        want = math.acos(
            (math.cosh(t1) * math.cosh(a) - math.cosh(t2))
            / (math.sinh(t1) * math.sinh(a))
        )
        assert got == pytest.approx(want, abs=1e-9)

    def test_angle_at_pole(self, plane):
        pa = distance(plane, (0.0, 0.0), (1.0, 0.7)).path
        pb = distance(plane, (0.0, 0.0), (1.0, 2.0)).path
        assert angle_at(plane, (0.0, 0.0), pa, pb) == pytest.approx(1.3, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(
    t1=st.floats(0.3, 6.0),
    t2=st.floats(0.3, 6.0),
    dth=st.floats(0.0, 2.0 * math.pi),
)
def test_plane_distance_matches_law(plane, t1, t2, dth):
    res = distance(plane, (t1, 0.0), (t2, dth))
    gap = math.fmod(dth, 2.0 * math.pi)
    gap = min(gap, 2.0 * math.pi - gap)
    assert res.length == pytest.approx(plane_law(t1, t2, gap), abs=1e-8)


@settings(max_examples=8, deadline=None)
@given(
    ta=st.floats(0.4, 2.6),
    tb=st.floats(0.4, 2.6),
    tc=st.floats(0.4, 2.6),
    tha=st.floats(0.0, 6.0),
    thb=st.floats(0.0, 6.0),
    thc=st.floats(0.0, 6.0),
)
def test_sinclair_triangle_inequality(sinclair, ta, tb, tc, tha, thb, thc):
    A, B, C = (ta, tha), (tb, thb), (tc, thc)
    ab = distance(sinclair, A, B).length
    bc = distance(sinclair, B, C).length
    ca = distance(sinclair, C, A).length
    assert ab <= bc + ca + 1e-8
    assert bc <= ca + ab + 1e-8
    assert ca <= ab + bc + 1e-8
