"""Rays, ray mass, Busemann values, and the growth-estimate suite."""

import math

import pytest

from mangoldt.errors import DomainError
from mangoldt.geodesic import PolarPoint, distance, exp_map
from mangoldt.asymptotics import (
    MeridianRay,
    _mass_by_sampling,
    _probe_points,
    _side_boundary,
    asymptotic_direction,
    busemann_field,
    busemann_value,
    find_R_delta,
    gradient_alignment_check,
    is_ray,
    main_theorem_suite,
    ray_mass,
)


def _ang_close(a, b, tol):
    d = math.fmod(abs(a - b), 2.0 * math.pi)
    return min(d, 2.0 * math.pi - d) <= tol


class TestProbeWalker:
    """The quadrature walker against the Runge-Kutta exponential map.

    Two fully independent routes: the walker advances closed-form legs
    between turning points, exp_map integrates the geodesic equations.
    """

    @pytest.mark.parametrize(
        "name, q, phi, targets",
        [
            ("plane", (1.0, 0.3), 2.0, [0.5, 2.0, 5.0]),
            ("plane", (1.0, 0.0), 1.2, [0.7, 3.0]),
            ("paraboloid", (2.0, 0.0), 2.5, [1.0, 4.0, 9.0]),
            ("sinclair", (1.2, 0.0), 0.9, [1.0, 3.7]),
        ],
    )
    def test_matches_exp_map(self, request, name, q, phi, targets):
        model = request.getfixturevalue(name)
        pts = _probe_points(model, PolarPoint(*q), phi, targets)
        for s, pt in zip(targets, pts):
            ref = exp_map(model, q, phi, s)
            assert pt.t == pytest.approx(ref.t, abs=5e-7)
            assert _ang_close(pt.theta, ref.theta, 5e-6), (s, pt, ref)

    def test_trapped_period_shortcut(self, sinclair):
        # one call spanning many reflections against a call that walks
        # leg by leg to a moderate arclength: the whole-period jump must
        # land on the same orbit
        q = PolarPoint(1.2, 0.0)
        direct = _probe_points(sinclair, q, 0.9, [3.7])[0]
        jumped = _probe_points(sinclair, q, 0.9, [3.7, 25.0, 100.0])
        assert jumped[0].t == pytest.approx(direct.t, abs=1e-9)
        assert _ang_close(jumped[0].theta, direct.theta, 1e-9)
        # trapped forever: the orbit stays inside its annulus
        for pt in jumped:
            assert 0.0 < pt.t < 1.5

    def test_outward_meridian_exact(self, plane, sinclair):
        for model in (plane, sinclair):
            (pt,) = _probe_points(model, PolarPoint(1.0, 0.25), 0.0, [7.0])
            assert (pt.t, pt.theta) == (8.0, 0.25)

    def test_inward_meridian_through_pole(self, plane):
        (pt,) = _probe_points(plane, PolarPoint(1.0, 0.25), math.pi, [5.0])
        assert pt.t == pytest.approx(4.0, abs=0.0)
        assert pt.theta == pytest.approx(0.25 + math.pi, abs=1e-15)

    def test_targets_must_be_nonnegative(self, plane):
        with pytest.raises(DomainError):
            _probe_points(plane, PolarPoint(1.0, 0.0), 0.5, [-1.0])

    def test_pole_start_is_a_meridian(self, sinclair):
        (pt,) = _probe_points(sinclair, PolarPoint(0.0, 0.0), 1.1, [2.5])
        assert (pt.t, pt.theta) == (2.5, 1.1)


class TestIsRay:
    def test_plane_every_direction(self, plane):
        for phi in (0.0, 0.7, math.pi / 2, math.pi):
            rep = is_ray(plane, (1.0, 0.3), phi, 40.0)
            assert rep.is_ray, phi
            assert rep.worst_deficit <= 1e-6

    def test_hyperbolic_every_direction(self, hyperbolic):
        rep = is_ray(hyperbolic, (0.5, 0.0), 2.5, 15.0)
        assert rep.is_ray
        assert rep.worst_deficit <= 1e-6

    def test_outward_meridian_always(self, plane, sinclair, paraboloid):
        for model in (plane, sinclair, paraboloid):
            rep = is_ray(model, (2.0, 1.0), 0.0, 40.0)
            assert rep.is_ray
            assert rep.worst_deficit <= 1e-9

    def test_sinclair_inward_meridian_loses_twice_the_radius(self, sinclair):
        # past the pole the probe runs up the far side of the meridian
        # while the true distance goes around the thin horn: the deficit
        # saturates at exactly 2 t_q
        rep = is_ray(sinclair, (4.0, 0.0), math.pi, 50.0)
        assert not rep.is_ray
        assert rep.worst_deficit == pytest.approx(8.0, abs=1e-9)
        # near checkpoint: 6.25 of arc against a 1.75 crossing distance
        assert rep.deficits[0] == pytest.approx(4.5, abs=1e-6)

    def test_sinclair_trapped_direction(self, sinclair):
        rep = is_ray(sinclair, (2.0, 0.0), 2.8, 30.0)
        assert not rep.is_ray
        assert rep.worst_deficit > 20.0

    def test_epsilon_governs_the_verdict(self, sinclair):
        rep = is_ray(sinclair, (4.0, 0.0), math.pi, 50.0, epsilon=10.0)
        assert rep.is_ray and rep.epsilon == 10.0

    def test_default_epsilon(self, plane):
        rep = is_ray(plane, (3.0, 0.0), 0.0, 40.0)
        assert rep.epsilon == pytest.approx(1e-4 * 4.0)

    def test_short_horizon_rejected(self, plane):
        with pytest.raises(DomainError):
            is_ray(plane, (3.0, 0.0), 0.0, 39.0)


class TestRayMass:
    def test_pole_sees_everything(self, sinclair):
        rep = ray_mass(sinclair, (0.0, 0.0), 200.0)
        assert rep.mu == pytest.approx(2.0 * math.pi, abs=0.0)
        assert rep.boundary_angles == (math.pi, math.pi)
        assert rep.method == "bisection" and not rep.flagged

    def test_plane_full_circle(self, plane):
        rep = ray_mass(plane, (1.0, 0.3), 40.0)
        assert rep.mu == pytest.approx(2.0 * math.pi, abs=1e-12)
        assert not rep.flagged

    def test_sinclair_far_point_thin_arc(self, sinclair):
        rep = ray_mass(sinclair, (8.0, 0.0), 200.0)
        assert 0.0 < rep.mu < 0.01
        assert rep.method == "bisection" and not rep.flagged
        # mirror symmetry of the profile: the arc is even in phi
        b0, b1 = rep.boundary_angles
        assert abs(b0 - b1) <= 2e-3
        assert rep.mu == pytest.approx(b0 + b1, abs=0.0)

    def test_boundary_is_consistent_with_is_ray(self, sinclair):
        # the bisection resolves the boundary to 1e-3, so only probes
        # clear of that slack have a determined classification
        rep = ray_mass(sinclair, (8.0, 0.0), 200.0)
        outside = rep.boundary_angles[0] + 2e-3
        assert not is_ray(sinclair, (8.0, 0.0), outside, 200.0).is_ray


class TestMassSampling:
    """The fallback estimator, driven by synthetic classifiers."""

    def test_single_arc(self):
        mu, bounds, flagged = _mass_by_sampling(
            lambda phi: abs(phi) <= 0.5, 512
        )
        assert mu == pytest.approx(1.0, abs=0.03)
        assert bounds[0] == pytest.approx(0.5, abs=0.03)
        assert bounds[1] == pytest.approx(0.5, abs=0.03)
        assert not flagged

    def test_two_arcs_are_flagged(self):
        mu, _bounds, flagged = _mass_by_sampling(
            lambda phi: abs(phi) <= 0.3 or abs(phi - 2.0) <= 0.2, 512
        )
        assert flagged
        assert mu == pytest.approx(1.0, abs=0.05)

    def test_full_circle(self):
        mu, bounds, flagged = _mass_by_sampling(lambda phi: True, 512)
        assert mu == pytest.approx(2.0 * math.pi, abs=1e-12)
        assert bounds == (math.pi, math.pi)
        assert not flagged

    def test_meridian_not_a_ray_is_flagged(self):
        _mu, _bounds, flagged = _mass_by_sampling(
            lambda phi: abs(phi - math.pi / 2) <= 0.1, 512
        )
        assert flagged

    def test_side_boundary_non_monotone_fan(self):
        assert _side_boundary(
            lambda phi: phi <= 0.4 or phi >= 2.75, 1.0
        ) is None

    def test_side_boundary_bisects(self):
        b = _side_boundary(lambda phi: abs(phi) <= 0.9, 1.0)
        assert b == pytest.approx(0.9, abs=1e-3)


class TestFindRDelta:
    def test_needs_excess_curvature(self, plane, hyperbolic):
        for model in (plane, hyperbolic):
            with pytest.raises(DomainError):
                find_R_delta(model, [2.0, 4.0], 100.0)

    def test_sinclair_scan(self, sinclair):
        R, delta = find_R_delta(sinclair, [8.0, 16.0], 200.0)
        assert R == 8.0
        assert 1.5 < delta < math.pi / 2

    def test_radii_must_be_positive(self, sinclair):
        with pytest.raises(DomainError):
            find_R_delta(sinclair, [0.0, 8.0], 200.0)


class TestBusemann:
    def test_plane_closed_form(self, plane):
        # F(r, theta) = r cos theta for the ray along theta = 0; the
        # horizon truncation error is r^2 sin^2(theta) / (2 T)
        for theta in (0.3, 1.2, 2.0):
            val = busemann_value(plane, (0.0, 0.0), (1.0, theta), 1000.0)
            assert float(val) == pytest.approx(math.cos(theta), abs=1e-3)
            assert val.convergence <= 5e-4

    def test_on_ray_value_is_arclength(self, plane, sinclair):
        for model in (plane, sinclair):
            val = busemann_value(model, (1.0, 0.7), (3.0, 0.7), 100.0)
            assert float(val) == pytest.approx(2.0, abs=1e-9)
            assert val.convergence <= 1e-9

    def test_lipschitz_one(self, plane, sinclair):
        pairs = [
            (plane, (1.0, 0.2), (0.7, 1.0), 500.0),
            (plane, (1.3, 2.2), (0.4, 0.1), 500.0),
            (sinclair, (8.0, 0.3), (9.0, 2.0), 200.0),
            (sinclair, (12.0, 0.0), (8.0, 3.14), 200.0),
        ]
        for model, x, y, T in pairs:
            fx = busemann_value(model, (0.0, 0.0), x, T)
            fy = busemann_value(model, (0.0, 0.0), y, T)
            d = distance(model, x, y).length
            assert abs(float(fx) - float(fy)) <= d + 1e-9

    def test_horizon_monotone(self, plane):
        lo = busemann_value(plane, (0.0, 0.0), (1.0, 1.2), 500.0)
        hi = busemann_value(plane, (0.0, 0.0), (1.0, 1.2), 1000.0)
        assert float(hi) >= float(lo) - 1e-9

    def test_additive_along_the_base_ray(self, plane):
        # shifting the origin s0 up its own ray lowers every value by s0
        x = (1.0, 0.7)
        f0 = busemann_value(plane, (0.0, 0.0), x, 1000.0)
        for s0 in (0.5, 1.0, 2.0):
            fs = busemann_value(plane, (s0, 0.0), x, 1000.0)
            tol = 2.0 * (f0.convergence + fs.convergence) + 1e-9
            assert abs(float(f0) - (float(fs) + s0)) <= tol

    def test_short_horizon_rejected(self, plane):
        with pytest.raises(DomainError):
            busemann_value(plane, (0.0, 0.0), (2.0, 0.4), 29.0)

    def test_ray_parameter_nonnegative(self):
        with pytest.raises(DomainError):
            MeridianRay(PolarPoint(1.0, 0.0))(-0.5)

    def test_field_bundles_values_and_directions(self, plane):
        pts = [PolarPoint(0.0, 0.0), PolarPoint(1.0, 0.4)]
        field = busemann_field(plane, (0.0, 0.0), pts, 200.0)
        assert field.ray(2.5) == PolarPoint(2.5, 0.0)
        val, direction = field.samples[pts[0]]
        assert float(val) == pytest.approx(0.0, abs=1e-9)
        assert float(direction) == 0.0 and direction.drift == 0.0
        val, direction = field.samples[pts[1]]
        assert float(val) == pytest.approx(math.cos(0.4), abs=5e-3)
        assert direction.stable


class TestAsymptoticDirection:
    def test_on_ray_continues_radially(self, plane, sinclair):
        for model in (plane, sinclair):
            d = asymptotic_direction(model, (0.0, 0.0), (2.0, 0.0), 100.0)
            assert float(d) == 0.0
            assert d.drift == 0.0 and d.stable

    def test_plane_sideways_point(self, plane):
        # from (1, pi/2) the segment toward (T, 0) starts just past the
        # -pi/2 parallel direction, tilted inward by about 1/T
        d = asymptotic_direction(plane, (0.0, 0.0), (1.0, math.pi / 2), 1000.0)
        assert float(d) == pytest.approx(-(math.pi / 2 + 1e-3), abs=2e-4)
        assert d.stable

    def test_mirror_antisymmetry(self, plane):
        up = asymptotic_direction(plane, (0.0, 0.0), (1.0, math.pi / 2), 1000.0)
        dn = asymptotic_direction(plane, (0.0, 0.0), (1.0, -math.pi / 2), 1000.0)
        assert float(up) == pytest.approx(-float(dn), abs=1e-7)

    def test_sinclair_far_point_is_radial(self, sinclair):
        d = asymptotic_direction(sinclair, (0.0, 0.0), (8.0, 2.0), 200.0)
        assert float(d) == 0.0 and d.drift == 0.0

    def test_sinclair_opposite_meridian_stable(self, sinclair):
        d = asymptotic_direction(sinclair, (0.0, 0.0), (3.0, math.pi), 100.0)
        assert d.stable
        assert abs(float(d)) <= 1e-6


class TestGradientAlignment:
    def test_plane(self, plane):
        rep = gradient_alignment_check(plane, (0.0, 0.0), (1.0, 0.4), 500.0)
        assert not rep.skipped and rep.passed
        assert rep.norm == pytest.approx(1.0, abs=5e-3)
        assert rep.angle_error <= 5e-3

    def test_sinclair_far_point_exact(self, sinclair):
        rep = gradient_alignment_check(sinclair, (0.0, 0.0), (6.0, 1.2), 100.0)
        assert rep.passed
        assert rep.norm == pytest.approx(1.0, abs=1e-9)
        assert rep.angle_error <= 1e-9

    def test_pole_frame_is_singular(self, plane):
        with pytest.raises(DomainError):
            gradient_alignment_check(plane, (0.0, 0.0), (0.0, 0.0), 500.0)

    def test_step_must_fit(self, plane):
        with pytest.raises(DomainError):
            gradient_alignment_check(
                plane, (0.0, 0.0), (1.0, 0.4), 500.0, step=1.0
            )
        with pytest.raises(DomainError):
            gradient_alignment_check(
                plane, (0.0, 0.0), (1.0, 0.4), 500.0, step=-0.1
            )


class TestMainTheoremSuite:
    def test_sinclair(self, sinclair):
        rep = main_theorem_suite(
            sinclair,
            200.0,
            [(8.0, 0.0), (8.0, 2.0), (16.0, 1.0), (16.0, 2.5)],
            levels=(1.0, 2.0),
        )
        assert rep.R == 8.0
        assert 1.5 < rep.delta < math.pi / 2
        assert rep.critical_candidates == ()
        # the thin horn pins F(t, theta) = t, so N_R is the radius itself
        assert rep.N_R == pytest.approx(8.0, abs=1e-9)
        assert set(rep.sublevel_bound) == {1.0, 2.0}
        assert rep.sublevel_bound[2.0] == pytest.approx(2.0, abs=1e-3)
        assert len(rep.mass_scan) == 2
        for _p, ang in rep.certificate_angles:
            assert ang <= 0.5 * math.pi - rep.delta + 1e-3

    def test_mu_below_pi_minus_two_delta_beyond_R(self, sinclair):
        rep = main_theorem_suite(
            sinclair, 200.0, [(8.0, 0.0), (16.0, 1.0)], levels=(1.0,)
        )
        for r, mu in rep.mass_scan:
            if r >= rep.R:
                assert mu <= math.pi - 2.0 * rep.delta + 1e-12

    def test_empty_grid_rejected(self, sinclair):
        with pytest.raises(DomainError):
            main_theorem_suite(sinclair, 200.0, [])

    def test_plane_not_applicable(self, plane):
        with pytest.raises(DomainError):
            main_theorem_suite(plane, 200.0, [(2.0, 0.0)])
