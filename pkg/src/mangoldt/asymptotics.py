"""Rays, mass of rays, Busemann functions, and growth estimates.

Ray probes are horizon-truncated: a direction is accepted when the
deficit s - d(q, gamma(s)) stays below tolerance at checkpoints up to
the horizon. The probe geodesics themselves cannot be advanced by a
stepper once they dive down a thin end (at a turning point the angular
velocity reaches 1/f, which overflows long before the profile
underflows), so propagation here integrates the Clairaut reduction over
monotone radial legs: turning radii are barrier roots of f = nu, each
leg's arclength and swept angle are quadratures with the sqrt
singularity removed by substitution, and a trapped probe advances whole
reflection periods at once. Swept angle at a thin-end reflection is
astronomically large; theta is then meaningless modulo 2 pi, which
perturbs the reported deficit by at most pi * max f, far below the
deficits such probes produce.

Busemann base rays are meridians from a chosen origin, so gamma(T) is
exactly representable and every Busemann evaluation is one distance
solve. Asymptotic directions come from the tangent of the realizing
geodesic toward gamma(T), checked for stability against the doubled
horizon.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import (
    DomainError,
    InconsistencyError,
    NoConvergenceError,
)
from .geodesic import PolarPoint, _as_point, distance
from .profile import total_curvature

__all__ = [
    "MeridianRay",
    "RayProbe",
    "RayMassReport",
    "BusemannValue",
    "BusemannField",
    "AsymptoticDirection",
    "GradientAlignment",
    "MainTheoremReport",
    "is_ray",
    "ray_mass",
    "find_R_delta",
    "busemann_value",
    "busemann_field",
    "asymptotic_direction",
    "gradient_alignment_check",
    "main_theorem_suite",
]

TWO_PI = 2.0 * math.pi

# checkpoint arclengths as fractions of the horizon
CHECKPOINTS = (0.125, 0.25, 0.5, 1.0)

# ray-arc boundary is bisected to this angular width
BOUNDARY_RESOLUTION = 1e-3

# fallback direction count when the arc structure fails its audit
SAMPLING_N = 512

# asymptotic directions: agreement across doubled horizon
STABLE_DRIFT = 1e-3
UNSTABLE_DRIFT = 1e-2

# slack granted to the growth and certificate inequalities
CERT_TOL = 1e-3

_QUAD_OPTS = dict(limit=200, epsabs=1e-13, epsrel=1e-11)


def _wrap(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi > math.pi:
        phi -= TWO_PI
    elif phi <= -math.pi:
        phi += TWO_PI
    return phi


def _quad(fun, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(fun, a, b, **_QUAD_OPTS)
    return val


# ---------------------------------------------------------------------------
# Clairaut leg quadrature.
#
# Along a monotone radial leg the unit-speed equations reduce to
#   ds/dt     = f / sqrt(f^2 - nu^2)
#   dtheta/dt = nu / (f sqrt(f^2 - nu^2))
# with integrable 1/sqrt endpoints at turning radii. f^2 - nu^2 is
# always formed as (f - nu)(f + nu): both factors stay inside the float
# range on thin ends where the squares would not.

def _arccosh(r: float) -> float:
    if r > 1e8:
        return math.log(2.0 * r)
    return math.log(r + math.sqrt((r - 1.0) * (r + 1.0)))


def _leg_measure(model, nu: float, t_lo: float, t_hi: float,
                 sing_lo: bool, sing_hi: bool) -> tuple:
    """(arclength, swept angle) over [t_lo, t_hi], both positive.

    sing_lo / sing_hi mark turning endpoints (f = nu there). The inner
    turn is parametrized by t = t_lo cosh(psi), which compresses the
    hundreds of decades between a near-pole turn and the far end into a
    psi range of a few hundred; the outer turn by t = t_hi - w^2.
    """
    if not t_hi > t_lo:
        return 0.0, 0.0

    def fval(t):
        return float(model.f(t))

    def parts(t):
        f = fval(t)
        g2 = (f - nu) * (f + nu)
        return f, g2

    def corr(t):
        # ds/dt - 1 = nu^2 / (sqrt(g2) (f + sqrt(g2))), cancellation-free
        f, g2 = parts(t)
        if g2 <= 0.0:
            return math.inf
        r = math.sqrt(g2)
        return nu * nu / (r * (f + r))

    def gth(t):
        f, g2 = parts(t)
        if g2 <= 0.0:
            return math.inf
        return nu / (f * math.sqrt(g2))

    def outer(a, b):
        # singular at b
        fp = abs(float(model.df(b)))
        lim_s = math.sqrt(2.0 * nu / fp) if fp > 0.0 else 0.0
        lim_th = 2.0 / math.sqrt(2.0 * nu * fp) if fp > 0.0 else 0.0
        wb = math.sqrt(b - a)

        def s_int(w):
            c = corr(b - w * w)
            return lim_s if not math.isfinite(c * w) else 2.0 * w * c

        def th_int(w):
            g = gth(b - w * w)
            return lim_th if not math.isfinite(g * w) else 2.0 * w * g

        return _quad(s_int, 0.0, wb), _quad(th_int, 0.0, wb)

    def inner(a, b):
        # singular at a, near the pole
        fp = float(model.df(a))
        lim_s = math.sqrt(nu * a / fp) if fp > 0.0 else 0.0
        lim_th = math.sqrt(a / (nu * fp)) if fp > 0.0 else 0.0
        psi_b = _arccosh(b / a)

        def s_int(psi):
            t = a * math.cosh(psi)
            c = corr(t)
            jac = a * math.sinh(psi)
            return lim_s if not math.isfinite(c * jac) else c * jac

        def th_int(psi):
            t = a * math.cosh(psi)
            g = gth(t)
            jac = a * math.sinh(psi)
            return lim_th if not math.isfinite(g * jac) else g * jac

        return _quad(s_int, 0.0, psi_b), _quad(th_int, 0.0, psi_b)

    if sing_lo and sing_hi:
        mid = math.exp(0.5 * (math.log(t_lo) + math.log(t_hi)))
        s1, th1 = inner(t_lo, mid)
        s2, th2 = outer(mid, t_hi)
        s_corr, dth = s1 + s2, th1 + th2
    elif sing_hi:
        s_corr, dth = outer(t_lo, t_hi)
    elif sing_lo:
        s_corr, dth = inner(t_lo, t_hi)
    else:
        s_corr = _quad(corr, t_lo, t_hi)
        dth = _quad(gth, t_lo, t_hi)
    if not (math.isfinite(s_corr) and math.isfinite(dth)):
        raise NoConvergenceError(
            "leg quadrature left the float range; the profile square "
            "underflows on this span",
            {"nu": nu, "leg": (t_lo, t_hi)},
        )
    return (t_hi - t_lo) + s_corr, dth


def _first_barrier(model, nu: float, t_a: float, direction: int,
                   reach: float) -> Optional[float]:
    """Smallest radius change in the travel direction where f drops to nu.

    None when f stays above nu over the whole reachable span (the leg
    then ends by exhausting arclength, not by turning). The profile has
    at most one interior maximum, so a 64-point scan brackets the first
    crossing reliably.
    """
    if direction > 0:
        hi = t_a + reach
        grid = [t_a + (hi - t_a) * k / 64.0 for k in range(1, 65)]
    else:
        lo = max(t_a - reach, 0.0)
        grid = [t_a - (t_a - lo) * k / 64.0 for k in range(1, 65)]
        if grid[-1] <= 0.0:
            grid[-1] = 1e-300
    prev = t_a
    for t in grid:
        f = float(model.f(t))
        if f <= nu:
            a, b = (prev, t) if prev < t else (t, prev)
            return float(brentq(lambda x: float(model.f(x)) - nu, a, b,
                                xtol=1e-280, rtol=1e-13, maxiter=300))
        prev = t
    if direction < 0:
        # inward travel always meets the pole barrier; the scan can only
        # miss it when the reach stops short
        return None
    return None


def _advance_in_leg(model, nu: float, t_a: float, direction: int,
                    s_need: float, barrier: Optional[float],
                    sing_start: bool) -> tuple:
    """Endpoint radius and swept angle after arclength s_need inside one
    leg known to contain it.

    With a turning point ahead the partial leg is measured as the full
    leg minus its tail, so the 1/sqrt endpoint always sits under a
    substitution no matter where t_end lands.
    """
    if barrier is not None:
        lo, hi = (t_a, barrier) if direction > 0 else (barrier, t_a)
        full = _leg_measure(model, nu, lo, hi,
                            sing_lo=(lo == barrier) or sing_start,
                            sing_hi=(hi == barrier) or sing_start)

        def span(t_end):
            if direction > 0:
                tail = _leg_measure(model, nu, t_end, barrier, False, True)
            else:
                tail = _leg_measure(model, nu, barrier, t_end, True, False)
            return full[0] - tail[0], full[1] - tail[1]

        def gap(t_end):
            return span(t_end)[0] - s_need

        if full[0] <= s_need:
            # the target sits at the turning point to quadrature precision
            return barrier, full[1]
        a, b = (t_a, barrier) if direction > 0 else (barrier, t_a)
    else:
        hi = t_a + s_need if direction > 0 else t_a
        lo = t_a if direction > 0 else max(t_a - s_need, 0.0)

        def span(t_end):
            if direction > 0:
                return _leg_measure(model, nu, t_a, t_end, sing_start, False)
            return _leg_measure(model, nu, t_end, t_a, False, sing_start)

        def gap(t_end):
            return span(t_end)[0] - s_need

        a, b = (lo, hi)
    t_end = float(brentq(gap, a, b, xtol=1e-280, rtol=5e-14, maxiter=300))
    return t_end, span(t_end)[1]


_MAX_LEGS = 100000


def _probe_points(model, q: PolarPoint, phi: float, targets) -> list:
    """Points of the unit-speed geodesic from q with angle phi, at the
    sorted arclengths in targets."""
    targets = sorted(float(s) for s in targets)
    if targets and targets[0] < 0.0:
        raise DomainError("arclength must be nonnegative")
    if q.t == 0.0:
        return [PolarPoint(s, phi) for s in targets]

    f0 = float(model.f(q.t))
    phi = _wrap(phi)
    nu = f0 * math.sin(phi)
    u0 = math.cos(phi)

    # Meridian fall-through only within ulp of the meridian directions
    # themselves (sin pi is ~1.2e-16, never exactly zero), or when nu
    # underflows outright. Any larger tilt is walked honestly: far down
    # a thin end every representable nonzero angle turns around, and
    # classifying it as a meridian would fake a ray.
    if nu == 0.0 or abs(math.sin(phi)) <= 1e-15:
        out = []
        for s in targets:
            if u0 >= 0.0:
                out.append(PolarPoint(q.t + s, q.theta))
            elif s <= q.t:
                out.append(PolarPoint(q.t - s, q.theta))
            else:
                out.append(PolarPoint(s - q.t, q.theta + math.pi))
        return out

    sgn_th = 1.0 if nu > 0.0 else -1.0
    nu_abs = abs(nu)
    df0 = float(model.df(q.t))
    if abs(u0) <= 1e-14:
        if abs(df0) <= 1e-12:
            # equilibrium parallel circle
            return [PolarPoint(q.t, q.theta + sgn_th * s / f0)
                    for s in targets]
        direction, sing_start = (1 if df0 > 0.0 else -1), True
    else:
        direction, sing_start = (1 if u0 > 0.0 else -1), False

    t_cur, th_cur, s_acc = q.t, q.theta, 0.0
    out = []
    half = None  # (S, dtheta) of one turn-to-turn leg, once trapped
    other_turn = None
    idx = 0
    for _ in range(_MAX_LEGS):
        if idx >= len(targets):
            return out
        reach = targets[-1] - s_acc + 1.0
        barrier = _first_barrier(model, nu_abs, t_cur, direction, reach)
        if barrier is not None:
            lo, hi = (t_cur, barrier) if direction > 0 else (barrier, t_cur)
            s_leg, dth_leg = _leg_measure(
                model, nu_abs, lo, hi,
                sing_lo=(lo == barrier) or sing_start,
                sing_hi=(hi == barrier) or sing_start,
            )
        else:
            s_leg, dth_leg = math.inf, math.inf

        while idx < len(targets) and targets[idx] <= s_acc + s_leg + 1e-15:
            s_need = targets[idx] - s_acc
            if s_need <= 1e-15:
                out.append(PolarPoint(max(t_cur, 0.0), th_cur))
            else:
                t_end, dth = _advance_in_leg(
                    model, nu_abs, t_cur, direction, s_need, barrier,
                    sing_start)
                out.append(PolarPoint(max(t_end, 0.0),
                                      th_cur + sgn_th * dth))
            idx += 1
        if idx >= len(targets):
            return out
        if barrier is None:
            raise InconsistencyError(
                "open leg failed to contain its remaining targets")

        s_acc += s_leg
        th_cur += sgn_th * dth_leg
        if sing_start:
            # the finished leg ran turn-to-turn: the probe is trapped in
            # the annulus [lo, hi] and every further leg repeats it
            half = (s_leg, dth_leg)
        other_turn, t_cur = t_cur, barrier
        direction, sing_start = -direction, True

        if half is not None:
            k = int((targets[idx] - s_acc) / half[0])
            if k > 0:
                s_acc += k * half[0]
                th_cur += sgn_th * k * half[1]
                if k % 2:
                    t_cur, other_turn = other_turn, t_cur
                    direction = -direction
    raise NoConvergenceError(
        "probe exceeded the reflection budget",
        {"q": (q.t, q.theta), "phi": phi, "targets": targets},
    )


# ---------------------------------------------------------------------------
# Rays and the mass of rays.


@dataclass(frozen=True)
class RayProbe:
    """Horizon-truncated ray test of one direction.

    worst_deficit is the largest s - d(q, gamma(s)) over the
    checkpoints; the direction is accepted as a ray when it stays
    within epsilon.
    """

    q: PolarPoint
    phi: float
    horizon: float
    epsilon: float
    is_ray: bool
    worst_deficit: float
    deficits: tuple


def _default_epsilon(q: PolarPoint) -> float:
    return 1e-4 * (1.0 + q.t)


def is_ray(model, q, phi: float, horizon: float,
           epsilon: Optional[float] = None) -> RayProbe:
    """Probe the geodesic from q at angle phi against the distance
    solver at checkpoints up to the horizon."""
    q = _as_point(q)
    horizon = float(horizon)
    if horizon < 10.0 * (1.0 + q.t):
        raise DomainError(
            f"horizon {horizon:.6g} is below 10 (1 + t_q) = "
            f"{10.0 * (1.0 + q.t):.6g}"
        )
    eps = _default_epsilon(q) if epsilon is None else float(epsilon)
    checks = [c * horizon for c in CHECKPOINTS]
    pts = _probe_points(model, q, float(phi), checks)
    deficits = []
    for s, pt in zip(checks, pts):
        # the probe curve itself certifies d <= s
        res = distance(model, q, pt, upper_bound=s * (1.0 + 1e-9) + 1e-12)
        deficits.append(s - res.length)
    worst = max(deficits)
    if worst < -1e-6:
        raise InconsistencyError(
            f"distance exceeds arclength by {-worst:.3e} at q = "
            f"({q.t:.6g}, {q.theta:.6g}), phi = {phi:.6g}"
        )
    return RayProbe(q, float(phi), horizon, eps, worst <= eps, worst,
                    tuple(deficits))


@dataclass(frozen=True)
class RayMassReport:
    """Arc measure of ray directions at q.

    method records how mu was measured: bisection of the two arc
    boundaries around the outward meridian, or uniform sampling when
    the arc structure failed its audit (flagged then marks a
    disconnected classification).
    """

    q: PolarPoint
    mu: float
    boundary_angles: tuple
    horizon: float
    method: str
    flagged: bool = False


def _side_boundary(classify, sign: float) -> Optional[float]:
    """Arc extent on one side of phi = 0, or None if the fan is not
    monotone (ray directions followed by a gap and more rays)."""
    fan = [sign * math.pi * k / 8.0 for k in range(1, 9)]
    flags = [classify(phi) for phi in fan]
    seen_false = False
    for fl in flags:
        if not fl:
            seen_false = True
        elif seen_false:
            return None
    if all(flags):
        return math.pi
    k = next(i for i, fl in enumerate(flags) if not fl)
    lo = 0.0 if k == 0 else abs(fan[k - 1])
    hi = abs(fan[k])
    while hi - lo > BOUNDARY_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if classify(sign * mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mass_by_sampling(classify, n: int) -> tuple:
    """(mu, boundary pair, flagged) from n uniform directions.

    The audit requires the accepted directions to form one cyclic arc;
    more than one block flags the report.
    """
    step = TWO_PI / n
    phis = [-math.pi + (j + 0.5) * step for j in range(n)]
    flags = [classify(phi) for phi in phis]
    count = sum(flags)
    blocks = sum(
        1 for j in range(n) if flags[j] and not flags[(j - 1) % n]
    )
    j0 = min(range(n), key=lambda j: abs(phis[j]))
    plus = 0
    while plus < n and flags[(j0 + plus) % n]:
        plus += 1
    minus = 0
    while minus < n and flags[(j0 - 1 - minus) % n]:
        minus += 1
    if plus >= n or minus >= n:
        bounds = (math.pi, math.pi)
    else:
        bounds = (abs(phis[j0]) + plus * step, abs(phis[j0]) + minus * step)
    # the full circle has no transitions at all, yet is one arc
    connected = blocks == 1 or count == n
    flagged = not connected or not flags[j0]
    return count * step, (min(bounds[0], math.pi), min(bounds[1], math.pi)), flagged


def ray_mass(model, q, horizon: float,
             epsilon: Optional[float] = None) -> RayMassReport:
    """Estimate mu(A_q), the measure of ray directions at q.

    The ray set is a connected arc containing the outward meridian, so
    the two boundaries are bisected; if the probe fan contradicts the
    arc structure the estimate falls back to uniform sampling with a
    connectivity audit.
    """
    q = _as_point(q)
    horizon = float(horizon)
    if q.t == 0.0:
        # every meridian from the pole realizes the distance
        return RayMassReport(q, TWO_PI, (math.pi, math.pi), horizon,
                             "bisection")

    cache = {}

    def classify(phi):
        key = round(phi, 12)
        if key not in cache:
            cache[key] = is_ray(model, q, phi, horizon, epsilon).is_ray
        return cache[key]

    if not classify(0.0):
        raise InconsistencyError(
            f"outward meridian at ({q.t:.6g}, {q.theta:.6g}) failed the "
            "ray probe; the deficit tolerance is inconsistent with the "
            "distance solver"
        )
    plus = _side_boundary(classify, 1.0)
    minus = _side_boundary(classify, -1.0)
    if plus is not None and minus is not None:
        mu = min(plus + minus, TWO_PI)
        return RayMassReport(q, mu, (plus, minus), horizon, "bisection")
    mu, bounds, flagged = _mass_by_sampling(classify, SAMPLING_N)
    return RayMassReport(q, mu, bounds, horizon, "sampling", flagged)


def _scan_masses(model, radii, horizon: float) -> list:
    rows = []
    for r in sorted(float(r) for r in radii):
        if r <= 0.0:
            raise DomainError(f"scan radii must be positive, got {r}")
        rows.append((r, ray_mass(model, PolarPoint(r, 0.0), horizon).mu))
    return rows


def _extract_R_delta(rows) -> Optional[tuple]:
    # smallest scanned radius whose tail stays below pi, with delta
    # read off the worst tail mass
    for i in range(len(rows)):
        worst = max(mu for _, mu in rows[i:])
        if worst < math.pi:
            return rows[i][0], 0.5 * (math.pi - worst)
    return None


def find_R_delta(model, radii, horizon: float) -> Optional[tuple]:
    """Scan mu(A_q) over sampled radii: smallest R with mu <= pi - 2
    delta beyond it, delta maximal for the scan. None when even the
    largest radius carries too much ray mass.

    Rotational symmetry makes one q per radius representative.
    """
    rep = total_curvature(model)
    if not (rep.finite and rep.c_limit > math.pi):
        raise DomainError(
            f"total curvature {rep.c_limit:.6g} does not exceed pi; the "
            "mass-of-rays bound does not apply"
        )
    rows = _scan_masses(model, radii, float(horizon))
    if not rows:
        raise DomainError("no scan radii given")
    return _extract_R_delta(rows)


# ---------------------------------------------------------------------------
# Busemann values and asymptotic directions.


@dataclass(frozen=True)
class MeridianRay:
    """Outward meridian ray gamma(s) = (t0 + s, theta0).

    Exactly representable, which is why base rays are restricted to
    meridians: any generic ray is rotationally equivalent to one.
    """

    origin: PolarPoint

    def __call__(self, s: float) -> PolarPoint:
        s = float(s)
        if s < 0.0:
            raise DomainError(f"ray parameter must be nonnegative, got {s}")
        return PolarPoint(self.origin.t + s, self.origin.theta)


class BusemannValue(float):
    """Horizon-truncated Busemann value carrying its own audit.

    convergence is |F_{2T} - F_T|, the observed movement under horizon
    doubling; horizon is T.
    """

    __slots__ = ("convergence", "horizon")

    def __new__(cls, value, convergence, horizon):
        obj = float.__new__(cls, value)
        obj.convergence = float(convergence)
        obj.horizon = float(horizon)
        return obj


def _gamma_point(origin: PolarPoint, s: float) -> PolarPoint:
    return PolarPoint(origin.t + s, origin.theta)


def _check_horizon(origin: PolarPoint, x: PolarPoint, horizon: float):
    need = 10.0 * (1.0 + max(origin.t, x.t))
    if horizon < need:
        raise DomainError(
            f"horizon {horizon:.6g} is below 10 (1 + t) = {need:.6g}"
        )


def busemann_value(model, origin, x, horizon: float) -> BusemannValue:
    """F_T(x) = T - d(x, gamma(T)) for the outward meridian ray gamma
    from origin, with the doubled-horizon movement as convergence
    estimate."""
    origin, x = _as_point(origin), _as_point(x)
    horizon = float(horizon)
    _check_horizon(origin, x, horizon)
    f_t = horizon - distance(model, x, _gamma_point(origin, horizon)).length
    f_2t = 2.0 * horizon - distance(
        model, x, _gamma_point(origin, 2.0 * horizon)).length
    if f_2t < f_t - 1e-9:
        raise InconsistencyError(
            f"Busemann value fell under horizon doubling at "
            f"({x.t:.6g}, {x.theta:.6g}): {f_t!r} -> {f_2t!r}"
        )
    return BusemannValue(f_t, abs(f_2t - f_t), horizon)


class AsymptoticDirection(float):
    """Initial angle at q of the minimal geodesic toward gamma(T),
    measured from the outward meridian, with the drift against the
    doubled horizon."""

    __slots__ = ("drift", "horizon")

    def __new__(cls, value, drift, horizon):
        obj = float.__new__(cls, value)
        obj.drift = float(drift)
        obj.horizon = float(horizon)
        return obj

    @property
    def stable(self) -> bool:
        return self.drift <= STABLE_DRIFT

    @property
    def unstable(self) -> bool:
        return self.drift > UNSTABLE_DRIFT


def _initial_angle(model, q: PolarPoint, res) -> float:
    """Signed angle from the outward meridian of the path tangent at q.

    Distance paths are oriented from their first argument; hedge on the
    endpoint radii anyway in case a caller hands a reversed path.
    """
    path = res.path
    if abs(path.t[0] - q.t) <= abs(path.t[-1] - q.t):
        u, v = float(path.u[0]), float(path.v[0])
    else:
        u, v = -float(path.u[-1]), -float(path.v[-1])
    if q.t == 0.0:
        return 0.0
    return math.atan2(float(model.f(q.t)) * v, u)


def asymptotic_direction(model, origin, q,
                         horizon: float) -> AsymptoticDirection:
    """Direction at q toward gamma(T), the horizon stand-in for the
    asymptotic ray of the meridian ray gamma. drift > 1e-2 marks the
    estimate unstable (q is then near a non-differentiability of F)."""
    origin, q = _as_point(origin), _as_point(q)
    horizon = float(horizon)
    _check_horizon(origin, q, horizon)
    angles = []
    for h in (horizon, 2.0 * horizon):
        target = _gamma_point(origin, h)
        if q.t == target.t and q.theta == target.theta:
            raise DomainError("q coincides with gamma(T)")
        res = distance(model, q, target)
        angles.append(_initial_angle(model, q, res))
    drift = abs(_wrap(angles[1] - angles[0]))
    return AsymptoticDirection(angles[0], drift, horizon)


def busemann_field(model, origin, points, horizon: float):
    """Busemann values and asymptotic directions over a point set."""
    origin = _as_point(origin)
    samples = {}
    for p in points:
        p = _as_point(p)
        val = busemann_value(model, origin, p, horizon)
        if p.t == origin.t and p.theta == origin.theta:
            direction = AsymptoticDirection(0.0, 0.0, float(horizon))
        else:
            direction = asymptotic_direction(model, origin, p, horizon)
        samples[p] = (val, direction)
    return BusemannField(MeridianRay(origin), float(horizon), samples)


@dataclass(frozen=True)
class BusemannField:
    """F_T values and asymptotic directions sampled over a point set."""

    ray: MeridianRay
    horizon: float
    samples: dict


# ---------------------------------------------------------------------------
# Gradient alignment and the growth estimates.


@dataclass(frozen=True)
class GradientAlignment:
    """Finite-difference gradient of F against the asymptotic direction.

    The differences are taken in the orthonormal frame (radial, f^-1
    angular); skipped marks points where the direction estimate is
    unstable, which the thresholds do not apply to.
    """

    q: PolarPoint
    horizon: float
    step: float
    norm: float
    angle_error: float
    direction: float
    skipped: bool
    passed: bool


def gradient_alignment_check(model, origin, q, horizon: float,
                             step: Optional[float] = None) -> GradientAlignment:
    origin, q = _as_point(origin), _as_point(q)
    if q.t == 0.0:
        raise DomainError("gradient frame is singular at the pole")
    fq = float(model.f(q.t))
    if step is None:
        # the angular step should stay inside the parallel circle, but on
        # thin ends f underflows any step the radial difference can
        # resolve; there the angular evaluations alias around the circle,
        # which is harmless exactly where it happens (free winding kills
        # the theta-dependence), so the step is floored instead
        step = max(min(1e-3 * (1.0 + q.t), 0.25 * fq), 1e-6 * (1.0 + q.t))
    h = float(step)
    if not 0.0 < h < q.t:
        raise DomainError(f"step {h:.3g} is not inside (0, t_q)")

    direction = asymptotic_direction(model, origin, q, horizon)
    if direction.unstable:
        return GradientAlignment(q, float(horizon), h, math.nan, math.nan,
                                 float(direction), True, False)

    def F(t, th):
        return float(busemann_value(model, origin, PolarPoint(t, th),
                                    horizon))

    dth = h / fq
    a1 = (F(q.t + h, q.theta) - F(q.t - h, q.theta)) / (2.0 * h)
    a2 = (F(q.t, q.theta + dth) - F(q.t, q.theta - dth)) / (2.0 * h)
    norm = math.hypot(a1, a2)
    ang_err = abs(_wrap(math.atan2(a2, a1) - float(direction)))
    passed = abs(norm - 1.0) <= 5e-2 and ang_err <= 5e-2
    return GradientAlignment(q, float(horizon), h, norm, ang_err,
                             float(direction), False, passed)


@dataclass(frozen=True)
class MainTheoremReport:
    """Quantitative growth certificates outside the critical ball.

    critical_candidates collects grid points whose asymptotic direction
    fails the radial angle certificate (over-reported, never under);
    sublevel_bound maps each requested level a to the radius bound
    (a - N_R)/sin(delta) + R that every sampled sublevel point obeyed.
    """

    R: float
    delta: float
    critical_candidates: tuple
    sublevel_bound: dict
    N_R: float
    horizon: float
    mass_scan: tuple
    certificate_angles: tuple


def main_theorem_suite(model, horizon: float, grid,
                       levels=(1.0, 2.0, 4.0)) -> MainTheoremReport:
    """Run the growth estimates against a grid of sample points.

    The base ray is the theta = 0 meridian from the pole, so d(p, q) is
    the radius coordinate exactly. Steps: scan mu over the grid radii
    for (R, delta); certify the asymptotic-radial angle <= pi/2 - delta
    outside B_R; check the growth bound along radial lines; verify the
    sublevel radius bound at the requested levels with N_R taken as the
    minimum of F over 64 points of the R-sphere.
    """
    horizon = float(horizon)
    grid = [_as_point(p) for p in grid]
    if not grid:
        raise DomainError("empty sample grid")
    pole = PolarPoint(0.0, 0.0)

    rep = total_curvature(model)
    if not (rep.finite and rep.c_limit > math.pi):
        raise DomainError(
            f"total curvature {rep.c_limit:.6g} does not exceed pi; the "
            "mass-of-rays bound does not apply"
        )
    radii = sorted({p.t for p in grid if p.t > 0.0})
    rows = _scan_masses(model, radii, horizon)
    found = _extract_R_delta(rows)
    if found is None:
        raise NoConvergenceError(
            "no scanned radius bounds the ray mass away from pi",
            {"scan": rows},
        )
    R, delta = found
    sin_d = math.sin(delta)

    outside = [p for p in grid if p.t > R]
    candidates = []
    cert = []
    for p in outside:
        direction = asymptotic_direction(model, pole, p, horizon)
        ang = abs(float(direction))
        cert.append((p, ang))
        if direction.unstable or ang > 0.5 * math.pi - delta + CERT_TOL:
            candidates.append(p)

    values = {}
    for p in outside:
        values[p] = float(busemann_value(model, pole, p, horizon))
        f_r = float(busemann_value(model, pole, PolarPoint(R, p.theta),
                                   horizon))
        growth = values[p] - f_r
        want = (p.t - R) * sin_d
        if growth < want - CERT_TOL:
            raise InconsistencyError(
                f"growth bound fails at ({p.t:.6g}, {p.theta:.6g}): "
                f"F gained {growth:.6g} against required {want:.6g}"
            )

    n_r = min(
        float(busemann_value(model, pole, PolarPoint(R, TWO_PI * k / 64.0),
                             horizon))
        for k in range(64)
    )
    sublevel = {}
    for a in levels:
        a = float(a)
        bound = (a - n_r) / sin_d + R
        for p in outside:
            if values[p] <= a and p.t > bound + 1e-6:
                raise InconsistencyError(
                    f"sublevel bound fails at level {a:.6g}: point "
                    f"({p.t:.6g}, {p.theta:.6g}) has F = {values[p]:.6g} "
                    f"but radius beyond {bound:.6g}"
                )
        sublevel[a] = bound

    return MainTheoremReport(
        R=float(R),
        delta=float(delta),
        critical_candidates=tuple(candidates),
        sublevel_bound=sublevel,
        N_R=float(n_r),
        horizon=horizon,
        mass_scan=tuple(rows),
        certificate_angles=tuple(cert),
    )
