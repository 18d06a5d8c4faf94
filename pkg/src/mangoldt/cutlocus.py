"""Cut loci of meridian points via the first conjugate point.

On a surface of revolution with monotone radial curvature, the cut locus
of a point z off the pole is either empty or a subray of the opposite
meridian, and its endpoint is the first conjugate point along the unique
minimal geodesic through the pole. The profile f itself solves the Jacobi
equation along every meridian arc, so reduction of order turns that
conjugate arclength into a scalar root of the regularized twist integral
of f^-2; this module computes it that way (direct integration of the
Jacobi field is kept as an independent cross-check route), packages the
cut-locus description, and verifies the two regimes the structure forces
on opposite-meridian targets: a unique through-pole minimizer before the
endpoint, a reflection-symmetric pair beyond it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, InconsistencyError
from .geodesic import PolarPoint, distance
from .profile import eval_curvature

__all__ = [
    "CutLocusDescription",
    "CutVerification",
    "first_conjugate_through_pole",
    "cut_locus",
    "verify_cut_point",
]

_TAU = 2.0 * math.pi

# behavior exactly at the endpoint is conjugate-degenerate; verification
# stays this far away from it (10x the distance-solver tolerance, floored)
VERIFY_MARGIN = max(1e-3, 10 * 1e-8)


@dataclass(frozen=True)
class CutLocusDescription:
    """Cut locus of source: empty up to the horizon, or the subray of the
    opposite meridian starting at t = endpoint_t.

    When status is "subray", endpoint_t is the conjugate offset
    s* - source.t, always positive because minimal segments carry no
    conjugate points. It is stored directly rather than recovered by
    subtraction: far sources focus so close to the pole that
    conjugate_arclength = source.t + endpoint_t rounds to source.t.
    """

    source: PolarPoint
    status: str  # "empty-up-to-horizon" | "subray"
    endpoint_t: Optional[float]
    conjugate_arclength: Optional[float]
    horizon: float

    @property
    def opposite_theta(self) -> float:
        return (self.source.theta + math.pi) % _TAU

    def as_report(self) -> dict:
        return {
            "source": {"t": self.source.t, "theta": self.source.theta},
            "status": self.status,
            "endpoint_t": self.endpoint_t,
            "conjugate_arclength": self.conjugate_arclength,
            "horizon": self.horizon,
        }


@dataclass(frozen=True)
class CutVerification:
    """Outcome of checking one opposite-meridian target against the
    structure the cut locus dictates there."""

    z: PolarPoint
    w: PolarPoint
    regime: str  # "inside" (before the endpoint) | "beyond"
    distance_length: float
    through_pole_length: float
    multiplicity: int
    nus: tuple
    passed: bool
    message: str


def _flat_radius(model) -> Optional[float]:
    """First radius with G <= 0; 0.0 if flat-or-negative from the pole,
    None if G stays positive on [0, t_max]. Monotone G makes this a
    threshold: past it the Jacobi solution cannot focus again."""
    grid = np.linspace(0.0, model.t_max, 2049)
    g = np.asarray(eval_curvature(model, grid), dtype=float)
    if g[0] <= 0.0:
        return 0.0
    idx = np.nonzero(g <= 0.0)[0]
    if idx.size == 0:
        return None
    k = int(idx[0])
    return float(brentq(lambda t: float(eval_curvature(model, t)),
                        grid[k - 1], grid[k]))


_PSI_CAP = 1e280


def _pole_cubic(model) -> tuple:
    """Estimate (a, c) in f(e) = e + c e^2 + a e^3 + O(e^4) at the pole.

    Richardson differences at e ~ 1e-3. A smooth cap forces c = 0 (the
    profile is odd there), and a carries the pole curvature: G(0) = -6a.
    """
    e0 = 1e-3
    fh = float(model.f(0.5 * e0))
    f1 = float(model.f(e0))
    f2 = float(model.f(2.0 * e0))
    a_coarse = (f1 - e0) / e0 ** 3
    a_fine = (fh - 0.5 * e0) / (0.5 * e0) ** 3
    a = (4.0 * a_fine - a_coarse) / 3.0
    c_coarse = (f2 - 2.0 * f1) / (2.0 * e0 * e0)
    c_fine = (f1 - 2.0 * fh) * 2.0 / (e0 * e0)
    return a, 2.0 * c_fine - c_coarse


def _twist_deficit(model):
    """The regularized twist h(x) = lim_{d->0+} (int_d^x f^-2 de - 1/d),
    strictly increasing with h(0+) = -inf.

    Plane: h = -1/x. Hyperbolic: h = -coth x. Round sphere: h = -cot x,
    whose root condition h(x) = -h(t_z) puts the conjugate point exactly
    at the antipode. The integrand is kept in product form near the pole,
    where the naive difference cancels catastrophically, and capped far
    out where f underflows; the cap only touches roots already below
    ~1e-270.
    """
    a, c = _pole_cubic(model)
    if abs(c) > 1e-3:
        raise DomainError(
            f"profile is not odd at the pole (f''(0)/2 ~ {c:.2g}); "
            "the twist regularization needs a smooth cap"
        )
    psi0 = -2.0 * a
    f = model.f

    def psi(e: float) -> float:
        # 1/f^2 - 1/e^2, continuous at the pole with value -2a
        if e < 1e-8:
            return psi0
        fe = float(f(e))
        if fe < 1e-140:
            return _PSI_CAP
        if fe < 0.5 * e:
            return min(1.0 / (fe * fe) - 1.0 / (e * e), _PSI_CAP)
        return (e - fe) / e ** 3 * ((e + fe) / e) * (e / fe) ** 2

    def h(x: float) -> float:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(psi, 0.0, x, limit=400, epsabs=1e-14, epsrel=1e-12)
        return val - 1.0 / x

    return h


def _check_conjugate_span(model, t_z: float, horizon: float) -> None:
    if not t_z > 0.0:
        raise DomainError(f"t_z must be positive, got {t_z}")
    if t_z > model.t_max + 1e-9:
        raise DomainError(
            f"t_z = {t_z} beyond the profile domain t_max = {model.t_max}"
        )
    if not horizon > t_z:
        raise DomainError(f"horizon must exceed t_z, got {horizon} <= {t_z}")
    if horizon > t_z + model.t_max + 1e-9:
        raise DomainError(
            f"horizon {horizon} needs the profile beyond t_max = {model.t_max}"
        )


def _conjugate_offset(model, t_z: float, x_h: float) -> Optional[float]:
    """Offset x* = s* - t_z of the first conjugate point past the pole,
    or None when no zero exists out to x_h. h is strictly increasing, so
    the single comparison h(x_h) < -h(t_z) certifies the whole span."""
    h = _twist_deficit(model)
    target = -h(t_z)
    if h(x_h) < target:
        return None
    # root-find in log x: far sources put the root hundreds of decades
    # below the bracket width, out of reach of linear bisection
    u_star = brentq(lambda u: h(math.exp(u)) - target,
                    math.log(1e-300), math.log(x_h), xtol=1e-13, maxiter=200)
    return math.exp(u_star)


def first_conjugate_through_pole(model, t_z: float, horizon: float) -> Optional[float]:
    """First zero s* of the Jacobi field y'' + K(s) y = 0, y(0) = 0,
    y'(0) = 1 along the meridian from (t_z, 0) through the pole, with
    K(s) = G(|t_z - s|). Returns s* in (t_z, horizon], or None when the
    field is certified positive up to the horizon.

    w(s) = f(|t_z - s|) solves the same equation on both sides of the
    pole, so reduction of order gives the field in closed quadratures:
    y(t_z) = f(t_z) exactly, and for x = s - t_z > 0 the zero condition
    is h(x) = -h(t_z) with h the twist deficit of _twist_deficit. The
    root, when it exists, is positive by construction, which is the
    statement that the minimal segment to the pole carries no conjugate
    point. Far sources need this formulation: the field rides up to about
    1/f(t_z) before refocusing, so its pole value f(t_z) sits many
    decades below any direct integrator's noise floor, and the zero lands
    exponentially close to the pole. For such sources t_z + x* can round
    to t_z itself; cut_locus therefore keeps the exact offset x* instead
    of re-subtracting.
    """
    _check_conjugate_span(model, t_z, horizon)
    x_star = _conjugate_offset(model, t_z, min(horizon - t_z, model.t_max))
    if x_star is None:
        return None
    return t_z + x_star


def _conjugate_by_ode(model, t_z: float, horizon: float) -> Optional[float]:
    """Direct RK45 integration of the Jacobi field: the independent
    cross-check route for the twist reduction.

    Only trustworthy while max|y| stays within float resolution of the
    pole value f(t_z), which confines it to sources in or near the
    positively curved core; far out, integration noise manufactures a
    spurious zero at s ~ t_z. None is certified early once the solution
    has left the positively curved core with y > 0 and y' > 0: from there
    K <= 0 keeps y' nondecreasing, so no zero can follow at any horizon.
    Without that exit the solution grows like exp(t^2) on fast-opening
    profiles and the integration itself would overflow long before t_max.

    A zero at s* <= t_z contradicts minimality of the segment from z to
    the pole and is reported as a model inconsistency.
    """
    _check_conjugate_span(model, t_z, horizon)

    def rhs(s, y):
        k = float(eval_curvature(model, abs(s - t_z)))
        return (y[1], -k * y[0])

    def hits_zero(s, y):
        return y[0]

    hits_zero.terminal = True
    hits_zero.direction = -1.0

    # to the pole first: the corner of K at s = t_z must be a chunk
    # boundary, not an interior point the controller steps across
    sol = solve_ivp(rhs, (0.0, t_z), (0.0, 1.0), method="RK45",
                    rtol=1e-10, atol=1e-12, events=hits_zero)
    if sol.t_events[0].size:
        raise InconsistencyError(
            f"Jacobi zero at s = {sol.t_events[0][0]:.6g} <= t_z = {t_z:g}: "
            "conjugate point on a minimal segment"
        )
    y = (float(sol.y[0, -1]), float(sol.y[1, -1]))

    t_flat = _flat_radius(model)
    s_flat = math.inf if t_flat is None else t_z + t_flat
    s = t_z
    chunk = max(1.0, t_z)
    while s < horizon:
        s_next = min(horizon, s + chunk)
        sol = solve_ivp(rhs, (s, s_next), y, method="RK45",
                        rtol=1e-10, atol=1e-12, events=hits_zero)
        if sol.t_events[0].size:
            s_star = float(sol.t_events[0][0])
            if s_star <= t_z:
                raise InconsistencyError(
                    f"Jacobi zero at s = {s_star:.6g} <= t_z = {t_z:g}"
                )
            return s_star
        y = (float(sol.y[0, -1]), float(sol.y[1, -1]))
        s = s_next
        if s >= s_flat and y[0] > 0.0 and y[1] > 0.0:
            return None  # certified: K <= 0 from here on
        if abs(y[0]) > 1e100:
            # linear equation: rescaling shifts no zeros
            y = (y[0] * 1e-100, y[1] * 1e-100)
    return None


def cut_locus(model, z: PolarPoint, horizon: float) -> CutLocusDescription:
    """Cut locus of z, resolved up to the horizon.

    Empty cut locus is a horizon-truncated statement (the true claim
    quantifies over all arclengths); subray status is exact once the
    conjugate arclength is found.
    """
    if not z.t > 0.0:
        raise DomainError("cut locus of the pole is empty by rotational "
                          "symmetry; z must not be the pole")
    _check_conjugate_span(model, z.t, horizon)
    x_star = _conjugate_offset(model, z.t, min(horizon - z.t, model.t_max))
    if x_star is None:
        return CutLocusDescription(z, "empty-up-to-horizon", None, None,
                                   float(horizon))
    return CutLocusDescription(z, "subray", x_star, z.t + x_star,
                               float(horizon))


def verify_cut_point(model, z: PolarPoint, w_t: float) -> CutVerification:
    """Check the minimizer structure at the opposite-meridian point with
    t-coordinate w_t against the cut-locus description of z.

    Before the endpoint the through-pole meridian is the unique minimizer
    and the distance equals t_z + w_t; beyond it two reflection-symmetric
    minimizers of equal length take over. Either way the observed lengths
    and multiplicities are returned in the report; a mismatch sets
    passed = False rather than raising, so sweeps can collect failures.
    """
    desc = cut_locus(model, z, z.t + model.t_max)
    if desc.status != "subray":
        raise DomainError("cut locus is empty up to the horizon; "
                          "verify_cut_point needs a subray")
    if abs(w_t - desc.endpoint_t) <= VERIFY_MARGIN:
        raise DomainError(
            f"w_t within {VERIFY_MARGIN:g} of the endpoint "
            f"{desc.endpoint_t:.9g}: conjugate-degenerate, ill-conditioned"
        )
    w = PolarPoint(float(w_t), desc.opposite_theta)
    res = distance(model, z, w)
    pole_len = z.t + w_t
    nus = tuple(float(p.nu) for p in res.paths)

    if w_t < desc.endpoint_t:
        regime = "inside"
        ok_len = abs(res.length - pole_len) <= 1e-6
        ok_mult = res.multiplicity == 1
        passed = ok_len and ok_mult
        message = ("unique through-pole minimizer" if passed else
                   f"expected unique minimizer of length {pole_len:.9g}, "
                   f"got {res.multiplicity} of length {res.length:.9g}")
    else:
        regime = "beyond"
        ok_mult = res.multiplicity >= 2
        ok_len = res.length <= pole_len + 1e-9
        ok_sym = ok_mult and abs(nus[0] + nus[1]) <= 1e-8
        passed = ok_mult and ok_len and ok_sym
        if passed:
            message = "reflection-symmetric minimizer pair"
        else:
            message = (f"expected symmetric pair below {pole_len:.9g}, got "
                       f"{res.multiplicity} path(s) of length {res.length:.9g}"
                       f", nus {nus}")
    return CutVerification(z, w, regime, float(res.length), float(pole_len),
                           int(res.multiplicity), nus, passed, message)
