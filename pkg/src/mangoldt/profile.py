"""Rotational metric profiles.

A surface of revolution with a pole is described by one warping function f:

    ds^2 = dt^2 + f(t)^2 dtheta^2,   f(0) = 0, f'(0) = 1, f > 0 on (0, t_max].

Radial curvature is G = -f''/f; the surface is von Mangoldt when G is
non-increasing in t. A model carries f and its first two derivatives as
callables that accept floats or arrays. Builtin models also carry a closed
form for G, which stays well defined in the far tail where f itself
underflows to zero.

t_max bounds curvature queries and the admissibility grid. f, df, ddf remain
valid beyond it (closed forms, or linear extrapolation for sampled data);
long geodesics rely on that.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator, PPoly

from .errors import AdmissibilityError, DomainError, MangoldtError

__all__ = [
    "ProfileModel",
    "CurvatureProfile",
    "TotalCurvatureReport",
    "builtin_model",
    "list_builtin_models",
    "load_model",
    "eval_curvature",
    "check_von_mangoldt",
    "total_curvature",
]

# Below this radius -f''/f is evaluated by extrapolation, not directly.
EPS_AXIS = 1e-4

# Last representable f value before an underflow tail is still "positive".
_UNDERFLOW_EDGE = 1e-290


@dataclass(frozen=True)
class ProfileModel:
    """A warping function and its derivatives.

    f, df, ddf accept a float or an ndarray. curvature, when present, is a
    closed form for G = -f''/f valid on [0, t_max] even where f underflows.
    """

    name: str
    kind: str  # "closed-form" or "sampled"
    t_max: float
    f: Callable = field(repr=False)
    df: Callable = field(repr=False)
    ddf: Callable = field(repr=False)
    curvature: Optional[Callable] = field(default=None, repr=False)


@dataclass
class CurvatureProfile:
    t: np.ndarray
    G: np.ndarray
    G0: float
    von_mangoldt: bool
    first_violation: Optional[float]


@dataclass
class TotalCurvatureReport:
    c_limit: float
    c_integral: float
    finite: bool


def _check_admissible(model: ProfileModel) -> None:
    f0 = float(model.f(0.0))
    if abs(f0) > 1e-9:
        raise AdmissibilityError(f"f(0) = {f0:.3e}, must vanish")
    d0 = float(model.df(0.0))
    if abs(d0 - 1.0) > 1e-3:
        raise AdmissibilityError(f"f'(0) = {d0:.6g}, must be 1 within 1e-3")
    ts = np.linspace(0.0, model.t_max, 2049)[1:]
    vals = np.asarray(model.f(ts), dtype=float)
    if np.any(vals < 0.0):
        k = int(np.argmax(vals < 0.0))
        raise AdmissibilityError(f"f({ts[k]:.6g}) = {vals[k]:.3e} < 0")
    zero = vals == 0.0
    if zero.any():
        k = int(np.argmax(zero))
        # A suffix of exact zeros preceded by a subnormal-scale value is an
        # underflow tail (positive in exact arithmetic). Anything else is a
        # genuine interior zero.
        if not zero[k:].all():
            raise AdmissibilityError(f"f vanishes at interior t = {ts[k]:.6g}")
        if k == 0 or vals[k - 1] >= _UNDERFLOW_EDGE:
            raise AdmissibilityError(
                f"f reaches zero near t = {ts[k]:.6g} without underflowing"
            )


# ---------------------------------------------------------------------------
# builtin profiles


def _plane_model(t_max):
    def f(t):
        if isinstance(t, (float, int)):
            return float(t)
        return np.asarray(t, dtype=float)

    def df(t):
        if isinstance(t, (float, int)):
            return 1.0
        return np.ones_like(np.asarray(t, dtype=float))

    def ddf(t):
        if isinstance(t, (float, int)):
            return 0.0
        return np.zeros_like(np.asarray(t, dtype=float))

    def curv(t):
        if isinstance(t, (float, int)):
            return 0.0
        return np.zeros_like(np.asarray(t, dtype=float))

    return ProfileModel("plane", "closed-form", t_max, f, df, ddf, curv)


def _hyperbolic_model(t_max):
    def f(t):
        if isinstance(t, (float, int)):
            return math.sinh(t)
        return np.sinh(np.asarray(t, dtype=float))

    def df(t):
        if isinstance(t, (float, int)):
            return math.cosh(t)
        return np.cosh(np.asarray(t, dtype=float))

    def ddf(t):
        if isinstance(t, (float, int)):
            return math.sinh(t)
        return np.sinh(np.asarray(t, dtype=float))

    def curv(t):
        if isinstance(t, (float, int)):
            return -1.0
        return np.full_like(np.asarray(t, dtype=float), -1.0)

    return ProfileModel("hyperbolic", "closed-form", t_max, f, df, ddf, curv)


def _sinclair_model(t_max):
    # f = exp(-t^2) tanh t. Odd in t, so transient probes at slightly
    # negative t during turning-point steps stay meaningful.
    def f(t):
        if isinstance(t, (float, int)):
            t = float(t)
            return math.exp(-t * t) * math.tanh(t)
        t = np.asarray(t, dtype=float)
        with np.errstate(under="ignore"):
            return np.exp(-t * t) * np.tanh(t)

    def df(t):
        if isinstance(t, (float, int)):
            t = float(t)
            sech2 = 1.0 / math.cosh(t) ** 2
            return math.exp(-t * t) * (sech2 - 2.0 * t * math.tanh(t))
        t = np.asarray(t, dtype=float)
        with np.errstate(under="ignore"):
            sech2 = 1.0 / np.cosh(t) ** 2
            return np.exp(-t * t) * (sech2 - 2.0 * t * np.tanh(t))

    def ddf(t):
        if isinstance(t, (float, int)):
            t = float(t)
            th = math.tanh(t)
            sech2 = 1.0 / math.cosh(t) ** 2
            return math.exp(-t * t) * (
                (4.0 * t * t - 2.0) * th - 4.0 * t * sech2 - 2.0 * sech2 * th
            )
        t = np.asarray(t, dtype=float)
        with np.errstate(under="ignore"):
            th = np.tanh(t)
            sech2 = 1.0 / np.cosh(t) ** 2
            return np.exp(-t * t) * (
                (4.0 * t * t - 2.0) * th - 4.0 * t * sech2 - 2.0 * sech2 * th
            )

    def curv(t):
        # G = 8t/sinh(2t) + 2/cosh(t)^2 - 4t^2 + 2, limit 8 at the pole.
        if isinstance(t, (float, int)):
            t = float(t)
            if abs(t) < 1e-4:
                return 8.0 - (26.0 / 3.0) * t * t
            first = 0.0 if abs(t) > 350.0 else 8.0 * t / math.sinh(2.0 * t)
            return first + 2.0 / math.cosh(t) ** 2 - 4.0 * t * t + 2.0
        t = np.asarray(t, dtype=float)
        small = np.abs(t) < 1e-4
        ts = np.where(small, 1.0, t)
        with np.errstate(over="ignore", under="ignore"):
            g = (
                8.0 * ts / np.sinh(2.0 * ts)
                + 2.0 / np.cosh(ts) ** 2
                - 4.0 * ts * ts
                + 2.0
            )
        return np.where(small, 8.0 - (26.0 / 3.0) * t * t, g)

    return ProfileModel("sinclair", "closed-form", t_max, f, df, ddf, curv)


@lru_cache(maxsize=4096)
def _parab_r(t: float) -> float:
    """Invert the arclength t = r sqrt(1+4r^2)/2 + asinh(2r)/4 of z = r^2."""
    if t == 0.0:
        return 0.0
    a = abs(t)
    r = a if a < 1.0 else math.sqrt(a)
    # s(r) is increasing and convex, so Newton converges from any seed.
    for _ in range(60):
        sq = math.sqrt(1.0 + 4.0 * r * r)
        step = (r * sq / 2.0 + math.asinh(2.0 * r) / 4.0 - a) / sq
        r -= step
        if abs(step) <= 1e-15 * (1.0 + r):
            break
    return r if t > 0 else -r


def _parab_r_arr(t):
    t = np.asarray(t, dtype=float)
    sgn = np.where(t < 0, -1.0, 1.0)
    a = np.abs(t)
    r = np.where(a < 1.0, a, np.sqrt(np.maximum(a, 1e-300)))
    for _ in range(100):
        sq = np.sqrt(1.0 + 4.0 * r * r)
        step = (r * sq / 2.0 + np.arcsinh(2.0 * r) / 4.0 - a) / sq
        r -= step
        if np.max(np.abs(step)) <= 1e-15:
            break
    return sgn * r


def _paraboloid_model(t_max):
    # z = r^2 reparametrized by arclength: f(t) = r(t), f' = 1/sqrt(1+4r^2).
    def f(t):
        if isinstance(t, (float, int)):
            return _parab_r(float(t))
        return _parab_r_arr(t)

    def df(t):
        if isinstance(t, (float, int)):
            r = _parab_r(float(t))
            return 1.0 / math.sqrt(1.0 + 4.0 * r * r)
        r = _parab_r_arr(t)
        return 1.0 / np.sqrt(1.0 + 4.0 * r * r)

    def ddf(t):
        if isinstance(t, (float, int)):
            r = _parab_r(float(t))
            return -4.0 * r / (1.0 + 4.0 * r * r) ** 2
        r = _parab_r_arr(t)
        return -4.0 * r / (1.0 + 4.0 * r * r) ** 2

    def curv(t):
        if isinstance(t, (float, int)):
            r = _parab_r(float(t))
            return 4.0 / (1.0 + 4.0 * r * r) ** 2
        r = _parab_r_arr(t)
        return 4.0 / (1.0 + 4.0 * r * r) ** 2

    return ProfileModel("paraboloid", "closed-form", t_max, f, df, ddf, curv)


_BUILTINS = {
    "plane": _plane_model,
    "paraboloid": _paraboloid_model,
    "hyperbolic": _hyperbolic_model,
    "sinclair": _sinclair_model,
}


def list_builtin_models():
    return tuple(sorted(_BUILTINS))


def builtin_model(name: str, t_max: float = 40.0) -> ProfileModel:
    try:
        make = _BUILTINS[name]
    except KeyError:
        raise MangoldtError(
            f"unknown builtin model {name!r}; available: {', '.join(sorted(_BUILTINS))}"
        ) from None
    if not t_max > 0:
        raise MangoldtError("t_max must be positive")
    model = make(float(t_max))
    _check_admissible(model)
    return model


# ---------------------------------------------------------------------------
# sampled profiles


def _sampled_model(samples, name, t_max):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise AdmissibilityError("samples must be an (n, 2) array of [t, f], n >= 2")
    tk, fk = arr[:, 0].copy(), arr[:, 1].copy()
    if np.any(np.diff(tk) <= 0):
        raise AdmissibilityError("sample radii must be strictly increasing")
    if abs(tk[0]) > 1e-12 or abs(fk[0]) > 1e-12:
        raise AdmissibilityError("first sample must be [0, 0]")
    tk[0] = fk[0] = 0.0
    if np.any(fk[1:] <= 0.0):
        raise AdmissibilityError("sampled f must be positive away from the pole")

    interp = PchipInterpolator(tk, fk)
    d = interp.derivative()(tk)

    # Piecewise polynomial with pchip slopes at the knots. The first interval
    # is a quartic with f(0) = 0, f'(0) = 1, f''(0) = 0 imposed; a plain
    # Hermite cubic there generically has f''(0) != 0, which makes -f''/f
    # divergent at the pole and the near-axis curvature meaningless.
    n_int = len(tk) - 1
    coef = np.zeros((5, n_int))
    h1 = tk[1]
    big_a = fk[1] - h1
    big_b = d[1] - 1.0
    coef[:, 0] = [
        (big_b * h1 - 3.0 * big_a) / h1**4,
        (4.0 * big_a - h1 * big_b) / h1**3,
        0.0,
        1.0,
        0.0,
    ]
    for i in range(1, n_int):
        h = tk[i + 1] - tk[i]
        s = (fk[i + 1] - fk[i]) / h
        coef[:, i] = [
            0.0,
            (d[i] + d[i + 1] - 2.0 * s) / h**2,
            (3.0 * s - 2.0 * d[i] - d[i + 1]) / h,
            d[i],
            fk[i],
        ]
    pp = PPoly(coef, tk)
    dpp = pp.derivative()
    ddpp = dpp.derivative()

    t_end = float(tk[-1])
    f_end = float(fk[-1])
    d_end = float(d[-1])

    t_cap = float(t_max) if t_max is not None else t_end
    if d_end < 0 and t_cap > t_end:
        # f' is held constant past the last knot; cap the domain before the
        # extrapolated line crosses zero.
        t_zero = t_end - f_end / d_end
        t_cap = min(t_cap, t_zero * (1.0 - 1e-9))

    def f(t):
        scalar = isinstance(t, (float, int))
        ta = np.asarray(t, dtype=float)
        inside = pp(np.minimum(ta, t_end))
        out = np.where(ta <= t_end, inside, f_end + d_end * (ta - t_end))
        return float(out) if scalar else out

    def df(t):
        scalar = isinstance(t, (float, int))
        ta = np.asarray(t, dtype=float)
        out = np.where(ta <= t_end, dpp(np.minimum(ta, t_end)), d_end)
        return float(out) if scalar else out

    def ddf(t):
        scalar = isinstance(t, (float, int))
        ta = np.asarray(t, dtype=float)
        out = np.where(ta <= t_end, ddpp(np.minimum(ta, t_end)), 0.0)
        return float(out) if scalar else out

    model = ProfileModel(name, "sampled", t_cap, f, df, ddf, None)
    _check_admissible(model)
    return model


def load_model(source) -> ProfileModel:
    """Build a model from a dict or a path to a JSON file.

    Accepted forms: {"builtin": "<name>", "t_max": optional} or
    {"samples": [[t, f], ...], "name": optional, "t_max": optional}.
    """
    if isinstance(source, (str, Path)):
        source = json.loads(Path(source).read_text())
    if not isinstance(source, dict):
        raise MangoldtError("model source must be a dict or a path to a JSON file")
    if "builtin" in source and "samples" in source:
        raise MangoldtError("give either 'builtin' or 'samples', not both")
    if "builtin" in source:
        t_max = source.get("t_max", 40.0)
        return builtin_model(source["builtin"], t_max=t_max)
    if "samples" in source:
        return _sampled_model(
            source["samples"], source.get("name", "sampled"), source.get("t_max")
        )
    raise MangoldtError("model source needs a 'builtin' or 'samples' entry")


# ---------------------------------------------------------------------------
# curvature


def _axis_curvature(model):
    # Neville extrapolation of -f''/f to t = 0 from nodes above EPS_AXIS.
    hs = [EPS_AXIS * 0.5**k for k in range(6)]
    g = [-float(model.ddf(h)) / float(model.f(h)) for h in hs]
    for m in range(1, 6):
        for i in range(6 - m):
            g[i] = (hs[i] * g[i + 1] - hs[i + m] * g[i]) / (hs[i] - hs[i + m])
    return g[0]


def eval_curvature(model: ProfileModel, t):
    """Radial curvature G(t) = -f''(t)/f(t) for t in [0, t_max].

    Uses the model's closed form when it has one. Otherwise the ratio is
    evaluated directly, except on t <= EPS_AXIS where it is 0/0 at the pole
    and the extrapolated limit is used instead.
    """
    ta = np.asarray(t, dtype=float)
    if ta.size and (float(ta.min()) < -1e-12 or float(ta.max()) > model.t_max + 1e-9):
        raise DomainError(f"curvature query outside [0, {model.t_max:g}]")
    if model.curvature is not None:
        return model.curvature(t)
    scalar = ta.ndim == 0
    tt = np.atleast_1d(ta).astype(float)
    out = np.empty_like(tt)
    band = tt <= EPS_AXIS
    if band.any():
        out[band] = _axis_curvature(model)
    rest = ~band
    if rest.any():
        out[rest] = -np.asarray(model.ddf(tt[rest]), dtype=float) / np.asarray(
            model.f(tt[rest]), dtype=float
        )
    return float(out[0]) if scalar else out


def check_von_mangoldt(model: ProfileModel, grid_size: int = 2048) -> CurvatureProfile:
    """Sample G on (0, t_max] and test that it never increases.

    The tolerance is 1e-10 relative per step, which separates genuine
    violations from rounding noise in the -f''/f route.
    """
    grid = np.linspace(0.0, model.t_max, grid_size + 1)[1:]
    G = np.asarray(eval_curvature(model, grid), dtype=float)
    G0 = float(eval_curvature(model, 0.0))
    tol = 1e-10 * np.maximum(1.0, np.abs(G[:-1]))
    rises = np.diff(G) > tol
    first = None
    von_mangoldt = True
    if G[0] > G0 + 1e-10 * max(1.0, abs(G0)):
        von_mangoldt = False
        first = float(grid[0])
    elif rises.any():
        von_mangoldt = False
        first = float(grid[int(np.argmax(rises)) + 1])
    return CurvatureProfile(grid, G, G0, von_mangoldt, first)


def total_curvature(model: ProfileModel) -> TotalCurvatureReport:
    """Total curvature two ways: 2 pi (1 - f'(t_max)) and 2 pi Int G f dt.

    The two agree analytically (G f = -f''). finite is False when f' at the
    far end has clearly diverged or the quadrature did not settle.
    """
    fp = float(model.df(model.t_max))
    c_limit = 2.0 * math.pi * (1.0 - fp)
    val, err = quad(
        lambda s: float(eval_curvature(model, s)) * float(model.f(s)),
        0.0,
        model.t_max,
        limit=200,
    )
    c_integral = 2.0 * math.pi * val
    finite = abs(fp) <= 1e3 and err <= 1e-6 * max(1.0, abs(val))
    return TotalCurvatureReport(c_limit, c_integral, finite)
