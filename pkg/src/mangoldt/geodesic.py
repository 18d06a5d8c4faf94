"""Geodesics and distances on a surface of revolution.

Unit-speed geodesics of ds^2 = dt^2 + f(t)^2 dtheta^2 solve the first-order
system

    t' = u,  theta' = v,  u' = f(t) f'(t) v^2,  v' = -2 (f'(t)/f(t)) u v,

with the Clairaut constant nu = f^2 v and speed u^2 + f^2 v^2 both conserved.
Turning points (u = 0) are ordinary points of this system, so no branch
switching is needed there. Meridians (nu = 0) are handled in closed form,
including the angle flip theta -> theta + pi when they pass the pole.

The integrator is an adaptive Dormand-Prince 5(4) pair with a PI step
controller. Events (crossings of a target circle t = const, turning points)
are bracketed on the accepted nodes, located on the local cubic Hermite
interpolant, and, where lengths depend on them, re-refined with a single
controlled substep so the event time inherits the integration tolerance
rather than the interpolant's.

Distances are computed by shooting from the endpoint of smaller radius over
the launch angle. Initial angles are measured from the outward meridian,
positive toward increasing theta; at the pole the angle denotes the meridian
theta itself.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, MangoldtError, NoConvergenceError

__all__ = [
    "PolarPoint",
    "GeodesicPath",
    "DistanceResult",
    "integrate",
    "exp_map",
    "distance",
    "angle_at",
]

TWO_PI = 2.0 * math.pi

# Below this Clairaut constant a trajectory is treated as a meridian.
NU_FLOOR = 1e-12

# Net winding of a minimizer never exceeds pi (scaling the theta component
# of a curve shortens it), so trials may stop a little past that.
WINDING_CAP = math.pi + 0.2


@dataclass(frozen=True)
class PolarPoint:
    """Point (t, theta), canonical: t >= 0, theta in [0, 2 pi), pole at theta 0."""

    t: float
    theta: float = 0.0

    def __post_init__(self):
        t = float(self.t)
        if t < 0.0:
            raise DomainError(f"radius must be nonnegative, got {t}")
        th = math.fmod(float(self.theta), TWO_PI)
        if th < 0.0:
            th += TWO_PI
        if t == 0.0:
            th = 0.0
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "theta", th)


def _as_point(p) -> PolarPoint:
    if isinstance(p, PolarPoint):
        return p
    t, th = p
    return PolarPoint(float(t), float(th))


@dataclass(eq=False)
class GeodesicPath:
    """Accepted integration nodes of one geodesic (or certifying curve).

    s is arclength from the start. slopes holds the state derivative at each
    node, which makes state_at a local cubic Hermite evaluation. Meridian
    paths are piecewise linear with a doubled node at the pole where theta
    jumps by pi.
    """

    s: np.ndarray
    t: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    nu: float
    phi0: float
    turning_points: np.ndarray
    pole_passages: np.ndarray
    nu_drift: float
    speed_drift: float
    slopes: np.ndarray = field(repr=False, default=None)

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def start(self) -> PolarPoint:
        return PolarPoint(max(float(self.t[0]), 0.0), float(self.theta[0]))

    def endpoint(self) -> PolarPoint:
        return PolarPoint(max(float(self.t[-1]), 0.0), float(self.theta[-1]))

    def state_at(self, s):
        """Interpolated (t, theta, u, v) at arclength s, clipped to the span."""
        s = float(min(max(s, self.s[0]), self.s[-1]))
        i = int(np.searchsorted(self.s, s, side="right")) - 1
        i = min(max(i, 0), len(self.s) - 2)
        h = self.s[i + 1] - self.s[i]
        if h <= 0.0:
            i += 1
            return (self.t[i], self.theta[i], self.u[i], self.v[i])
        tau = (s - self.s[i]) / h
        h00 = (1.0 + 2.0 * tau) * (1.0 - tau) ** 2
        h10 = tau * (1.0 - tau) ** 2
        h01 = tau * tau * (3.0 - 2.0 * tau)
        h11 = tau * tau * (tau - 1.0)
        out = []
        for k, col in enumerate((self.t, self.theta, self.u, self.v)):
            y0, y1 = col[i], col[i + 1]
            d0, d1 = self.slopes[i, k], self.slopes[i + 1, k]
            out.append(h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1)
        return tuple(float(x) for x in out)

    def sampled(self, n: int):
        """n states at uniform arclength, as a dict of arrays."""
        ss = np.linspace(self.s[0], self.s[-1], n)
        rows = np.array([self.state_at(x) for x in ss])
        return {
            "s": ss,
            "t": rows[:, 0],
            "theta": rows[:, 1],
            "u": rows[:, 2],
            "v": rows[:, 3],
        }

    def to_csv(self, dest, n: Optional[int] = None):
        """Write s,t,theta,u,v,nu rows; the shortest-repr floats are stable.

        nu is conserved along a geodesic, so the column repeats the
        stored constant; it rides along because consumers of exported
        paths key families by it.
        """
        if n is None:
            cols = (self.s, self.t, self.theta, self.u, self.v)
        else:
            d = self.sampled(n)
            cols = (d["s"], d["t"], d["theta"], d["u"], d["v"])
        lines = ["s,t,theta,u,v,nu"]
        nu_r = repr(float(self.nu))
        for row in zip(*cols):
            lines.append(",".join(repr(float(x)) for x in row) + "," + nu_r)
        text = "\n".join(lines) + "\n"
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w") as fh:
                fh.write(text)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) core, on plain floats for speed

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1 = 35 / 384 - 5179 / 57600
_E3 = 500 / 1113 - 7571 / 16695
_E4 = 125 / 192 - 393 / 640
_E5 = -2187 / 6784 + 92097 / 339200
_E6 = 11 / 84 - 187 / 2100
_E7 = -1 / 40


def _stage_ks(rhs, y, k1, h):
    t0, q0, u0, v0 = y
    k1t, k1q, k1u, k1v = k1
    k2 = rhs(
        t0 + h * _A21 * k1t,
        q0 + h * _A21 * k1q,
        u0 + h * _A21 * k1u,
        v0 + h * _A21 * k1v,
    )
    k2t, k2q, k2u, k2v = k2
    k3 = rhs(
        t0 + h * (_A31 * k1t + _A32 * k2t),
        q0 + h * (_A31 * k1q + _A32 * k2q),
        u0 + h * (_A31 * k1u + _A32 * k2u),
        v0 + h * (_A31 * k1v + _A32 * k2v),
    )
    k3t, k3q, k3u, k3v = k3
    k4 = rhs(
        t0 + h * (_A41 * k1t + _A42 * k2t + _A43 * k3t),
        q0 + h * (_A41 * k1q + _A42 * k2q + _A43 * k3q),
        u0 + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
        v0 + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v),
    )
    k4t, k4q, k4u, k4v = k4
    k5 = rhs(
        t0 + h * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t),
        q0 + h * (_A51 * k1q + _A52 * k2q + _A53 * k3q + _A54 * k4q),
        u0 + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
        v0 + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v),
    )
    k5t, k5q, k5u, k5v = k5
    k6 = rhs(
        t0 + h * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t + _A65 * k5t),
        q0 + h * (_A61 * k1q + _A62 * k2q + _A63 * k3q + _A64 * k4q + _A65 * k5q),
        u0 + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
        v0 + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v),
    )
    k6t, k6q, k6u, k6v = k6
    y5 = (
        t0 + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B5 * k5t + _B6 * k6t),
        q0 + h * (_B1 * k1q + _B3 * k3q + _B4 * k4q + _B5 * k5q + _B6 * k6q),
        u0 + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u),
        v0 + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v),
    )
    return y5, (k1, k2, k3, k4, k5, k6)


def _step(rhs, y, k1, h, rtol, atol):
    """One DP54 step. Returns (y5, k7, err_norm); k7 is FSAL."""
    y5, ks = _stage_ks(rhs, y, k1, h)
    k7 = rhs(*y5)
    err2 = 0.0
    for i in range(4):
        e = h * (
            _E1 * ks[0][i]
            + _E3 * ks[2][i]
            + _E4 * ks[3][i]
            + _E5 * ks[4][i]
            + _E6 * ks[5][i]
            + _E7 * k7[i]
        )
        sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
        err2 += (e / sc) ** 2
    return y5, k7, math.sqrt(err2 / 4.0)


def _substep(rhs, y, k1, h):
    """State at an intermediate offset h from a node, one controlled step."""
    return _stage_ks(rhs, y, k1, h)[0]


def _hermite_component(y0, d0, y1, d1, h, tau, idx):
    a, b = y0[idx], y1[idx]
    da, db = d0[idx], d1[idx]
    h00 = (1.0 + 2.0 * tau) * (1.0 - tau) ** 2
    h10 = tau * (1.0 - tau) ** 2
    h01 = tau * tau * (3.0 - 2.0 * tau)
    h11 = tau * tau * (tau - 1.0)
    return h00 * a + h * h10 * da + h01 * b + h * h11 * db


class _Traj:
    __slots__ = (
        "s_nodes",
        "y_nodes",
        "k_nodes",
        "crossings",
        "turnings",
        "status",
        "capped_at",
    )

    def __init__(self):
        self.s_nodes = []
        self.y_nodes = []
        self.k_nodes = []
        self.crossings = []  # dicts: s, y, direction
        self.turnings = []  # (s, t) pairs
        self.status = "s_end"
        self.capped_at = None  # (s, y) where the winding cap fired


def _propagate(
    model,
    y0,
    s_end,
    rtol,
    atol=1e-12,
    t_cross=None,
    theta_cap=None,
    max_cross=8,
    stop_after_first_cross=False,
    precise_events=False,
    collect=True,
    max_steps=200_000,
):
    """Integrate from arclength 0 to s_end or to a terminal event.

    status: "s_end", "theta_cap", "crossed" (stop_after_first_cross),
    "max_cross", or "stalled" (step size collapsed; only happens on
    thin-horn swings where theta runs away, so stalled trials are safely
    discarded by callers that prune on winding).
    """
    f, df = model.f, model.df

    def rhs(t, q, u, v):
        fv = f(t)
        dv = df(t)
        return (u, v, fv * dv * v * v, -2.0 * dv / fv * u * v)

    traj = _Traj()
    s = 0.0
    y = tuple(map(float, y0))
    try:
        k1 = rhs(*y)
    except (ZeroDivisionError, OverflowError, ValueError):
        traj.status = "stalled"
        return traj
    if collect:
        traj.s_nodes.append(s)
        traj.y_nodes.append(y)
        traj.k_nodes.append(k1)

    dnorm = max(abs(k) for k in k1)
    h = min(0.01 * (1.0 + abs(y[0])) / (1.0 + dnorm), 0.1 * s_end if s_end > 0 else 0.01)
    h = max(h, 1e-10)
    if t_cross is not None and abs(y[0] - t_cross) <= 1e-9 * max(1.0, abs(t_cross)):
        # launch on the target circle: the trial leaves and re-crosses after
        # a swing whose duration scales with u0, and the first step has to
        # land inside it or the sign-change detector never sees the return
        swing = 0.25 * abs(y[2]) / max(abs(k1[2]), 1e-12)
        h = min(h, max(swing, 1e-11))
    err_prev = 1.0
    steps = 0

    while s < s_end:
        if steps >= max_steps:
            raise NoConvergenceError(
                "integration exceeded the step budget",
                {"s": s, "s_end": s_end, "state": y},
            )
        steps += 1
        h = min(h, s_end - s)
        try:
            y_new, k7, err = _step(rhs, y, k1, h, rtol, atol)
        except (ZeroDivisionError, OverflowError, ValueError):
            err = math.inf
            y_new = k7 = None
        if not err <= 1.0:  # also catches nan
            if math.isinf(err) or math.isnan(err):
                h *= 0.1
            else:
                h *= max(0.1, 0.9 * err ** -0.25)
            if h < 1e-13 * max(1.0, abs(s)):
                traj.status = "stalled"
                return traj
            continue

        s_new = s + h

        # turning points: u changes sign inside the step
        if y[2] * y_new[2] < 0.0 or (y_new[2] == 0.0 and y[2] != 0.0):
            try:
                tau_star = brentq(
                    lambda tau: _hermite_component(y, k1, y_new, k7, h, tau, 2),
                    0.0,
                    1.0,
                    xtol=1e-12,
                )
                t_turn = _hermite_component(y, k1, y_new, k7, h, tau_star, 0)
                traj.turnings.append((s + tau_star * h, t_turn))
            except ValueError:
                pass

        if t_cross is not None:
            g0 = y[0] - t_cross
            g1 = y_new[0] - t_cross
            hit = None
            if g0 == 0.0 and s == 0.0:
                pass  # starting on the circle is not a crossing
            elif g0 * g1 < 0.0 or (g1 == 0.0 and g0 != 0.0):
                hit = (0.0, 1.0)
            elif traj.turnings and traj.turnings[-1][0] > s:
                # grazing: turning point inside this step sitting on the circle
                if abs(traj.turnings[-1][1] - t_cross) <= 1e-9:
                    s_t = traj.turnings[-1][0]
                    tau_t = (s_t - s) / h
                    y_t = tuple(
                        _hermite_component(y, k1, y_new, k7, h, tau_t, i)
                        for i in range(4)
                    )
                    traj.crossings.append({"s": s_t, "y": y_t, "direction": 0})
            if hit is not None:
                try:
                    tau_star = brentq(
                        lambda tau: _hermite_component(y, k1, y_new, k7, h, tau, 0)
                        - t_cross,
                        hit[0],
                        hit[1],
                        xtol=1e-14,
                    )
                except ValueError:
                    tau_star = 0.5
                if precise_events:
                    # one controlled substep per evaluation keeps the event
                    # time at integration accuracy, not interpolant accuracy
                    def g(sig):
                        if sig <= 0.0:
                            return g0
                        if sig >= h:
                            return g1
                        return _substep(rhs, y, k1, sig)[0] - t_cross

                    try:
                        sig_star = brentq(g, 0.0, h, xtol=1e-13, rtol=8.9e-16)
                    except ValueError:
                        sig_star = tau_star * h
                    y_c = _substep(rhs, y, k1, sig_star) if 0 < sig_star < h else (
                        y if sig_star <= 0 else y_new
                    )
                    s_c = s + sig_star
                else:
                    s_c = s + tau_star * h
                    y_c = tuple(
                        _hermite_component(y, k1, y_new, k7, h, tau_star, i)
                        for i in range(4)
                    )
                traj.crossings.append(
                    {"s": s_c, "y": y_c, "direction": 1 if g1 > g0 else -1}
                )
                if stop_after_first_cross or len(traj.crossings) >= max_cross:
                    traj.status = (
                        "crossed" if stop_after_first_cross else "max_cross"
                    )
                    if collect:
                        traj.s_nodes.append(s_new)
                        traj.y_nodes.append(y_new)
                        traj.k_nodes.append(k7)
                    return traj

        s, y, k1 = s_new, y_new, k7
        if collect:
            traj.s_nodes.append(s)
            traj.y_nodes.append(y)
            traj.k_nodes.append(k1)

        if theta_cap is not None and abs(y[1]) > theta_cap:
            traj.status = "theta_cap"
            traj.capped_at = (s, y)
            return traj

        # PI controller
        fac = 0.9 * err ** -0.2 * err_prev ** 0.04 if err > 0 else 5.0
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-10)

    traj.status = "s_end"
    return traj


# ---------------------------------------------------------------------------
# paths


def _finish_path(model, traj, nu, phi0):
    s = np.array(traj.s_nodes)
    ys = np.array(traj.y_nodes)
    ks = np.array(traj.k_nodes)
    t, th, u, v = ys[:, 0], ys[:, 1], ys[:, 2], ys[:, 3]
    fvals = np.asarray(model.f(t), dtype=float)
    nus = fvals * fvals * v
    speed = u * u + fvals * fvals * v * v
    return GeodesicPath(
        s=s,
        t=t,
        theta=th,
        u=u,
        v=v,
        nu=nu,
        phi0=phi0,
        turning_points=np.array([p[0] for p in traj.turnings]),
        pole_passages=np.array([]),
        nu_drift=float(np.max(np.abs(nus - nu))) if len(s) else 0.0,
        speed_drift=float(np.max(np.abs(speed - 1.0))) if len(s) else 0.0,
        slopes=ks,
    )


def _meridian_path(model, t0, theta0, inward, s_end):
    """Closed-form meridian run; theta flips by pi when it passes the pole."""
    if not inward:
        s = np.array([0.0, s_end])
        t = np.array([t0, t0 + s_end])
        th = np.array([theta0, theta0])
        u = np.array([1.0, 1.0])
        poles = np.array([])
        phi0 = 0.0
    elif s_end <= t0:
        s = np.array([0.0, s_end])
        t = np.array([t0, t0 - s_end])
        th = np.array([theta0, theta0])
        u = np.array([-1.0, -1.0])
        poles = np.array([])
        phi0 = math.pi
    else:
        th1 = math.fmod(theta0 + math.pi, TWO_PI)
        s = np.array([0.0, t0, t0, s_end])
        t = np.array([t0, 0.0, 0.0, s_end - t0])
        th = np.array([theta0, theta0, th1, th1])
        u = np.array([-1.0, -1.0, 1.0, 1.0])
        poles = np.array([t0])
        phi0 = math.pi
    v = np.zeros_like(s)
    slopes = np.zeros((len(s), 4))
    slopes[:, 0] = u
    return GeodesicPath(
        s=s,
        t=t,
        theta=th,
        u=u,
        v=v,
        nu=0.0,
        phi0=phi0,
        turning_points=np.array([]),
        pole_passages=poles,
        nu_drift=0.0,
        speed_drift=0.0,
        slopes=slopes,
    )


def integrate(model, q, phi, s_end, rtol: float = 1e-9) -> GeodesicPath:
    """Geodesic from q with launch angle phi, followed for arclength s_end.

    phi is measured from the outward meridian toward increasing theta. From
    the pole, phi is the theta of the departing meridian.
    """
    q = _as_point(q)
    s_end = float(s_end)
    if s_end < 0:
        raise DomainError("arclength must be nonnegative")
    if q.t == 0.0:
        return _meridian_path(model, 0.0, float(phi), False, s_end)
    f0 = float(model.f(q.t))
    nu = f0 * math.sin(phi)
    if abs(nu) <= NU_FLOOR * max(1.0, f0):
        inward = math.cos(phi) < 0.0
        return _meridian_path(model, q.t, q.theta, inward, s_end)
    if s_end == 0.0:
        return _meridian_path(model, q.t, q.theta, False, 0.0)
    y0 = (q.t, q.theta, math.cos(phi), math.sin(phi) / f0)
    traj = _propagate(model, y0, s_end, rtol)
    if traj.status == "stalled":
        raise NoConvergenceError(
            "step size collapsed in a thin-horn swing",
            {"point": (q.t, q.theta), "phi": phi, "reached_s": traj.s_nodes[-1]},
        )
    return _finish_path(model, traj, nu, float(phi))


def exp_map(model, q, phi, s) -> PolarPoint:
    """Endpoint of the geodesic from q with angle phi after arclength s."""
    q = _as_point(q)
    s = float(s)
    if s < 0:
        raise DomainError("arclength must be nonnegative")
    if q.t == 0.0:
        return PolarPoint(s, float(phi))
    f0 = float(model.f(q.t))
    nu = f0 * math.sin(phi)
    if abs(nu) <= NU_FLOOR * max(1.0, f0):
        if math.cos(phi) >= 0.0:
            return PolarPoint(q.t + s, q.theta)
        if s <= q.t:
            return PolarPoint(q.t - s, q.theta)
        return PolarPoint(s - q.t, q.theta + math.pi)
    y0 = (q.t, q.theta, math.cos(phi), math.sin(phi) / f0)
    traj = _propagate(model, y0, s, 1e-9, collect=True)
    if traj.status == "stalled":
        raise NoConvergenceError(
            "step size collapsed in a thin-horn swing",
            {"point": (q.t, q.theta), "phi": phi},
        )
    t, th = traj.y_nodes[-1][0], traj.y_nodes[-1][1]
    return PolarPoint(max(t, 0.0), th)


def angle_at(model, q, path_a: GeodesicPath, path_b: GeodesicPath) -> float:
    """Angle at q between two paths that start or end there."""
    q = _as_point(q)

    def outgoing(path):
        gap_start = abs(path.t[0] - q.t) + _ang_gap(path.theta[0], q.theta) * max(1.0, q.t)
        gap_end = abs(path.t[-1] - q.t) + _ang_gap(path.theta[-1], q.theta) * max(1.0, q.t)
        if gap_start <= gap_end:
            return path.u[0], path.v[0], path.theta[min(1, len(path.theta) - 1)]
        return -path.u[-1], -path.v[-1], path.theta[max(0, len(path.theta) - 2)]

    ua, va, tha = outgoing(path_a)
    ub, vb, thb = outgoing(path_b)
    if q.t == 0.0:
        # at the pole directions are meridians; the angle is their theta gap
        return _ang_gap(tha, thb)
    f2 = float(model.f(q.t)) ** 2
    c = ua * ub + f2 * va * vb
    return math.acos(min(1.0, max(-1.0, c)))


def _ang_gap(a, b):
    d = math.fmod(abs(a - b), TWO_PI)
    return min(d, TWO_PI - d)


# ---------------------------------------------------------------------------
# distance by shooting


@dataclass(eq=False)
class DistanceResult:
    """Distance with the minimizing path(s) that realize it.

    paths holds every minimizer found within the 1e-8 tie window, the
    primary (smallest launch angle) first. method records which rule decided
    the value: "trivial", "meridian", "parallel", "thin-end", "shooting",
    or "through-pole". error_bound is a certified bound for the closed-form
    rules that bypass shooting, None for exact or shooting results.
    """

    length: float
    path: GeodesicPath
    paths: tuple
    method: str
    multiplicity: int
    error_bound: Optional[float] = None


def _mpm_upper_bound(model, t1, t2, dth):
    """Best meridian-parallel-meridian curve, plus the through-pole path.

    Certified: every candidate cost is the length of an admissible curve.
    """
    hi = min(t2 + 8.0, max(model.t_max, t2))
    grid = np.linspace(0.0, max(hi, 1e-6), 513)
    grid = np.append(grid, [t1, t2])
    fg = np.asarray(model.f(grid), dtype=float)
    costs = np.abs(t1 - grid) + np.abs(t2 - grid) + dth * fg
    return float(min(t1 + t2, costs.min()))


def _profile_is_monotone(model):
    grid = np.linspace(0.0, model.t_max, 1025)[1:]
    return bool(np.all(np.asarray(model.df(grid), dtype=float) > 0.0))


def _shoot(model, t1, nu, sign_u, t2, s_cap, rtol, monotone, precise, max_cross=8):
    f1 = float(model.f(t1))
    ratio = min(nu / f1, 1.0)
    u0 = sign_u * math.sqrt(max(0.0, 1.0 - ratio * ratio))
    y0 = (t1, 0.0, u0, nu / (f1 * f1))
    try:
        traj = _propagate(
            model,
            y0,
            s_cap,
            rtol,
            t_cross=t2,
            theta_cap=WINDING_CAP,
            max_cross=max_cross,
            stop_after_first_cross=monotone,
            precise_events=precise,
            collect=False,
        )
    except NoConvergenceError:
        return [], "stalled", None
    if traj.status == "stalled":
        return [], "stalled", None
    return traj.crossings, traj.status, traj.capped_at


def _solve_shooting(model, t1, t2, dth, rtol, L_up, monotone):
    """Geodesics from (t1, 0) hitting (t2, dth), as (length, phi, miss).

    miss is the residual angular error at the target circle: zero for
    refined roots, nonzero only for grazing-boundary hits that cannot be
    bracketed (see below).

    Trials are parametrized by the Clairaut constant nu rather than the
    launch angle: only nu below the smallest f between the radii can reach
    the target circle, and on waisted profiles that window is a thin sliver
    of launch angles that a uniform angle scan walks straight past. Each nu
    gives an initially-outward and an initially-inward trial family. Within
    a family, the theta of the k-th crossing of t = t2 varies continuously
    with nu; sign changes of (theta_k - dth) are refined by Brent's method.

    Uniform scans cannot see roots pinned against the ends of the nu range,
    so each table grows geometrically where a root hides: toward nu = 0
    whenever the lowest sample disagrees in sign with the known limit there
    (theta tends to pi for the inward family, which degenerates to the
    through-pole meridian, and to 0 for the outward one), and toward nu_max
    when a whole level comes up empty (the grazing limit has no closed
    form, so that end is only chased on need).

    Trials integrate a margin past the certified upper bound L_up so that
    near-optimal neighbors of the minimizer still record their crossings
    (bracketing needs both sides, not just the root itself).
    """
    f1 = float(model.f(t1))
    seg = np.linspace(t1, t2, 2049)
    nu_max = min(float(np.min(np.asarray(model.f(seg), dtype=float))), f1)
    s_cap = L_up + max(1.0, 0.25 * L_up)
    # (scan size, scan tolerance); scans only bracket sign changes, so they
    # run loose, and the root refinement re-integrates at full tolerance.
    scan_rtol = max(rtol, 1e-7)
    if monotone:
        schedule = ((17, scan_rtol), (65, scan_rtol), (257, scan_rtol), (129, rtol))
    else:
        schedule = ((33, scan_rtol), (129, scan_rtol), (513, scan_rtol), (129, rtol))

    def crossings_at(nu, sign_u, precise, tol=rtol):
        cr, status, capped = _shoot(
            model, t1, nu, sign_u, t2, s_cap, tol, monotone, precise
        )
        rows = [(c["y"][1], c["s"]) for c in cr]
        if not rows and status == "theta_cap" and capped is not None:
            # wound past the cap before any crossing. Report the cap angle
            # so the hunt can bracket against it: on steep ends the window
            # of nu whose first crossing lands below the cap is relatively
            # exponentially narrow, and every fixed-ratio scan steps over
            # it. theta(nu) slides continuously into the cap, so the
            # bracket is sound; the refinement check below only ever
            # accepts real crossings.
            rows = [(capped[1][1], capped[0])]
        return rows

    def phi_of(nu, sign_u):
        ratio = min(nu / f1, 1.0)
        u0 = sign_u * math.sqrt(max(0.0, 1.0 - ratio * ratio))
        return math.atan2(ratio, u0)

    def extend_low(nus, table, sign_u, tol):
        limit = (math.pi - dth) if sign_u < 0.0 else -dth
        # relative floors: far out on a cusp-like end nu_max itself is
        # exponentially small and the twist integral is its inverse
        # square, so roots can sit many decades below nu_max
        floor = nu_max * (1e-14 if sign_u < 0.0 else 1e-18)
        for _ in range(90):
            row = table[0]
            if row and row[0][0] <= WINDING_CAP:
                m0 = row[0][0] - dth
                if m0 * limit >= 0.0:
                    return  # lowest sample already sits on the limit's side
            # a cap-angle row (or an empty one) here means the trial wound
            # past the cap before reaching the target circle, which still
            # says nu is too big
            nu = 0.5 * nus[0]
            if nu < floor:
                return
            nus.insert(0, nu)
            table.insert(0, crossings_at(nu, sign_u, False, tol=tol))

    def extend_high(nus, table, sign_u, tol):
        for _ in range(50):
            prev = table[-1]
            nu = nu_max - 0.5 * (nu_max - nus[-1])
            if nu <= nus[-1] or nu_max - nu < 1e-12 * nu_max:
                return
            row = crossings_at(nu, sign_u, False, tol=tol)
            nus.append(nu)
            table.append(row)
            if not row:
                return  # trials stopped crossing; nothing left to chase
            if prev and any(
                (prev[k][0] - dth) * (row[k][0] - dth) <= 0.0
                for k in range(min(len(prev), len(row)))
            ):
                return

    def hunt(nus, table, sign_u, out, start=0):
        n_branches = max((len(row) for row in table), default=0)
        for k in range(n_branches):
            miss = [row[k][0] - dth if len(row) > k else None for row in table]
            for j in range(start, len(nus) - 1):
                a, b = miss[j], miss[j + 1]
                if a is None or b is None or a * b > 0.0:
                    continue

                def branch_miss(nu):
                    row = crossings_at(nu, sign_u, True)
                    if len(row) <= k:
                        raise _BranchGap()
                    return row[k][0] - dth

                try:
                    # xtol scales with the bracket: boundary-layer roots can
                    # sit at nu ~ 1e-17 where any absolute tolerance is wider
                    # than the root itself
                    nu_star = brentq(
                        branch_miss,
                        nus[j],
                        nus[j + 1],
                        xtol=1e-13 * nus[j],
                        rtol=8.9e-16,
                    )
                    row = crossings_at(nu_star, sign_u, True)
                except (_BranchGap, ValueError):
                    continue
                if len(row) <= k or abs(row[k][0] - dth) > 1e-6:
                    continue  # bracketed a branch discontinuity, not a root
                out.append((row[k][1], phi_of(nu_star, sign_u), 0.0))

    for n_scan, level_rtol in schedule:
        candidates = []
        scans = {}
        for sign_u in (1.0, -1.0):
            nus = list(nu_max * np.linspace(0.0, 1.0, n_scan + 2)[1:-1])
            table = [crossings_at(nu, sign_u, False, tol=level_rtol) for nu in nus]
            extend_low(nus, table, sign_u, level_rtol)
            hunt(nus, table, sign_u, candidates)
            scans[sign_u] = (nus, table)
        if not candidates:
            for sign_u in (1.0, -1.0):
                nus, table = scans[sign_u]
                tail = len(nus) - 1
                extend_high(nus, table, sign_u, level_rtol)
                hunt(nus, table, sign_u, candidates, start=tail)
        if not candidates:
            # grazing boundary: when the target sits exactly on the
            # tangent-launch geodesic, the outward family approaches its
            # theta from below and the inward family from above as nu
            # tends to nu_max, so no single family ever brackets a sign
            # change. Convergence there is sqrt-slow in nu_max - nu, so
            # probe the boundary at gaps the tables never reach and
            # accept trials inside hunt's angular tolerance, carrying
            # the residual miss as an error estimate.
            for gap in (1e-13, 1e-15):
                for sign_u in (1.0, -1.0):
                    nu = nu_max * (1.0 - gap)
                    for th, s_hit in crossings_at(nu, sign_u, True):
                        miss = abs(th - dth)
                        if miss <= 1e-6:
                            candidates.append(
                                (s_hit, phi_of(nu, sign_u), miss))
                if candidates:
                    break
        if candidates:
            # dedupe launch angles found from adjacent brackets or branches
            candidates.sort(key=lambda c: (c[0], c[1]))
            unique = []
            for c in candidates:
                if all(abs(c[1] - u[1]) > 1e-9 for u in unique):
                    unique.append(c)
            return unique
    return []


class _BranchGap(Exception):
    pass


def _shift_mirror(path: GeodesicPath, theta0, sign):
    """Map a path computed in the reduced frame back to absolute angles."""
    th = theta0 + sign * path.theta
    return GeodesicPath(
        s=path.s.copy(),
        t=path.t.copy(),
        theta=th,
        u=path.u.copy(),
        v=sign * path.v,
        nu=sign * path.nu,
        phi0=sign * path.phi0,
        turning_points=path.turning_points.copy(),
        pole_passages=path.pole_passages.copy(),
        nu_drift=path.nu_drift,
        speed_drift=path.speed_drift,
        slopes=path.slopes * np.array([1.0, sign, 1.0, sign]),
    )


def _reverse(path: GeodesicPath):
    L = path.length
    return GeodesicPath(
        s=L - path.s[::-1],
        t=path.t[::-1].copy(),
        theta=path.theta[::-1].copy(),
        u=-path.u[::-1],
        v=-path.v[::-1],
        nu=-path.nu,
        phi0=float("nan"),  # launch angle belongs to the original orientation
        turning_points=np.sort(L - path.turning_points),
        pole_passages=np.sort(L - path.pole_passages),
        nu_drift=path.nu_drift,
        speed_drift=path.speed_drift,
        slopes=-(path.slopes[::-1]),
    )


def _trivial_path(model, p: PolarPoint):
    s = np.array([0.0, 0.0])
    slopes = np.zeros((2, 4))
    slopes[:, 0] = 1.0
    return GeodesicPath(
        s=s,
        t=np.array([p.t, p.t]),
        theta=np.array([p.theta, p.theta]),
        u=np.array([1.0, 1.0]),
        v=np.zeros(2),
        nu=0.0,
        phi0=0.0,
        turning_points=np.array([]),
        pole_passages=np.array([]),
        nu_drift=0.0,
        speed_drift=0.0,
        slopes=slopes,
    )


def _horn_path(model, p, q, dth_signed):
    """Certifying curve for the thin-end rule: meridian plus a parallel arc.

    Not a geodesic; it realizes |t_q - t_p| + pi f(t_far) and certifies the
    distance value |t_q - t_p| to that accuracy.
    """
    t1, t2 = p.t, q.t
    n_arc = 9
    f2 = float(model.f(t2))
    arc_len = abs(dth_signed) * f2
    s_arc = (t2 - t1) + np.linspace(0.0, max(arc_len, 1e-300), n_arc)
    th_arc = p.theta + np.linspace(0.0, dth_signed, n_arc)
    if t2 > t1:
        s = np.concatenate([[0.0], s_arc])
        t = np.concatenate([[t1], np.full(n_arc, t2)])
        th = np.concatenate([[p.theta], th_arc])
        u = np.concatenate([[1.0], np.zeros(n_arc)])
    else:
        s, t, th, u = s_arc, np.full(n_arc, t2), th_arc, np.zeros(n_arc)
    sgn = 1.0 if dth_signed >= 0 else -1.0
    v = np.where(u == 0.0, sgn / max(f2, 1e-300), 0.0)
    slopes = np.stack([u, v, np.zeros_like(u), np.zeros_like(u)], axis=1)
    return GeodesicPath(
        s=s,
        t=t,
        theta=th,
        u=u,
        v=v,
        nu=0.0,
        phi0=0.0,
        turning_points=np.array([]),
        pole_passages=np.array([]),
        nu_drift=0.0,
        speed_drift=0.0,
        slopes=slopes,
    )


def distance(model, a, b, rtol: float = 1e-11, upper_bound=None) -> DistanceResult:
    """Length of a minimizing geodesic between a and b, with the path.

    Shooting runs from the endpoint of smaller radius with the angular gap
    reduced to [0, pi]; meridian and pole cases are closed forms. When the
    parallel circle through the far endpoint is shorter than 1e-12 ("thin
    end"), the distance is |t_a - t_b| with that certified error and no
    trajectory is integrated; minimizers out there have Clairaut constants
    far below float resolution. Equal radii with an angular gap below 1e-5
    return the arc of the shared parallel ("parallel"), whose length agrees
    with the geodesic through cubic order; the gap sits below every scale
    the shooting families can resolve against the grazing limit. Minimizers
    tied within 1e-8 are all reported; at an angular gap of exactly pi a
    shooting minimizer's mirror twin is included.
    """
    pa, pb = _as_point(a), _as_point(b)
    swapped = pa.t > pb.t
    p, q = (pb, pa) if swapped else (pa, pb)
    t1, t2 = p.t, q.t

    dth_raw = math.fmod(q.theta - p.theta, TWO_PI)
    if dth_raw < 0:
        dth_raw += TWO_PI
    mirror = dth_raw > math.pi
    dth = TWO_PI - dth_raw if mirror else dth_raw
    sign = -1.0 if mirror else 1.0

    def finish(length, paths, method, error_bound=None):
        if swapped:
            paths = [_reverse(pp) for pp in paths]
        return DistanceResult(
            length=float(length),
            path=paths[0],
            paths=tuple(paths),
            method=method,
            multiplicity=len(paths),
            error_bound=error_bound,
        )

    # coincident points
    if abs(t1 - t2) <= 1e-15 and (dth <= 1e-15 or t2 == 0.0):
        return finish(0.0, [_trivial_path(model, p)], "trivial")

    # from the pole every meridian is minimizing
    if t1 <= 1e-12:
        path = _meridian_path(model, 0.0, q.theta, False, t2)
        return finish(t2, [path], "meridian", error_bound=t1 if t1 else None)

    f2 = float(model.f(t2))

    # equal radii with a sub-1e-5 gap: the minimizer hugs the target
    # parallel and its length matches the arc to cubic order, below every
    # scale the shooting families can bracket against nu_max
    if t2 - t1 <= 1e-12 and dth <= 1e-5:
        dfv = float(model.df(t2))
        length = f2 * dth * (1.0 - dfv * dfv * dth * dth / 24.0)
        n = 9
        slopes = np.zeros((n, 4))
        slopes[:, 1] = 1.0 / f2
        arc = GeodesicPath(
            s=np.linspace(0.0, length, n),
            t=np.full(n, t2),
            theta=np.linspace(0.0, dth, n),
            u=np.zeros(n),
            v=np.full(n, 1.0 / f2),
            nu=f2,
            phi0=0.5 * math.pi,
            turning_points=np.array([]),
            pole_passages=np.array([]),
            nu_drift=0.0,
            speed_drift=0.0,
            slopes=slopes,
        )
        path = _shift_mirror(arc, p.theta, sign)
        return finish(length, [path], "parallel", error_bound=f2 * dth**3)

    # same meridian up to a sliver: the radial segment plus an arc of the
    # target parallel brackets the distance to within f(t2) * dth
    if dth <= 1e-9:
        path = _meridian_path(model, t1, p.theta, False, t2 - t1)
        err = f2 * dth if dth > 0.0 else None
        return finish(t2 - t1, [path], "meridian", error_bound=err)

    # thin end: parallel circle through the far endpoint is negligible
    if math.pi * f2 < 1e-12:
        path = _horn_path(model, p, q, sign * dth)
        return finish(t2 - t1, [path], "thin-end", error_bound=math.pi * f2)

    monotone = _profile_is_monotone(model)
    L_up = _mpm_upper_bound(model, t1, t2, dth)
    if upper_bound is not None:
        L_up = min(L_up, float(upper_bound))

    candidates = _solve_shooting(model, t1, t2, dth, rtol, L_up, monotone)

    through_pole = None
    if dth >= math.pi - 1e-8:
        # lands at gap pi; the residual angular mismatch is bridged along
        # the target parallel, keeping this an admissible upper bound
        through_pole = t1 + t2 + f2 * (math.pi - dth)

    if not candidates and through_pole is None:
        raise NoConvergenceError(
            "no connecting geodesic found",
            {
                "pair": ((t1, p.theta), (t2, q.theta)),
                "angular_gap": dth,
                "upper_bound": L_up,
            },
        )

    pool = [(length, phi, "shooting", miss) for length, phi, miss in candidates]
    if through_pole is not None:
        pool.append((through_pole, math.pi, "through-pole", 0.0))
    pool.sort(key=lambda c: c[0])
    best = pool[0][0]
    if best > L_up + 1e-6:
        # an admissible curve is shorter than every geodesic found: the
        # minimizer was missed, so failing beats returning a wrong length
        raise NoConvergenceError(
            "shortest geodesic found exceeds a certified upper bound",
            {
                "pair": ((t1, p.theta), (t2, q.theta)),
                "angular_gap": dth,
                "upper_bound": L_up,
                "best_found": best,
            },
        )
    tied = [c for c in pool if c[0] <= best + 1e-8]
    tied.sort(key=lambda c: (c[1], c[0]))  # primary: smallest launch angle

    paths = []
    method = None
    worst_miss = 0.0
    for length, phi, kind, miss in tied:
        worst_miss = max(worst_miss, miss)
        if kind == "through-pole":
            paths.append(_shift_mirror(_meridian_path(model, t1, 0.0, True, length), p.theta, sign))
        else:
            f1 = float(model.f(t1))
            y0 = (t1, 0.0, math.cos(phi), math.sin(phi) / f1)
            traj = _propagate(
                model, y0, length, rtol, theta_cap=None, collect=True
            )
            paths.append(
                _shift_mirror(_finish_path(model, traj, f1 * math.sin(phi), phi), p.theta, sign)
            )
            if abs(dth - math.pi) <= 1e-12:
                # mirror twin swings the other way with opposite Clairaut sign
                paths.append(
                    _shift_mirror(_finish_path(model, traj, f1 * math.sin(phi), phi), p.theta, -sign)
                )
        if method is None:
            method = kind
    # grazing-boundary winners land within miss of the target angle; the
    # induced length error is at most the arc bridging that gap
    err = f2 * worst_miss if worst_miss > 0.0 else None
    return finish(tied[0][0], paths, method, error_bound=err)
