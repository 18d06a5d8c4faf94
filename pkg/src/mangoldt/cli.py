"""Command-line front end.

Model inspection, geodesic and distance queries, and the verification
suites, each mapping to one of the structure claims the library computes
with. Human summaries go to standard output; numeric tables are written
as CSV/JSON artifacts under --out-dir. Artifacts are byte-deterministic
for a fixed command line: floats are emitted with repr, JSON keys are
sorted, and nothing records clocks or hosts.

Exit status: 0 on success or a passing suite, 1 when a verification
suite fails, 2 for usage or model errors.
"""

import argparse
import io
import json
import math
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .asymptotics import (
    _extract_R_delta,
    _scan_masses,
    busemann_value,
    find_R_delta,
    is_ray,
    main_theorem_suite,
    ray_mass,
)
from .comparison import build_comparison_triangle, gtct_check
from .cutlocus import cut_locus, first_conjugate_through_pole, verify_cut_point
from .errors import DomainError, MangoldtError, NoConvergenceError
from .geodesic import PolarPoint, distance, integrate
from .profile import (
    builtin_model,
    check_von_mangoldt,
    eval_curvature,
    list_builtin_models,
    load_model,
    total_curvature,
)

TAU = 2.0 * math.pi


class UsageError(MangoldtError):
    """Bad flag combination; maps to exit status 2."""


def _parse_point(text: str) -> PolarPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 't,theta', got {text!r}")
    try:
        return PolarPoint(float(parts[0]), float(parts[1]))
    except ValueError:
        raise UsageError(f"expected two numbers in {text!r}")


def _parse_floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}")


def _resolve_model(args):
    if args.model and args.model_file:
        raise UsageError("give --model or --model-file, not both")
    if args.model:
        return builtin_model(args.model)
    if args.model_file:
        return load_model(args.model_file)
    raise UsageError("this command needs --model or --model-file")


def _write_artifact(args, name: str, text: str):
    """Write one artifact under --out-dir; returns its path, or None
    when no out-dir was requested."""
    if not args.out_dir:
        return None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _point_dict(p: PolarPoint) -> dict:
    return {"t": p.t, "theta": p.theta}


def _emit(args, name, text, out):
    path = _write_artifact(args, name, text)
    if path is not None:
        out(f"wrote: {path}")
    return path


# ---------------------------------------------------------------------------
# plain query subcommands


def _cmd_model(args, out) -> int:
    if args.action == "list":
        for name in list_builtin_models():
            out(name)
        return 0
    model = _resolve_model(args)
    prof = check_von_mangoldt(model)
    curv = total_curvature(model)
    out(f"model: {model.name} ({model.kind}), t_max = {model.t_max:g}")
    out(f"G(0+) = {float(prof.G0)!r}")
    if prof.von_mangoldt:
        out("von Mangoldt: yes")
    else:
        out(f"von Mangoldt: no (first rise near t = {prof.first_violation:g})")
    out(
        f"total curvature: {curv.c_limit!r} (limit), "
        f"{curv.c_integral!r} (integral), finite: "
        + ("yes" if curv.finite else "no")
    )
    return 0


def _cmd_geodesic(args, out) -> int:
    model = _resolve_model(args)
    q = _parse_point(args.start)
    rtol = args.tol if args.tol else 1e-9
    path = integrate(model, q, args.phi, args.length, rtol=rtol)
    end = path.endpoint()
    out(f"endpoint: t = {end.t!r}, theta = {end.theta!r}")
    out(f"turning points: {len(path.turning_points)}, "
        f"pole passages: {len(path.pole_passages)}")
    out(f"nu = {float(path.nu)!r}, nu drift = {path.nu_drift:.3e}")
    buf = io.StringIO()
    path.to_csv(buf, n=args.samples)
    _emit(args, "geodesic.csv", buf.getvalue(), out)
    return 0


def _cmd_distance(args, out) -> int:
    model = _resolve_model(args)
    a, b = _parse_point(args.a), _parse_point(args.b)
    rtol = args.tol if args.tol else 1e-11
    res = distance(model, a, b, rtol=rtol)
    out(f"distance = {res.length!r}")
    out(f"method: {res.method}, minimizers: {res.multiplicity}")
    if res.error_bound is not None:
        out(f"error bound: {res.error_bound:.3e}")
    buf = io.StringIO()
    res.path.to_csv(buf, n=args.samples)
    _emit(args, "distance-path.csv", buf.getvalue(), out)
    return 0


def _cmd_conjugate(args, out) -> int:
    model = _resolve_model(args)
    horizon = args.horizon if args.horizon else 40.0
    s_star = first_conjugate_through_pole(model, args.tz, horizon)
    if s_star is None:
        out(f"no conjugate point along the meridian up to arclength {horizon:g}")
    else:
        out(f"first conjugate arclength = {float(s_star)!r}")
    return 0


def _cmd_cutlocus(args, out) -> int:
    model = _resolve_model(args)
    horizon = args.horizon if args.horizon else 40.0
    desc = cut_locus(model, _parse_point(args.source), horizon)
    out(f"status: {desc.status}")
    if desc.status == "subray":
        out(f"subray of the theta = {desc.opposite_theta!r} meridian "
            f"from t = {desc.endpoint_t!r}")
        out(f"conjugate arclength = {desc.conjugate_arclength!r}")
    _emit(args, "cutlocus.json", _json_text(desc.as_report()), out)
    return 0


def _cmd_triangle(args, out) -> int:
    model = _resolve_model(args)
    sides = _parse_floats(args.sides)
    if len(sides) != 3:
        raise UsageError("--sides needs exactly a,b,c")
    tri = build_comparison_triangle(model, *sides)
    out(f"pole angle theta* = {tri.pole_angle!r}")
    out("vertex angles (pole, x, y): "
        + ", ".join(repr(v) for v in tri.vertex_angles))
    out("realized sides: " + ", ".join(repr(v) for v in tri.realized_sides))
    return 0


def _cmd_gtct(args, out) -> int:
    model = _resolve_model(args)
    reference = builtin_model(args.comparison)
    rep = gtct_check(model, reference, trials=args.trials, seed=args.seed)
    out(f"triangles: {rep.requested}, built: {len(rep.trials)}, "
        f"skipped: {rep.skipped}")
    out(f"min slack = {rep.min_slack!r}")
    _emit(args, "gtct.csv", rep.to_csv(), out)
    return 0


def _cmd_rays(args, out) -> int:
    model = _resolve_model(args)
    horizon = args.horizon if args.horizon else 200.0
    if args.scan:
        radii = _parse_floats(args.scan)
        found = find_R_delta(model, radii, horizon)
        if found is None:
            out("no scanned radius bounds the ray mass below pi")
            return 1
        R, delta = found
        out(f"R = {R!r}, delta = {delta!r}")
        return 0
    if not args.q:
        raise UsageError("rays needs --q (or --scan)")
    q = _parse_point(args.q)
    if args.phi is not None:
        rep = is_ray(model, q, args.phi, horizon, epsilon=args.epsilon)
        out(f"ray: {'yes' if rep.is_ray else 'no'}")
        out(f"worst deficit = {rep.worst_deficit!r} "
            f"(epsilon = {rep.epsilon!r})")
        out("checkpoint deficits: "
            + ", ".join(repr(v) for v in rep.deficits))
        return 0
    rep = ray_mass(model, q, horizon, epsilon=args.epsilon)
    out(f"mu(A_q) = {rep.mu!r}")
    out(f"arc boundaries = ({rep.boundary_angles[0]!r}, "
        f"{rep.boundary_angles[1]!r})")
    out(f"method: {rep.method}" + (", flagged" if rep.flagged else ""))
    return 0


def _cmd_busemann(args, out) -> int:
    model = _resolve_model(args)
    horizon = args.horizon if args.horizon else 200.0
    origin = _parse_point(args.origin)
    x = _parse_point(args.x)
    val = busemann_value(model, origin, x, horizon)
    out(f"F_T = {float(val)!r}")
    out(f"convergence = {val.convergence!r} at horizon {horizon:g}")
    return 0


# ---------------------------------------------------------------------------
# verification suites


@dataclass(frozen=True)
class SuiteVerdict:
    """Outcome of one verification suite.

    passed is defined as failures == 0; skips record checks whose
    preconditions did not apply, never silent omissions.
    """

    suite: str
    passed: bool
    trials: int
    skips: int
    failures: int
    artifacts: tuple


def _verdict(suite, trials, skips, failures, artifacts) -> SuiteVerdict:
    return SuiteVerdict(
        suite=suite,
        passed=failures == 0,
        trials=trials,
        skips=skips,
        failures=failures,
        artifacts=tuple(str(p) for p in artifacts if p is not None),
    )


def _suite_cut_locus(model, args, out):
    """Empty or opposite-meridian subray, with the minimizer structure
    the description dictates on either side of the endpoint."""
    horizon = args.horizon if args.horizon else 40.0
    radii = _parse_floats(args.radii) if args.radii else [0.5, 1.0, 2.0]
    trials = skips = failures = 0
    rows = []
    for r in radii:
        z = PolarPoint(r, 0.0)
        desc = cut_locus(model, z, horizon)
        row = {"source": _point_dict(z), "report": desc.as_report(),
               "checks": []}
        trials += 1
        if desc.status == "empty-up-to-horizon":
            # the structural claim here is emptiness itself; the
            # two-minimizer checks have no endpoint to straddle
            out(f"  t = {r:g}: empty up to {horizon:g}")
            rows.append(row)
            continue
        e = desc.endpoint_t
        probes = [e + max(0.3, 0.3 * e)]
        if 0.5 * e > 2e-3:
            probes.insert(0, 0.5 * e)
        else:
            skips += 1
        for w_t in probes:
            ver = verify_cut_point(model, z, w_t)
            trials += 1
            if not ver.passed:
                failures += 1
            row["checks"].append({
                "w_t": w_t,
                "regime": ver.regime,
                "distance": ver.distance_length,
                "through_pole": ver.through_pole_length,
                "multiplicity": ver.multiplicity,
                "passed": ver.passed,
                "message": ver.message,
            })
            out(f"  t = {r:g}, w_t = {w_t:.6g} [{ver.regime}]: "
                + ("ok" if ver.passed else f"FAIL ({ver.message})"))
        rows.append(row)
    art = _write_artifact(args, "cut-locus.json", _json_text(rows))
    return _verdict("cut-locus", trials, skips, failures, [art])


def _suite_triangles(model, args, out):
    """Vertex angles dominate their constant-curvature transplants; the
    identity transplant reproduces the angles."""
    trials_n = args.trials if args.trials else 12
    arts = []
    failures = skips = trials = 0

    ident = gtct_check(model, model, trials=trials_n, seed=args.seed)
    trials += len(ident.trials)
    skips += ident.skipped
    bad = sum(
        1 for tr in ident.trials if max(abs(s) for s in tr.slacks) > 1e-6
    )
    failures += bad
    out(f"  identity transplant: {len(ident.trials)} triangles, "
        + ("angles reproduced" if bad == 0 else f"{bad} FAIL"))
    arts.append(_write_artifact(args, "gtct-identity.csv", ident.to_csv()))

    reference = builtin_model("hyperbolic")
    try:
        dom = gtct_check(model, reference, trials=trials_n, seed=args.seed)
    except MangoldtError as exc:
        skips += 1
        out(f"  vs hyperbolic: skipped ({exc})")
    else:
        trials += len(dom.trials)
        skips += dom.skipped
        bad = sum(1 for tr in dom.trials if min(tr.slacks) < -1e-6)
        failures += bad
        out(f"  vs hyperbolic: {len(dom.trials)} triangles, "
            + ("all dominated" if bad == 0 else f"{bad} FAIL"))
        arts.append(_write_artifact(args, "gtct-hyperbolic.csv", dom.to_csv()))
    return _verdict("triangle-comparison", trials, skips, failures, arts)


def _suite_busemann(model, args, out):
    """1-Lipschitz, monotone under horizon doubling, additive on rays."""
    horizon = args.horizon if args.horizon else 200.0
    n_pairs = args.trials if args.trials else 12
    rng = random.Random(args.seed)
    origin = PolarPoint(0.0, 0.0)
    trials = failures = 0
    rows = {"lipschitz": [], "monotone": [], "additive": []}

    def sample():
        return PolarPoint(rng.uniform(0.3, 3.0), rng.uniform(0.0, TAU))

    for _ in range(n_pairs):
        x, y = sample(), sample()
        fx = busemann_value(model, origin, x, horizon)
        fy = busemann_value(model, origin, y, horizon)
        d = distance(model, x, y).length
        gap = abs(float(fx) - float(fy)) - d
        ok = gap <= 1e-9
        trials += 1
        failures += 0 if ok else 1
        rows["lipschitz"].append({
            "x": _point_dict(x), "y": _point_dict(y),
            "F_x": float(fx), "F_y": float(fy), "d": d, "ok": ok,
        })
    out(f"  Lipschitz-1: {n_pairs} pairs"
        + ("" if failures == 0 else f", {failures} FAIL"))

    mono_fail = 0
    for _ in range(4):
        x = sample()
        lo = busemann_value(model, origin, x, horizon)
        hi = busemann_value(model, origin, x, 2.0 * horizon)
        ok = float(hi) >= float(lo) - 1e-9
        trials += 1
        mono_fail += 0 if ok else 1
        rows["monotone"].append({
            "x": _point_dict(x), "F_T": float(lo), "F_2T": float(hi),
            "ok": ok,
        })
    failures += mono_fail
    out("  horizon monotonicity: 4 points"
        + ("" if mono_fail == 0 else f", {mono_fail} FAIL"))

    add_fail = 0
    base = busemann_value(model, origin, PolarPoint(1.0, 0.0), horizon)
    for s in (0.5, 1.0, 2.0):
        vs = busemann_value(model, origin, PolarPoint(1.0 + s, 0.0), horizon)
        tol = 2.0 * (base.convergence + vs.convergence) + 1e-9
        ok = abs(float(vs) - s - float(base)) <= tol
        trials += 1
        add_fail += 0 if ok else 1
        rows["additive"].append({
            "s": s, "F": float(vs), "F_base": float(base),
            "tolerance": tol, "ok": ok,
        })
    failures += add_fail
    out("  ray additivity: 3 offsets"
        + ("" if add_fail == 0 else f", {add_fail} FAIL"))

    art = _write_artifact(args, "busemann.json", _json_text(rows))
    return _verdict("busemann", trials, 0, failures, [art])


def _curvature_applicable(model, out) -> bool:
    rep = total_curvature(model)
    if rep.finite and rep.c_limit > math.pi:
        return True
    out(f"  not applicable: total curvature {rep.c_limit:.6g} "
        "does not exceed pi")
    return False


def _suite_ray_mass(model, args, out):
    """Some radius R and margin delta bound every farther ray arc by
    pi - 2 delta."""
    horizon = args.horizon if args.horizon else 200.0
    radii = _parse_floats(args.radii) if args.radii else [2.0, 4.0, 8.0, 16.0]
    if not _curvature_applicable(model, out):
        return _verdict("ray-mass", 0, 1, 0, [])
    rows = _scan_masses(model, radii, horizon)
    found = _extract_R_delta(rows)
    trials = len(rows)
    failures = 0
    if found is None:
        failures += 1
        out("  FAIL: no scanned radius bounds the ray mass below pi")
        R = delta = None
    else:
        R, delta = found
        if not delta > 0.0:
            failures += 1
        for r, mu in rows:
            if r >= R and mu > math.pi - 2.0 * delta + 1e-12:
                failures += 1
        out(f"  R = {R!r}, delta = {delta!r}")
    for r, mu in rows:
        out(f"  t_q = {r:g}: mu = {mu!r}")
    csv_lines = ["t_q,mu"] + [f"{repr(r)},{repr(mu)}" for r, mu in rows]
    arts = [
        _write_artifact(args, "ray-mass.csv", "\n".join(csv_lines) + "\n"),
        _write_artifact(args, "ray-mass.json", _json_text({
            "R": R, "delta": delta, "horizon": horizon,
            "scan": [{"t_q": r, "mu": mu} for r, mu in rows],
        })),
    ]
    return _verdict("ray-mass", trials, 0, failures, arts)


def _suite_main_theorem(model, args, out):
    """Radial-angle certificates exclude critical points outside B_R and
    the Busemann exhaustion grows at rate sin delta."""
    horizon = args.horizon if args.horizon else 200.0
    radii = _parse_floats(args.radii) if args.radii else [2.0, 4.0, 8.0, 16.0]
    n_ang = args.angles if args.angles else 8
    levels = _parse_floats(args.levels) if args.levels else [1.0, 2.0, 4.0]
    if not _curvature_applicable(model, out):
        return _verdict("main-theorem", 0, 1, 0, [])
    grid = [
        PolarPoint(r, TAU * k / n_ang) for r in radii for k in range(n_ang)
    ]
    try:
        rep = main_theorem_suite(model, horizon, grid, levels=tuple(levels))
    except (NoConvergenceError, MangoldtError) as exc:
        out(f"  FAIL: {exc}")
        return _verdict("main-theorem", len(grid), 0, 1, [])
    failures = len(rep.critical_candidates)
    out(f"  R = {rep.R!r}, delta = {rep.delta!r}, N_R = {rep.N_R!r}")
    out(f"  critical candidates outside B_R: "
        f"{len(rep.critical_candidates)}")
    for a in sorted(rep.sublevel_bound):
        out(f"  sublevel a = {a:g}: radius bound {rep.sublevel_bound[a]!r}")

    mu_of = dict(rep.mass_scan)
    ang_of = {(p.t, p.theta): ang for p, ang in rep.certificate_angles}
    csv_lines = ["t_q,theta_q,mu,certificate_angle"]
    for p in grid:
        ang = ang_of.get((p.t, p.theta))
        csv_lines.append(",".join([
            repr(p.t), repr(p.theta), repr(mu_of[p.t]),
            "" if ang is None else repr(ang),
        ]))
    arts = [
        _write_artifact(args, "main-theorem.json", _json_text({
            "R": rep.R,
            "delta": rep.delta,
            "N_R": rep.N_R,
            "horizon": rep.horizon,
            "critical_candidates": [
                _point_dict(p) for p in rep.critical_candidates
            ],
            "sublevel_bound": {repr(a): b
                               for a, b in rep.sublevel_bound.items()},
            "mass_scan": [{"t_q": r, "mu": mu} for r, mu in rep.mass_scan],
        })),
        _write_artifact(args, "main-theorem-per-q.csv",
                        "\n".join(csv_lines) + "\n"),
    ]
    return _verdict("main-theorem", len(grid) + len(rep.mass_scan), 0,
                    failures, arts)


SUITES = {
    "cut-locus": (
        _suite_cut_locus,
        "cut loci are empty or an opposite-meridian subray, with a unique "
        "through-pole minimizer before the endpoint and a symmetric pair "
        "beyond it",
    ),
    "triangle-comparison": (
        _suite_triangles,
        "pole-triangle vertex angles dominate their transplants onto a "
        "surface of everywhere-lower radial curvature",
    ),
    "busemann": (
        _suite_busemann,
        "horizon-truncated Busemann values are 1-Lipschitz, monotone "
        "under horizon doubling, and additive along their base ray",
    ),
    "ray-mass": (
        _suite_ray_mass,
        "on profiles with total curvature above pi, the arc of ray "
        "directions beyond some radius R has measure at most pi - 2 delta",
    ),
    "main-theorem": (
        _suite_main_theorem,
        "outside B_R the asymptotic direction stays within pi/2 - delta "
        "of radial, the Busemann function grows at rate sin delta, and "
        "sublevel sets obey the matching radius bound",
    ),
}


def _cmd_verify(args, out) -> int:
    if args.list:
        for name in SUITES:
            out(f"{name}: {SUITES[name][1]}")
        return 0
    if not args.suite:
        raise UsageError("verify needs --suite or --list")
    if args.suite not in SUITES:
        raise UsageError(
            f"unknown suite {args.suite!r}; choices: "
            + ", ".join(SUITES)
        )
    model = _resolve_model(args)
    out(f"suite: {args.suite}")
    out(f"model: {model.name}")
    verdict = SUITES[args.suite][0](model, args, out)
    out(f"trials: {verdict.trials}, skips: {verdict.skips}, "
        f"failures: {verdict.failures}")
    out(f"passed: {'true' if verdict.passed else 'false'}")
    for p in verdict.artifacts:
        out(f"wrote: {p}")
    return 0 if verdict.passed else 1


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="builtin model name")
    common.add_argument("--model-file", help="model-definition JSON path")
    common.add_argument("--out-dir", help="directory for CSV/JSON artifacts")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None,
                        help="integration tolerance override")
    common.add_argument("--horizon", type=float, default=None,
                        help="truncation horizon (command-specific default)")

    parser = argparse.ArgumentParser(
        prog="mangoldt",
        description="surfaces of revolution: geodesics, cut loci, rays, "
                    "Busemann functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", parents=[common],
                       help="inspect a model or list the builtins")
    p.add_argument("action", choices=["show", "list"])

    p = sub.add_parser("geodesic", parents=[common],
                       help="integrate one geodesic")
    p.add_argument("--start", required=True, metavar="t,theta")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--samples", type=int, default=None,
                   help="resample the exported path to n rows")

    p = sub.add_parser("distance", parents=[common],
                       help="minimizing geodesic between two points")
    p.add_argument("--a", required=True, metavar="t,theta")
    p.add_argument("--b", required=True, metavar="t,theta")
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("conjugate", parents=[common],
                       help="first conjugate point along a through-pole "
                            "meridian")
    p.add_argument("--tz", type=float, required=True,
                   help="source radius t_z")

    p = sub.add_parser("cutlocus", parents=[common],
                       help="cut locus of a point")
    p.add_argument("--source", required=True, metavar="t,theta")

    p = sub.add_parser("triangle", parents=[common],
                       help="pole-vertex triangle from side lengths")
    p.add_argument("--sides", required=True, metavar="a,b,c")

    p = sub.add_parser("gtct", parents=[common],
                       help="random-triangle angle comparison")
    p.add_argument("--comparison", required=True,
                   help="reference builtin model")
    p.add_argument("--trials", type=int, default=32)

    p = sub.add_parser("rays", parents=[common],
                       help="ray probes, ray mass, or the (R, delta) scan")
    p.add_argument("--q", metavar="t,theta", help="base point")
    p.add_argument("--phi", type=float, default=None,
                   help="probe a single direction")
    p.add_argument("--scan", metavar="r1,r2,...",
                   help="scan radii for (R, delta)")
    p.add_argument("--epsilon", type=float, default=None,
                   help="ray deficit tolerance")

    p = sub.add_parser("busemann", parents=[common],
                       help="horizon-truncated Busemann value")
    p.add_argument("--origin", default="0,0", metavar="t,theta")
    p.add_argument("--x", required=True, metavar="t,theta")

    p = sub.add_parser("verify", parents=[common],
                       help="run a verification suite")
    p.add_argument("--suite", default=None)
    p.add_argument("--list", action="store_true",
                   help="print the suite descriptions")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--radii", metavar="r1,r2,...")
    p.add_argument("--angles", type=int, default=None,
                   help="angles per radius in the sample grid")
    p.add_argument("--levels", metavar="a1,a2,...")

    return parser


_DISPATCH = {
    "model": _cmd_model,
    "geodesic": _cmd_geodesic,
    "distance": _cmd_distance,
    "conjugate": _cmd_conjugate,
    "cutlocus": _cmd_cutlocus,
    "triangle": _cmd_triangle,
    "gtct": _cmd_gtct,
    "rays": _cmd_rays,
    "busemann": _cmd_busemann,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    def out(line=""):
        print(line)

    try:
        return _DISPATCH[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MangoldtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
