"""Command-line front end: tables and verification suites as JSON or CSV.

Exit codes: 0 success, 2 computation failure, 3 input validation failure.
Complex numbers serialize as {"re": ..., "im": ...} in JSON and as paired
_re/_im columns in CSV; all floats print in round-trip precision.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from .config import ENV_TOL
from .curves import (
    CurveError,
    expand_from_polynomial,
    expand_from_samples,
    whitehead_a_polynomial,
    BivariatePolynomial,
)
from .gluing import (
    BASE_SHAPES,
    GluingError,
    cusp_eigenvalues,
    residuals,
    solve_shapes,
)
from .holonomy import (
    HolonomyError,
    RepresentationFamily,
    base_representation,
    commutator_trace_minus2,
    relation_residuals,
    trace_identity_l1,
    trace_identity_m1,
)
from .jets import BranchError, JetError
from .surgery import (
    Slope,
    SurgeryError,
    convergence_table,
    filled_curve_sampler,
    solve_cone_structure,
    THETA_MAX,
)
from .tube import (
    TubeError,
    k_expansion_closed_form,
    measure_tube,
    whitehead_k_reference,
)

_ERRORS = (
    BranchError,
    CurveError,
    GluingError,
    HolonomyError,
    JetError,
    SurgeryError,
    TubeError,
)
_UNFILLED_HINT = 2 + 2j
_VERIFY_SEED = 20250819


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # computation failures, so remap to 3
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _c(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(args, payload: dict, header: list[str], rows: list[list]) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _slope_or_exit(parser: _Parser, p: int, q: int, which: str) -> Slope:
    try:
        return Slope.make(p, q)
    except SurgeryError:
        parser.error(f"slope not coprime: {which} = ({p}, {q})")
        raise AssertionError("unreachable")


def _slope_echo(slope: Slope | None) -> dict | None:
    if slope is None:
        return None
    return {"p": slope.p, "q": slope.q, "r": slope.r, "s": slope.s}


def _unfilled_curve(args):
    if args.polynomial:
        with open(args.polynomial) as fh:
            poly = BivariatePolynomial.from_json(fh.read())
    else:
        poly = whitehead_a_polynomial()
    return expand_from_polynomial(poly, -1, -1, _UNFILLED_HINT)


def _curve_for(args, parser: _Parser):
    """(curve, method metadata) for an optionally filled first cusp."""
    if args.p1 is None and args.q1 is None:
        return _unfilled_curve(args), "polynomial", None
    if args.p1 is None or args.q1 is None:
        parser.error("--p1 and --q1 must be given together")
    slope1 = _slope_or_exit(parser, args.p1, args.q1, "(p1, q1)")
    curve = expand_from_samples(filled_curve_sampler(slope1), -1, -1)
    return curve, "sampled", slope1


def cmd_base(args, parser: _Parser) -> int:
    shapes = solve_shapes(BASE_SHAPES.z1, BASE_SHAPES.z2)
    r1, r2 = residuals(shapes)
    ev = cusp_eigenvalues(shapes)
    rep = base_representation()
    g1, g2 = relation_residuals(rep)
    tol = args.tol if args.tol is not None else 1e-12
    ok = max(abs(r1), abs(r2), g1, g2) < tol
    payload = {
        "command": "base",
        "z": [_c(z) for z in shapes.as_tuple()],
        "eigenvalues": {
            "m1": _c(ev.m1), "l1": _c(ev.l1), "m2": _c(ev.m2), "l2": _c(ev.l2)
        },
        "matrices": {
            name: [[_c(m[i, j]) for j in range(2)] for i in range(2)]
            for name, m in
            (("alpha", rep.alpha), ("beta", rep.beta), ("gamma", rep.gamma))
        },
        "residuals": {
            "gluing": [_c(r1), _c(r2)],
            "relations": [g1, g2],
        },
        "tol": tol,
        "pass": ok,
    }
    header = ["field", "value_re", "value_im"]
    rows = []
    for i, z in enumerate(shapes.as_tuple(), start=1):
        rows.append([f"z{i}", z.real, z.imag])
    for name in ("m1", "l1", "m2", "l2"):
        z = getattr(ev, name)
        rows.append([name, z.real, z.imag])
    for name, m in (("alpha", rep.alpha), ("beta", rep.beta), ("gamma", rep.gamma)):
        for i in range(2):
            for j in range(2):
                rows.append([f"{name}{i}{j}", m[i, j].real, m[i, j].imag])
    rows.append(["gluing_residual_1", r1.real, r1.imag])
    rows.append(["gluing_residual_2", r2.real, r2.imag])
    rows.append(["relation_residual_1", g1, 0.0])
    rows.append(["relation_residual_2", g2, 0.0])
    rows.append(["pass", _cell(ok), ""])
    _write(args, payload, header, rows)
    return 0


def cmd_acoeffs(args, parser: _Parser) -> int:
    curve, method, slope1 = _curve_for(args, parser)
    defect = curve.involution_defect()
    payload = {
        "command": "acoeffs",
        "method": method,
        "slope1": _slope_echo(slope1),
        "a1": _c(curve.a1),
        "a2": _c(curve.a2),
        "a3": _c(curve.a3),
        "involution_defect_abs": abs(defect),
    }
    header = [
        "method", "p1", "q1",
        "a1_re", "a1_im", "a2_re", "a2_im", "a3_re", "a3_im", "defect_abs",
    ]
    rows = [[
        method,
        slope1.p if slope1 else "",
        slope1.q if slope1 else "",
        curve.a1.real, curve.a1.imag,
        curve.a2.real, curve.a2.imag,
        curve.a3.real, curve.a3.imag,
        abs(defect),
    ]]
    _write(args, payload, header, rows)
    return 0


def cmd_kcoeffs(args, parser: _Parser) -> int:
    slope2 = _slope_or_exit(parser, args.p2, args.q2, "(p2, q2)")
    curve, method, slope1 = _curve_for(args, parser)
    jet = k_expansion_closed_form(curve.symmetrized(), slope2)
    tol = args.tol if args.tol is not None else 1e-8
    if slope1 is None:
        ref = whitehead_k_reference(slope2)
        agreement = abs(jet.k0 - ref.k0) < tol * max(1.0, abs(ref.k0)) and abs(
            jet.k1 - ref.k1
        ) < tol
        ref_payload = {"k0": ref.k0, "k1": ref.k1, "source": ref.source}
    else:
        ref, agreement, ref_payload = None, None, None
    payload = {
        "command": "kcoeffs",
        "curve_method": method,
        "slope1": _slope_echo(slope1),
        "slope2": _slope_echo(slope2),
        "jet": {"k0": jet.k0, "k1": jet.k1, "source": jet.source},
        "reference": ref_payload,
        "agreement": agreement,
        "tol": tol,
    }
    header = ["p2", "q2", "r2", "s2", "k0_jet", "k1_jet", "k0_ref", "k1_ref", "agreement"]
    rows = [[
        slope2.p, slope2.q, slope2.r, slope2.s,
        jet.k0, jet.k1,
        ref.k0 if ref else None,
        ref.k1 if ref else None,
        agreement,
    ]]
    _write(args, payload, header, rows)
    return 0


def _coprime_slopes(max_norm: int) -> list[tuple[int, int]]:
    out = [(1, 0)]
    for q in range(1, max_norm + 1):
        for p in range(-(max_norm - q), max_norm - q + 1):
            if math.gcd(p, q) == 1:
                out.append((p, q))
    return sorted(out)


def cmd_k1scan(args, parser: _Parser) -> int:
    if args.max < 1:
        parser.error("--max must be at least 1")
    curve, method, slope1 = _curve_for(args, parser)
    curve = curve.symmetrized()
    entries = []
    for p, q in _coprime_slopes(args.max):
        k = k_expansion_closed_form(curve, Slope.make(p, q))
        entries.append({"p2": p, "q2": q, "k0": k.k0, "k1": k.k1})
    payload = {
        "command": "k1scan",
        "curve_method": method,
        "slope1": _slope_echo(slope1),
        "max_norm": args.max,
        "entries": entries,
        "k1_min": min(e["k1"] for e in entries),
        "k1_max": max(e["k1"] for e in entries),
    }
    header = ["p2", "q2", "k0", "k1"]
    rows = [[e["p2"], e["q2"], e["k0"], e["k1"]] for e in entries]
    _write(args, payload, header, rows)
    return 0


def cmd_converge(args, parser: _Parser) -> int:
    slopes = []
    for n in args.n:
        slopes.append(_slope_or_exit(parser, n, 1, "(n, 1)"))
    slopes.sort(key=lambda s: (abs(s.p) + abs(s.q), s.p))
    reference = _unfilled_curve(args)
    rows_data = convergence_table(slopes, reference, include_unfilled=True)
    entries = []
    for row in rows_data:
        if row.failure is not None:
            entries.append({"slope1": row.label, "failure": row.failure})
            continue
        entries.append({
            "slope1": row.label,
            "a1": _c(row.curve.a1),
            "a2": _c(row.curve.a2),
            "a3": _c(row.curve.a3),
            "err_a1": row.errors[0],
            "err_a2": row.errors[1],
            "err_a3": row.errors[2],
            "involution_defect_abs": row.defect,
        })
    payload = {
        "command": "converge",
        "reference": {
            "a1": _c(reference.a1), "a2": _c(reference.a2), "a3": _c(reference.a3)
        },
        "rows": entries,
    }
    header = [
        "slope1", "a1_re", "a1_im", "a2_re", "a2_im", "a3_re", "a3_im",
        "err_a1", "err_a2", "err_a3", "defect_abs", "failure",
    ]
    rows = []
    for row in rows_data:
        if row.failure is not None:
            rows.append([row.label] + [None] * 10 + [row.failure])
        else:
            rows.append([
                row.label,
                row.curve.a1.real, row.curve.a1.imag,
                row.curve.a2.real, row.curve.a2.imag,
                row.curve.a3.real, row.curve.a3.imag,
                row.errors[0], row.errors[1], row.errors[2],
                row.defect, None,
            ])
    _write(args, payload, header, rows)
    return 0


def cmd_tube(args, parser: _Parser) -> int:
    slope2 = _slope_or_exit(parser, args.p2, args.q2, "(p2, q2)")
    slope1 = None
    if args.p1 is not None or args.q1 is not None:
        if args.p1 is None or args.q1 is None:
            parser.error("--p1 and --q1 must be given together")
        slope1 = _slope_or_exit(parser, args.p1, args.q1, "(p1, q1)")
    if not 0.0 < args.theta <= THETA_MAX:
        parser.error(f"--theta must lie in (0, {THETA_MAX}]")
    structure = solve_cone_structure(slope1, slope2, args.theta)
    tm = measure_tube(structure)
    ev = structure.point.eigenvalues
    payload = {
        "command": "tube",
        "slope1": _slope_echo(slope1),
        "slope2": _slope_echo(slope2),
        "theta": tm.theta,
        "m2": _c(ev.m2),
        "l2": _c(ev.l2),
        "cosh2R": tm.cosh2R,
        "R": tm.R,
        "core_length": tm.t,
        "mu": tm.mu,
        "mu_hat_sq": tm.mu_hat_sq,
    }
    header = [
        "theta", "p1", "q1", "p2", "q2", "r2", "s2",
        "m2_re", "m2_im", "l2_re", "l2_im",
        "cosh2R", "R", "core_length", "mu", "mu_hat_sq",
    ]
    rows = [[
        tm.theta,
        slope1.p if slope1 else "", slope1.q if slope1 else "",
        slope2.p, slope2.q, slope2.r, slope2.s,
        ev.m2.real, ev.m2.imag, ev.l2.real, ev.l2.imag,
        tm.cosh2R, tm.R, tm.t, tm.mu, tm.mu_hat_sq,
    ]]
    _write(args, payload, header, rows)
    return 0


def _verify_checks(points: int, seed: int, tol_override: float | None) -> list[dict]:
    rng = np.random.default_rng(seed)
    checks = []

    def record(name: str, default_tol: float, residuals_list: list[float]) -> None:
        tol = tol_override if tol_override is not None else default_tol
        worst = float(max(residuals_list))
        checks.append({
            "check": name,
            "points": len(residuals_list),
            "max_residual": worst,
            "tol": tol,
            "pass": bool(worst < tol),
        })

    def chart_points(radius: float) -> list[tuple[complex, complex]]:
        pts = []
        for _ in range(points):
            off = rng.uniform(-radius, radius, size=4)
            pts.append(
                (
                    BASE_SHAPES.z1 + complex(off[0], off[1]),
                    BASE_SHAPES.z2 + complex(off[2], off[3]),
                )
            )
        return pts

    # gluing residuals on solver outputs
    res = []
    for u, v in chart_points(0.08):
        r1, r2 = residuals(solve_shapes(u, v))
        res.append(max(abs(r1), abs(r2)))
    record("gluing_residual", 1e-12, res)

    # holonomy group relations near the base; walk z branch in substeps
    reps = []
    res = []
    for _ in range(points):
        off = rng.uniform(-0.12, 0.12, size=4)
        x = -1.0 + complex(off[0], off[1])
        y = 2j + complex(off[2], off[3])
        fam = RepresentationFamily()
        for k in range(1, 9):
            s = k / 8.0
            rep = fam.representation(
                -1.0 + s * (x + 1.0), 2j + s * (y - 2j), commit=True
            )
        reps.append(rep)
        res.append(max(relation_residuals(rep)))
    record("group_relations", 1e-11, res)

    # commutator trace identity against the same representations
    res = []
    for rep in reps:
        res.append(abs(commutator_trace_minus2(rep) + rep.y))
    record("commutator_trace", 1e-10, res)

    # cusp trace relations on variety samples; both identities are singular
    # at the base point itself, so evaluate strictly off base
    from .gluing import BranchAnchors

    res = []
    for u, v in chart_points(0.08):
        anchors = BranchAnchors()
        for k in range(1, 9):
            s = k / 8.0
            uu = BASE_SHAPES.z1 + s * (u - BASE_SHAPES.z1)
            vv = BASE_SHAPES.z2 + s * (v - BASE_SHAPES.z2)
            ev = cusp_eigenvalues(solve_shapes(uu, vv), anchors, commit=True)
        lhs_m = (ev.m1 + 1.0 / ev.m1) ** 2
        lhs_l = ev.l1 + 1.0 / ev.l1
        res.append(
            max(
                abs(lhs_m - trace_identity_m1(ev.m2, ev.l2)),
                abs(lhs_l - trace_identity_l1(ev.m2, ev.l2)),
            )
        )
    record("cusp_trace_relations", 1e-9, res)
    return checks


def cmd_verify(args, parser: _Parser) -> int:
    if args.points < 1:
        parser.error("--points must be positive")
    checks = _verify_checks(args.points, args.seed, args.tol)
    ok = all(c["pass"] for c in checks)
    payload = {
        "command": "verify",
        "seed": args.seed,
        "checks": checks,
        "passed": sum(1 for c in checks if c["pass"]),
        "failed": sum(1 for c in checks if not c["pass"]),
        "pass": ok,
    }
    header = ["check", "points", "max_residual", "tol", "pass"]
    rows = [
        [c["check"], c["points"], c["max_residual"], c["tol"], c["pass"]]
        for c in checks
    ]
    _write(args, payload, header, rows)
    return 0 if ok else 2


def _add_common(sub: _Parser) -> None:
    sub.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    sub.add_argument("--output", default=None, help="write to a file instead of stdout")
    sub.add_argument(
        "--tol",
        type=float,
        default=None,
        help=f"override this command's pass/fail thresholds "
        f"(fallback: ${ENV_TOL}, then per-check defaults)",
    )


def _add_slope1(sub: _Parser) -> None:
    sub.add_argument("--unfilled", action="store_true",
                     help="first cusp complete (the default)")
    sub.add_argument("--p1", type=int, default=None, help="first-cusp slope numerator")
    sub.add_argument("--q1", type=int, default=None, help="first-cusp slope denominator")
    sub.add_argument(
        "--polynomial", default=None,
        help="JSON file with the unfilled eigenvalue polynomial "
        '({"terms": [{"dl": ..., "dm": ..., "re": ..., "im": ...}, ...]})',
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="conetube", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("base", parents=[], help="complete-structure report")
    _add_common(sub)
    sub.set_defaults(func=cmd_base)

    sub = subs.add_parser("acoeffs", help="curve coefficients a1, a2, a3")
    _add_common(sub)
    _add_slope1(sub)
    sub.set_defaults(func=cmd_acoeffs)

    sub = subs.add_parser("kcoeffs", help="mu_hat^2 expansion coefficients k0, k1")
    _add_common(sub)
    _add_slope1(sub)
    sub.add_argument("--p2", type=int, required=True, help="second-cusp slope numerator")
    sub.add_argument("--q2", type=int, required=True, help="second-cusp slope denominator")
    sub.set_defaults(func=cmd_kcoeffs)

    sub = subs.add_parser("k1scan", help="k1 over all coprime slopes up to a norm")
    _add_common(sub)
    _add_slope1(sub)
    sub.add_argument("--max", type=int, default=10, help="norm bound |p2| + |q2|")
    sub.set_defaults(func=cmd_k1scan)

    sub = subs.add_parser("converge", help="filled-curve coefficient convergence table")
    _add_common(sub)
    sub.add_argument(
        "--n", type=int, nargs="+", default=[8, 16, 32, 64],
        help="first-cusp slopes (n, 1)",
    )
    sub.add_argument("--polynomial", default=None, help="unfilled polynomial JSON file")
    sub.set_defaults(func=cmd_converge)

    sub = subs.add_parser("tube", help="tube measurement at an explicit cone angle")
    _add_common(sub)
    sub.add_argument("--p1", type=int, default=None)
    sub.add_argument("--q1", type=int, default=None)
    sub.add_argument("--unfilled", action="store_true")
    sub.add_argument("--p2", type=int, required=True)
    sub.add_argument("--q2", type=int, required=True)
    sub.add_argument("--theta", type=float, required=True, help="cone angle, radians")
    sub.set_defaults(func=cmd_tube)

    sub = subs.add_parser("verify", help="structural invariant suite")
    _add_common(sub)
    sub.add_argument("--points", type=int, default=100, help="sample points per check")
    sub.add_argument("--seed", type=int, default=_VERIFY_SEED, help="RNG seed")
    sub.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None:
        env = os.environ.get(ENV_TOL)
        if env is not None:
            try:
                args.tol = float(env)
            except ValueError:
                print(f"conetube: bad {ENV_TOL} value {env!r}", file=sys.stderr)
                return 3
    if getattr(args, "theta", None) is not None and not math.isfinite(args.theta):
        parser.error("--theta must be finite")
    try:
        return args.func(args, parser)
    except _ERRORS as exc:
        print(f"conetube: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"conetube: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
