"""Command-line front end.

Exit codes: 0 success/pass, 1 analytic failure (fail verdict, no root,
indeterminate classification), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import classify as cl
from . import families as fam
from . import residual as res
from .expr import DomainError, ExprError
from .funcmodel import DEFAULT_SPAN, Func1D, Interval, SamplePlan, finite_window, parse_interval
from .qam import GeneratorError, InversionError, MeanWeights, QuasiArithmeticMean, resolve_generator

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# options whose values may legitimately start with '-'
_VALUE_OPTIONS = ("--phi", "--psi", "--generator", "--domain", "--a", "--b", "--c1", "--c2")


class UsageError(Exception):
    pass


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _emit(args, text: str):
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _alpha(text: str) -> float:
    a = float(text)
    if not 0 < a < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return a


def _setting(args):
    """Generator, declared domain and the finite window actually scanned."""
    declared = parse_interval(args.domain) if args.domain else None
    gen = resolve_generator(args.generator, declared, span=args.span)
    E = gen.E
    window = finite_window(E, args.span)
    return gen, E, window


def _pair(args, E: Interval):
    if not args.phi or not args.psi:
        raise UsageError("--phi and --psi are required")
    return Func1D.from_expr(args.phi, E), Func1D.from_expr(args.psi, E)


def _domain_info(gen, E, window) -> dict:
    return {
        "generator": gen.name,
        "declaredDomain": [E.lo, E.hi],
        "window": [window.lo, window.hi],
        "clamped": window != E,
        "range": [gen.J.lo, gen.J.hi],
        "rangeSemiInfinite": gen.J.semi_infinite,
    }


def cmd_verify(args) -> int:
    gen, E, window = _setting(args)
    phi, psi = _pair(args, E)
    q = QuasiArithmeticMean(gen, MeanWeights(args.alpha))
    plan = SamplePlan(window, args.samples, seed=args.seed)
    report = res.verify_grid(phi, psi, q, plan, args.tol, n_random=args.random_pairs)
    info = _domain_info(gen, E, window)
    if args.output == "json":
        _emit(args, _dump({**report.to_dict(), "alpha": args.alpha, **info}))
    else:
        verdict = "PASS" if report.passed else "FAIL"
        lines = [
            f"{verdict}: max scaled residual {report.max_scaled:.3e} (tol {report.tolerance:g}) over {report.count} pairs",
            f"generator {gen.name}, alpha {args.alpha:g}, domain {E}, scanned window {window}"
            + (" (clamped)" if info["clamped"] else ""),
        ]
        if report.error:
            lines.append(f"evaluation failed: {report.error}")
        if not report.passed:
            x, y = report.argmax_pair
            lines.append(f"witness pair: x = {x:.17g}, y = {y:.17g}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_classify(args) -> int:
    opts = cl.ClassifyOptions(grid_n=args.grid or 1024)
    if args.samples_file:
        try:
            F, G = cl.read_samples_csv(args.samples_file)
        except OSError as exc:
            raise UsageError(str(exc)) from None
        report = cl.classify_pair(F, G, F.domain, opts)
    else:
        gen, E, window = _setting(args)
        phi, psi = _pair(args, E)
        report = cl.classify_original(phi, psi, gen, window, opts)
        if window != E:
            report.notes.append(f"domain {E} clamped to window {window}")
    if args.output == "human":
        mu = "" if report.mu is None else f", mu = {report.mu:.12g}"
        text = f"{report.case}{mu}\n" + "".join(f"  note: {n}\n" for n in report.notes)
    else:
        text = _dump(report.to_dict())
    _emit(args, text)
    return EXIT_FAIL if report.case == cl.INDETERMINATE else EXIT_OK


def cmd_locate(args) -> int:
    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required")
    a, b = float(args.a), float(args.b)
    if not a < b:
        raise UsageError("need a < b")
    E = parse_interval(args.domain) if args.domain else Interval(-math.inf, math.inf)
    if not (E.lo <= a and b <= E.hi):
        raise UsageError(f"[a, b] must lie in the domain {E}")
    phi, psi = _pair(args, E)
    try:
        roots = res.locate_mean_points(phi, psi, a, b, grid=args.grid or res.DEFAULT_ROOT_GRID)
    except res.IdenticallyZero:
        _emit(args, _dump({"a": a, "b": b, "points": None, "identicallyZero": True}) if args.output == "json"
              else "identically zero residual: every point of (a, b) is a mean-value point\n")
        return EXIT_OK
    except res.NoSignChange as exc:
        _emit(args, _dump({"a": a, "b": b, "points": [], "note": str(exc)}) if args.output == "json"
              else f"{exc}\n")
        return EXIT_FAIL
    if args.output == "json":
        _emit(args, _dump({"a": a, "b": b, "points": roots}))
    else:
        _emit(args, "".join(f"{c:.10f}\n" for c in roots))
    return EXIT_OK


def cmd_counterexample(args) -> int:
    pair = fam.counterexample_pair(args.c1 or 0.0, args.c2 or 0.0)
    J = Interval(0.0, 1.0)
    q = QuasiArithmeticMean(resolve_generator("identity", J), MeanWeights(args.alpha))
    tol = args.tol if args.tol_given else 1e-12
    report = res.verify_grid(pair.F, pair.G, q, SamplePlan(J, args.samples, seed=args.seed), tol,
                             n_random=args.random_pairs)
    n = args.grid or 4096
    u_f = cl.decompose_support(pair.F.deriv1, J, n)
    u_g = cl.decompose_support(pair.G.deriv1, J, n)
    disjoint = not cl._overlaps(u_f.intervals, u_g.intervals)
    if args.output == "json":
        _emit(args, _dump({
            **report.to_dict(),
            "alpha": args.alpha,
            "U_f": [[iv.lo, iv.hi] for iv in u_f.intervals],
            "U_g": [[iv.lo, iv.hi] for iv in u_g.intervals],
            "disjoint": disjoint,
        }))
    else:
        verdict = "PASS" if report.passed else "FAIL"
        lines = [
            f"{verdict}: max scaled residual {report.max_scaled:.3e} (tol {tol:g}), alpha {args.alpha:g}, J = (0, 1)",
            "U_f = " + (" u ".join(str(iv) for iv in u_f.intervals) or "empty"),
            "U_g = " + (" u ".join(str(iv) for iv in u_g.intervals) or "empty"),
            f"U_f and U_g disjoint: {'yes' if disjoint else 'no'}",
        ]
        if not report.passed:
            x, y = report.argmax_pair
            lines.append(f"witness pair: x = {x:.17g}, y = {y:.17g}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_grid(args) -> int:
    gen, E, window = _setting(args)
    phi, psi = _pair(args, E)
    q = QuasiArithmeticMean(gen, MeanWeights(args.alpha))
    plan = SamplePlan(window, args.samples, seed=args.seed)
    try:
        text = res.residual_csv_text(phi, psi, q, plan)
    except (DomainError, InversionError) as exc:
        raise UsageError(f"residual grid could not be evaluated: {exc}") from None
    _emit(args, text)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "locate": cmd_locate,
    "counterexample": cmd_counterexample,
    "grid": cmd_grid,
}

_DEFAULT_OUTPUT = {"verify": "human", "classify": "json", "locate": "human", "counterexample": "human", "grid": "csv"}


class _TolAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.tol_given = True


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", help="expression in x for phi")
    common.add_argument("--psi", help="expression in x for psi")
    common.add_argument("--generator", default="identity",
                        help="identity | ln | exp | power:<p> | expression in x (default identity)")
    common.add_argument("--alpha", type=_alpha, default=0.5, help="weight alpha in (0,1) (default 0.5)")
    common.add_argument("--domain", help="open domain 'lo,hi'; -inf/inf allowed (default: generator's natural domain)")
    common.add_argument("--span", type=float, default=DEFAULT_SPAN, help="clamp length for infinite domains (default 20)")
    common.add_argument("--samples", type=int, default=101, help="uniform sample count (default 101)")
    common.add_argument("--random-pairs", type=int, default=None, help="extra random pairs (default: --samples)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=1e-9, action=_TolAction)
    common.add_argument("--output", choices=("json", "csv", "human"))
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--grid", type=int, help="scan/support grid size")
    common.add_argument("--a", help="left end for locate")
    common.add_argument("--b", help="right end for locate")
    common.add_argument("--c1", type=float, help="counterexample constant for F")
    common.add_argument("--c2", type=float, help="counterexample constant for G")
    common.add_argument("--samples-file", help="CSV with header x,F,G for classify")

    parser = argparse.ArgumentParser(prog="cauchymean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "check the equation on a grid of pairs",
        "classify": "detect the solution family of a pair",
        "locate": "find Cauchy mean-value points in (a, b)",
        "counterexample": "bounded-interval example with disjoint supports",
        "grid": "write the residual grid as CSV",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    parser.set_defaults(tol_given=False)
    return parser


def _join_values(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    if args.output is None:
        args.output = _DEFAULT_OUTPUT[args.command]
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ExprError, GeneratorError, InversionError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
