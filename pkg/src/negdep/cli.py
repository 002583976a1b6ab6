"""Command line front end: ``negdep gen|scramble|verify|gamma|disc|bound|repro``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 budget exceeded.
Tables go to stdout as TSV, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .dependence import (DependenceQuery, RandomPointModel, correlation_number_search,
                         exact_joint, mc_estimate_joint)
from .discrepancy import bound_vs_empirical, min_constant, star_discrepancy_exact
from .errors import BudgetExceeded
from .geometry import AnchoredBox, TestSet, dumps_points, loads_points, read_points
from .repro import TARGETS, ratio_curve, run_repro
from .rng import check_seed, derive_seed
from .sampling import (NetParams, SearchExhausted, gen_lhs, gen_mc, net_from_matrices,
                       search_net_matrices, verify_net)
from .scrambling import SCHEME_NAMES, ScramblingScheme, scramble

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parse_corner_list(text: str) -> tuple:
    try:
        return tuple(Fraction(tok.strip()) for tok in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed coordinate list {text!r}: {exc}")


def parse_testset(spec: str, d: int = None) -> TestSet:
    """``"a1,...,ad"`` -> ``[0,a)``;  ``"a1,...,ad:b1,...,bd"`` -> ``[0,b) \\ [0,a)``.

    Values may be decimals or ``p/q``; all are parsed exactly.
    """
    parts = spec.split(":")
    if len(parts) == 1:
        outer, inner = _parse_corner_list(parts[0]), None
    elif len(parts) == 2:
        inner, outer = _parse_corner_list(parts[0]), _parse_corner_list(parts[1])
        if len(inner) != len(outer):
            raise UsageError("inner and outer corners differ in dimension")
    else:
        raise UsageError(f"malformed test set {spec!r}")
    if d is not None and len(outer) != d:
        raise UsageError(f"test set has dimension {len(outer)}, expected {d}")
    try:
        if inner is None:
            return TestSet(AnchoredBox(outer))
        return TestSet(AnchoredBox(outer), AnchoredBox(inner))
    except ValueError as exc:
        raise UsageError(str(exc))


def parse_index_set(text: str) -> frozenset:
    try:
        J = frozenset(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"malformed index set {text!r}")
    if not J or min(J) < 1:
        raise UsageError("J must be a non-empty list of 1-based indices")
    return J


def _seed(text: str) -> int:
    try:
        return check_seed(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_input(path):
    if path in (None, "-"):
        return loads_points(sys.stdin.read(), label="<stdin>")
    return read_points(path)


# --- model construction ------------------------------------------------------------

def build_model(args) -> RandomPointModel:
    if args.model == "mc":
        _need(args, "d", "n")
        return RandomPointModel.mc(args.d, args.n)
    if args.model == "lhs":
        _need(args, "d", "n")
        return RandomPointModel.lhs(args.d, args.n)
    _need(args, "b", "m")
    d = args.d if args.d is not None else 3
    params = NetParams(args.b, args.t, args.m, d)
    if args.n is not None and args.n != params.N:
        raise UsageError(f"--n {args.n} conflicts with b^m = {params.N}")
    net = net_from_matrices(params, search_net_matrices(params, nth=args.net_index))
    kw = {"symmetrize": args.symmetrize}
    if args.depth is not None:
        kw["depth"] = args.depth
    scheme = ScramblingScheme.for_net(args.scheme, params, **kw)
    return RandomPointModel.scrambled_net(params, net, scheme)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _add_model_args(p, model_required=True):
    p.add_argument("--model", choices=["lhs", "mc", "net"], required=model_required)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--m", type=int)
    p.add_argument("--scheme", choices=sorted(SCHEME_NAMES), default="nested-uniform")
    p.add_argument("--depth", type=int)
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--net-index", type=int, default=0,
                   help="use the n-th net found by the lexicographic matrix search")


# --- commands ------------------------------------------------------------------------

def cmd_gen(args):
    if args.kind == "lhs":
        _need(args, "d", "n")
        p, _ = gen_lhs(args.d, args.n, args.seed, exact=args.exact)
    elif args.kind == "mc":
        _need(args, "d", "n")
        p = gen_mc(args.d, args.n, args.seed, exact=args.exact)
    else:
        _need(args, "b", "m", "d")
        params = NetParams(args.b, args.t, args.m, args.d)
        mats = search_net_matrices(params, nth=args.net_index)
        p = net_from_matrices(params, mats)
        print("matrices: " + " | ".join(
            ";".join("".join(map(str, row)) for row in C) for C in mats), file=sys.stderr)
    _emit(dumps_points(p), args.out)
    return EXIT_OK


def cmd_verify(args):
    params = NetParams(args.b, args.t, args.m, args.d if args.d else 1)
    p = _read_input(args.input)
    if args.d is None:
        params = NetParams(args.b, args.t, args.m, p.d)
    rep = verify_net(p, params)
    print(f"net\t{'PASS' if rep.ok else 'FAIL'}\tchecked={rep.checked}\tviolations={len(rep.violations)}")
    for e, c in rep.violations:
        print(f"violation\tlevels={','.join(map(str, e.levels))}\t"
              f"indices={','.join(map(str, e.indices))}\tcount={c}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_scramble(args):
    p = _read_input(args.input)
    scheme = ScramblingScheme.from_name(args.scheme, depth=args.depth, base=args.b,
                                        symmetrize=args.symmetrize, seed=args.seed)
    out, _ = scramble(p, scheme)
    _emit(dumps_points(out), args.out)
    return EXIT_OK


def cmd_gamma(args):
    model = build_model(args)
    if args.action == "search":
        cert = correlation_number_search(model, budget=args.budget, family=args.family,
                                         mode="estimated" if args.estimate else "exact",
                                         reps=args.reps, seed=args.seed)
        print(cert.line())
        return EXIT_OK
    if args.set is None or args.J is None:
        raise UsageError("--set and --J are required")
    S = parse_testset(args.set, model.d)
    J = parse_index_set(args.J)
    if max(J) > model.N:
        raise UsageError(f"J refers to point {max(J)} but N = {model.N}")
    q = DependenceQuery(S, J, args.side)
    if args.action == "exact":
        rep = exact_joint(q, model)
    else:
        rep = mc_estimate_joint(q, model, args.reps, args.seed)
    print(rep.line())
    return EXIT_OK


def cmd_disc(args):
    p = _read_input(args.input)
    v = star_discrepancy_exact(p)
    if isinstance(v, Fraction):
        print(f"dstar={v.numerator}/{v.denominator}\tdecimal={float(v):.12g}")
    else:
        print(f"dstar={v!r}")
    return EXIT_OK


def cmd_bound(args):
    if args.action == "min-c":
        if args.rate is None:
            raise UsageError("--rate is required")
        print(f"{min_constant(args.rate):.4f}")
        return EXIT_OK
    if args.c is None:
        raise UsageError("--c is required")
    model = build_model(args)
    seeds = [derive_seed(args.seed, "bound", k) for k in range(args.seeds)]
    chk = bound_vs_empirical(model, args.c, seeds)
    print("c\tthreshold\tfraction_within\tsuccess_probability\tstatus")
    print(f"{chk.c}\t{chk.threshold:.6g}\t{chk.fraction_within:.6g}\t"
          f"{chk.success_probability:.6g}\t{'PASS' if chk.consistent else 'FAIL'}")
    return EXIT_OK if chk.consistent else EXIT_FAIL


def cmd_repro(args):
    overrides = {}
    if args.eps is not None:
        overrides["eps"] = Fraction(args.eps)
    if args.emit_curve and args.target == "all":
        raise UsageError("--emit-curve needs a single target")
    checks = run_repro(args.target, **overrides)
    print("target\tcheck\tobserved\texpected\ttolerance\tstatus")
    for c in checks:
        print(c.row())
    if args.emit_curve:
        rows = ratio_curve(args.target)
        with open(args.emit_curve, "w", encoding="utf-8") as fh:
            fh.write("eps\tratio\n")
            for e, r in rows:
                fh.write(f"{float(e):.6g}\t{r:.12g}\n")
        print(f"curve written to {args.emit_curve}", file=sys.stderr)
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="negdep", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a point set")
    g.add_argument("kind", choices=["lhs", "mc", "net"])
    g.add_argument("--d", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--b", type=int, default=2)
    g.add_argument("--t", type=int, default=0)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--exact", action="store_true", help="rational uniforms (denominator 2^53)")
    g.add_argument("--net-index", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="verify structural properties")
    v.add_argument("what", choices=["net"])
    v.add_argument("--b", type=int, required=True)
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--d", type=int)
    v.add_argument("--in", dest="input")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scramble", help="scramble a point set")
    s.add_argument("--scheme", choices=sorted(SCHEME_NAMES), required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--symmetrize", action="store_true")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_scramble)

    gm = sub.add_parser("gamma", help="dependence ratios and correlation-number search")
    gm.add_argument("action", choices=["exact", "estimate", "search"])
    _add_model_args(gm)
    gm.add_argument("--set")
    gm.add_argument("--J")
    gm.add_argument("--side", choices=["upper", "lower"], default="upper")
    gm.add_argument("--reps", type=int, default=10000)
    gm.add_argument("--seed", type=_seed, default=0)
    gm.add_argument("--budget", type=int, default=10**5)
    gm.add_argument("--family", choices=["C", "D"], default="D")
    gm.add_argument("--estimate", action="store_true", help="search with estimated ratios")
    gm.set_defaults(func=cmd_gamma)

    dc = sub.add_parser("disc", help="exact star discrepancy of a point file")
    dc.add_argument("--in", dest="input", required=True)
    dc.set_defaults(func=cmd_disc)

    bd = sub.add_parser("bound", help="probabilistic discrepancy bound")
    bd.add_argument("action", choices=["min-c", "check"])
    bd.add_argument("--rate", type=float)
    bd.add_argument("--c", type=float)
    bd.add_argument("--seeds", type=int, default=200)
    bd.add_argument("--seed", type=_seed, default=0)
    _add_model_args(bd, model_required=False)
    bd.set_defaults(func=cmd_bound)

    rp = sub.add_parser("repro", help="reproduce a quantitative claim")
    rp.add_argument("target", choices=list(TARGETS) + ["all"])
    rp.add_argument("--eps", help="override eps (decimal or p/q)")
    rp.add_argument("--emit-curve", metavar="FILE")
    rp.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "bound" and args.action == "check" and args.model is None:
        parser.error("bound check needs --model")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"negdep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"negdep: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SearchExhausted as exc:
        print(f"negdep: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"negdep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
