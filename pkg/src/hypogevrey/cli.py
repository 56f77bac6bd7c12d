"""Command-line front end.

Exit codes: 0 ok, 1 usage or parse error, 2 not hypoelliptic, 3 inconclusive.
"""
from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import classify, gevrey, hypo
from .polyhedron import symbol_polyhedron
from .report import dumps, render_text, tool_version
from .sampling import SamplingConfig
from .symbol import PolynomialSymbol, SymbolSyntaxError, format_symbol, parse_symbol

EXIT_OK, EXIT_USAGE, EXIT_NOT_HYPOELLIPTIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3

HEAT_SYMBOL = "i*x1 + x2^2"
HEAT_KERNEL_BOX = ((1.0, 2.0), (-1.0, 1.0))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("symbol_text", nargs="?", metavar="SYMBOL", help="symbol, e.g. 'i*x1 + x2^2'")
    p.add_argument("--symbol", dest="symbol_opt", metavar="TEXT")
    p.add_argument("--dim", type=int, help="number of variables (default: largest xN used)")
    d = SamplingConfig()
    p.add_argument("--rmin", type=float, default=d.r_min)
    p.add_argument("--rmax", type=float, default=d.r_max)
    p.add_argument("--radii", type=int, default=d.radii_count)
    p.add_argument("--dirs", type=int, default=d.directions_count)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--tol", type=float, default=d.growth_tolerance, help="growth tolerance")
    p.add_argument("--denom-max", type=int, default=12)
    p.add_argument("--exp-cap", type=Fraction, default=None, help="exponent cap (default: order of P)")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hypogevrey", description="Newton polyhedra, hypoellipticity evidence and Gevrey classes")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("analyze", "polyhedron, classification, H and Gevrey classes"),
        ("classify", "polyhedron and classification only"),
        ("hpoly", "polyhedron of hypoellipticity and Gevrey classes"),
        ("verify", "full analysis plus numerical Gevrey checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "verify":
            p.add_argument("--orders", type=int, default=10, help="max |α| for derivative fits")
            p.add_argument("--jmax", type=int, default=20)
            p.add_argument("--witness-count", type=int, default=50)
            p.add_argument("--box", default=None, help="'a1,b1;a2,b2' (default: unit cube)")
    return parser


def _infer_dimension(text: str) -> int:
    idx = [int(m) for m in re.findall(r"x(\d+)", text)]
    return max(idx, default=1)


def _symbol(args) -> tuple[str, PolynomialSymbol]:
    if args.symbol_text and args.symbol_opt:
        raise UsageError("give the symbol either positionally or with --symbol, not both")
    text = args.symbol_text or args.symbol_opt
    if not text:
        raise UsageError("missing symbol")
    dim = args.dim if args.dim is not None else _infer_dimension(text)
    if dim < 1:
        raise UsageError("--dim must be positive")
    return text, parse_symbol(text, dim)


def _config(args) -> SamplingConfig:
    try:
        return SamplingConfig(
            r_min=args.rmin,
            r_max=args.rmax,
            radii_count=args.radii,
            directions_count=args.dirs,
            seed=args.seed,
            growth_tolerance=args.tol,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _late_over_early(per_order: dict) -> float | None:
    orders = sorted(o for o in per_order if o >= 1)
    if len(orders) < 2:
        return None
    k = min(4, len(orders) // 2)
    early = max(per_order[o] for o in orders[:k])
    late = max(per_order[o] for o in orders[-k:])
    return late / early if early > 0 else float("inf")


def _fit_block(table, cls: hypo.GevreyClass, which: str) -> dict:
    fit = gevrey.fit_gevrey_constant(table, cls.polyhedron, cls.s)
    out = fit.to_json()
    out.pop("per_alpha")
    out["class"] = which
    out["s"] = cls.s
    out["late_over_early"] = _late_over_early(fit.per_order_max)
    out["box"] = [list(b) for b in table.box]
    return out


def run(args) -> tuple[dict, int]:
    text, P = _symbol(args)
    cfg = _config(args)
    stage = args.command
    report: dict = {
        "input": {"symbol": text, "dimension": P.dimension, "normalized": format_symbol(P)},
        "config": {
            "sampling": cfg.to_json(),
            "denom_max": args.denom_max,
            "exp_cap": args.exp_cap,
            "command": stage,
        },
        "version": tool_version(),
    }
    if P.is_constant():
        raise UsageError("the symbol is constant")

    gamma = symbol_polyhedron(P)
    if stage != "hpoly":
        block = gamma.to_json()
        report["polyhedron"] = block
    mq = classify.mq_test(P, cfg)
    hy = classify.hypoellipticity_test(P, cfg)
    if stage != "hpoly":
        report["classification"] = {"mq": mq.to_json(), "hypoelliptic": hy.to_json()}
    code = EXIT_OK
    if hy.kind == classify.FAILS:
        code = EXIT_NOT_HYPOELLIPTIC
    elif hy.kind == classify.INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    if stage == "classify":
        return report, code

    if hy.kind == classify.FAILS:
        report["hypo"] = {"error": "not hypoelliptic", "reason": hy.reason}
        return report, code
    try:
        H = hypo.build_H(P, cfg, args.denom_max, args.exp_cap, verdict=hy)
    except hypo.HypoPolyhedronError as exc:
        report["hypo"] = {"error": type(exc).__name__, "reason": str(exc)}
        return report, EXIT_NOT_HYPOELLIPTIC if isinstance(exc, hypo.NotHypoelliptic) else EXIT_INCONCLUSIVE
    Q = hypo.q_operator(H, H.sigma, cfg=cfg)
    classes = hypo.gevrey_index(H, H.sigma, P=P, mq_verdict=mq)
    report["hypo"] = {
        "vertices": H.polyhedron.to_json()["vertices"],
        "facets": H.polyhedron.to_json()["facets"],
        "regular": H.polyhedron.regular,
        "sigma": H.sigma,
        "q_operator": format_symbol(Q),
        "q_terms": [list(a) for a in Q.terms],
        "gevrey": classes.to_json(),
        "denom_max": H.denom_max,
        "exponent_cap": H.exponent_cap,
        "tolerance": H.tolerance,
        "accepted_count": len(H.accepted),
        "certificates": list(H.certificates),
        "label": classify.EVIDENCE,
    }
    if stage != "verify":
        return report, code

    if args.jmax < 0 or args.orders < 0 or args.witness_count < 1:
        raise UsageError("--jmax and --orders must be non-negative and --witness-count positive")
    if args.box is None:
        omega = tuple((0.0, 1.0) for _ in range(P.dimension))
    else:
        try:
            omega = gevrey.parse_box(args.box)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if len(omega) != P.dimension:
            raise UsageError("--box dimension differs from the symbol's")
    scan = gevrey.iterate_growth_scan(P, Q, H.sigma, omega, args.jmax, args.witness_count, args.seed)
    use = classes.sharp_class if classes.sharp_class.s >= 1 else classes.paper_class
    which = "sharp" if use is classes.sharp_class else "paper"
    combo = scan.tables[: min(4, len(scan.tables))]
    table = gevrey.exponential_table([t.witness for t in combo], None, omega, args.orders)
    fits = {"exponential_sum": _fit_block(table, use, which)}
    if P == parse_symbol(HEAT_SYMBOL, 2):
        fits["heat_kernel"] = _fit_block(gevrey.heat_kernel_table(HEAT_KERNEL_BOX, args.orders), use, which)
    report["verification"] = {
        "jmax": args.jmax,
        "orders": args.orders,
        "box": [list(b) for b in omega],
        "iterate_growth": scan.to_json(include_rows=True),
        "gevrey_fit": fits,
        "label": classify.EVIDENCE,
    }
    report["config"].update({"orders": args.orders, "jmax": args.jmax, "witness_count": args.witness_count})
    return report, code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, code = run(args)
    except SymbolSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    out = dumps(report) if args.format == "json" else render_text(report)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
