"""Command-line interface.

Exit codes: 0 when the predicate holds or the construction succeeds, 1 when
the predicate fails or infeasibility is certified, 2 for usage or data
errors. Output is JSON on stdout (CSV for ``lorenz``) and is deterministic.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__
from .errors import DataError, IncompatibleSpaces, NoApplicablePattern, NotMajorized, PreconditionError, SlotBoundExceeded
from .extremal import extreme_point_check, non_extreme_witness
from .forcing import ForcedInfeasible, hiai_forcing
from .hermitian import au_suite, construct_hermitian_transfer, hermitian_majorize
from .infinite import block_transfer, partition_decompose
from .majorization import _partial_lorenz, cut_criterion, hinge_suite, hull_membership_oracle, majorize, submajorize
from .measure import INF, lambda_scale
from .rational import format_rational
from .serialize import (
    block_transfer_to_json,
    blocks_to_json,
    decomposition_to_json,
    dumps,
    forcing_to_json,
    load_function,
    load_json,
    map_from_json,
    map_to_json,
    presentation_from_json,
    report_to_json,
    verdict_to_json,
    witness_to_json,
)
from .transfer import birkhoff_decompose, build_transfer

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2

RELATIONS = {
    "submaj": submajorize,
    "maj": majorize,
    "cuts": cut_criterion,
    "hinges": hinge_suite,
}


def _pair(args):
    x_path = getattr(args, "to", None) or args.x
    y_path = getattr(args, "source", None) or args.y
    if not x_path or not y_path:
        raise DataError("both x and y inputs are required", "x" if not x_path else "y")
    return load_function(x_path, "x"), load_function(y_path, "y")


def _cmd_check(args):
    x, y = _pair(args)
    if args.relation == "hull":
        holds = hull_membership_oracle(x, y)
        return {"holds": holds, "relation": "hull"}, EXIT_OK if holds else EXIT_FALSE
    verdict = RELATIONS[args.relation](x, y)
    return verdict_to_json(verdict) | {"relation": args.relation}, EXIT_OK if verdict.holds else EXIT_FALSE


def _cmd_transfer(args):
    x, y = _pair(args)
    c = build_transfer(x, y, args.max_slots)
    chain = [{"i": s.i, "j": s.j, "c": format_rational(s.c)} for s in c.chain]
    return {"map": map_to_json(c.map), "slots": c.slots, "chain": chain}, EXIT_OK


def _cmd_birkhoff(args):
    raw = load_json(args.map, "map")
    if isinstance(raw, dict) and "map" in raw:  # output of `transfer`
        raw = raw["map"]
    a = map_from_json(raw, "map")
    return decomposition_to_json(birkhoff_decompose(a)), EXIT_OK


def _cmd_partition(args):
    x, y = _pair(args)
    return blocks_to_json(partition_decompose(x, y)), EXIT_OK


def _cmd_block_transfer(args):
    x, y = _pair(args)
    return block_transfer_to_json(block_transfer(x, y, args.max_slots)), EXIT_OK


def _cmd_hiai(args):
    x, y = _pair(args)
    result = hiai_forcing(x, y, args.depth)
    return forcing_to_json(result), EXIT_FALSE if isinstance(result, ForcedInfeasible) else EXIT_OK


def _cmd_extreme(args):
    x, y = _pair(args)
    report = extreme_point_check(x, y)
    return report_to_json(report), EXIT_OK if report.extreme else EXIT_FALSE


def _cmd_witness(args):
    x, y = _pair(args)
    return witness_to_json(non_extreme_witness(x, y, pattern=args.pattern)), EXIT_OK


def _cmd_hermitian(args):
    tol = args.tolerance
    xp = presentation_from_json(load_json(args.x, "x"), "x", tol)
    yp = presentation_from_json(load_json(args.y, "y"), "y", tol)
    verdict = hermitian_majorize(xp, yp, tol)
    suite = au_suite(xp, yp, tol)
    out = {
        "majorized": verdict_to_json(verdict),
        "au_suite": {
            "eigen_majorization": suite.eigen_majorization,
            "hinge_sums": suite.hinge_sums,
            "convex_traces": suite.convex_traces,
            "agree": suite.agree,
        },
        "exact": xp.exact and yp.exact,
    }
    if verdict.holds:
        out["core"] = map_to_json(construct_hermitian_transfer(xp, yp, tol).core)
    return out, EXIT_OK if verdict.holds else EXIT_FALSE


def lorenz_rows(x, y) -> list[tuple]:
    """``(t, L_x(t), L_y(t))`` at the merged breakpoints of both spectral scales."""
    sx, sy = lambda_scale(x), lambda_scale(y)
    points = {t for t in sx.breakpoints() + sy.breakpoints() if t != INF}
    points.add(0)
    return [(t, _partial_lorenz(sx, t), _partial_lorenz(sy, t)) for t in sorted(points)]


def _cmd_lorenz(args):
    x, y = _pair(args)
    rows = lorenz_rows(x, y)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "lorenz_x", "lorenz_y"])
    for r in rows:
        w.writerow([format_rational(v) for v in r])
    if args.plot:
        from .plotting import plot_lorenz

        plot_lorenz(rows, args.plot)
    return buf.getvalue(), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="majlab", description="Exact majorization checks and doubly stochastic constructions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def pair_cmd(name, func, help_text, optional=False):
        sp = sub.add_parser(name, help=help_text)
        nargs = "?" if optional else None
        sp.add_argument("x", nargs=nargs, help="JSON file with the step function x")
        sp.add_argument("y", nargs=nargs, help="JSON file with the step function y")
        sp.add_argument("--emit", metavar="PATH", help="also write the output to PATH")
        sp.set_defaults(func=func)
        return sp

    sp = pair_cmd("check", _cmd_check, "decide a majorization relation")
    sp.add_argument("--relation", choices=[*RELATIONS, "hull"], default="maj")
    sp = pair_cmd("transfer", _cmd_transfer, "construct a doubly stochastic map sending y to x", optional=True)
    sp.add_argument("--from", dest="source", metavar="Y", help="y input (alternative to the positional)")
    sp.add_argument("--to", metavar="X", help="x input (alternative to the positional)")
    sp.add_argument("--max-slots", type=int, default=None, help="bound on refined slots (env MAJLAB_MAX_SLOTS)")
    sp = sub.add_parser("birkhoff", help="decompose a doubly stochastic map into permutations")
    sp.add_argument("map", help="JSON file with a transfer map")
    sp.add_argument("--emit", metavar="PATH")
    sp.set_defaults(func=_cmd_birkhoff)
    pair_cmd("partition", _cmd_partition, "cut an infinite-trace pair into balanced blocks")
    sp = pair_cmd("block-transfer", _cmd_block_transfer, "doubly stochastic block maps on the enlarged space")
    sp.add_argument("--max-slots", type=int, default=None)
    sp = pair_cmd("hiai", _cmd_hiai, "force rows of any doubly stochastic map sending y to x")
    sp.add_argument("--depth", type=int, default=25)
    pair_cmd("extreme", _cmd_extreme, "extreme-point report for x in the orbit of y")
    sp = pair_cmd("witness", _cmd_witness, "midpoint witness for a non-extreme x")
    sp.add_argument("--pattern", choices=["FourLevel", "OutsideSupport", "DiffuseSplit"], default=None)
    sp = pair_cmd("hermitian", _cmd_hermitian, "eigenvalue majorization suite for two Hermitian matrices")
    sp.add_argument("--tolerance", type=float, default=None, help="numeric path tolerance (default 1e-9)")
    sp = pair_cmd("lorenz", _cmd_lorenz, "CSV of both Lorenz curves at merged breakpoints")
    sp.add_argument("--plot", metavar="PNG", help="also render the two curves to an image file")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "depth", 1) is not None and getattr(args, "depth", 1) < 1:
        print("error: --depth must be a positive integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        out, code = args.func(args)
    except (NotMajorized, NoApplicablePattern) as exc:
        print(f"result: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except (DataError, PreconditionError, IncompatibleSpaces, SlotBoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = out if isinstance(out, str) else dumps(out)
    sys.stdout.write(text)
    if getattr(args, "emit", None):
        Path(args.emit).write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
