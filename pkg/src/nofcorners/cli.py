"""Command-line entry point.

Exit codes: 0 success or verified, 1 verification failure (a counterexample is
printed), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from .corners import (density_report, find_corner, largest_class, transcript_classes)
from .errors import NOFError
from .protocol import (exactly_n, exactly_n_smeared, measure_costs, shift_index_width,
                       verify_sweep)
from .radix import ProtocolParams, select_params
from .shift_cover import (GridSet, cover_bound, find_uncovered, good_set, greedy_cover,
                          randomized_cover)

EXHAUSTIVE_CEILING = 64

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _params(args, N: int | None = None) -> ProtocolParams:
    N = args.n if N is None else N
    if N is None:
        raise UsageError("--n is required")
    return select_params(N, q=args.q, d=args.d, r=args.r, slack=args.budget_slack)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return dict(sorted(cfg.items()))


def _emit(args, records: list[dict], out=None):
    out = out or sys.stdout
    if args.format == "json-lines":
        out.write(json.dumps({"config": _config(args)}, sort_keys=True) + "\n")
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        return
    out.write("# " + " ".join(f"{k}={v}" for k, v in _config(args).items()) + "\n")
    if len(records) == 1:
        width = max(len(k) for k in records[0])
        for k, v in records[0].items():
            out.write(f"{k:<{width}}  {_fmt(v)}\n")
        return
    keys = list(records[0])
    cols = [[k] + [_fmt(r.get(k, "")) for r in records] for k in keys]
    widths = [max(len(c) for c in col) for col in cols]
    for row in zip(*cols):
        out.write("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _smeared_setup(params: ProtocolParams):
    good = good_set(params)
    return good, greedy_cover(good)


def cmd_params(args) -> int:
    p = _params(args)
    rec = p.describe()
    rec["budget_slack"] = p.B - math.ceil(p.lam * p.d)
    rec["leading_term"] = 2 * math.sqrt(2 * p.lam * math.log2(p.N))
    _emit(args, [rec])
    return EXIT_OK


def cmd_simulate(args) -> int:
    p = _params(args)
    X, Y, Z = args.inputs
    if args.mode == "smeared":
        good, F = _smeared_setup(p)
        outcome = exactly_n_smeared(X, Y, Z, p, F, good)
    else:
        outcome = exactly_n(X, Y, Z, p)
    rec = {"X": X, "Y": Y, "Z": Z, "decision": "accept" if outcome.accept else "reject",
           "cost_bits": outcome.cost_bits, "good_pair": outcome.good_pair}
    for name, bits in outcome.transcript.fields().items():
        rec[name] = bits if bits else "-"
        rec[f"{name}_width"] = len(bits)
    rec["transcript"] = outcome.transcript.bits
    _emit(args, [rec])
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    if args.samples is None and p.N > EXHAUSTIVE_CEILING:
        raise UsageError(f"N > {EXHAUSTIVE_CEILING} needs --samples")
    F = good = None
    if args.mode == "smeared":
        good, F = _smeared_setup(p)
    res = verify_sweep(p, samples=args.samples, seed=args.seed, mode=args.mode, F=F, good=good)
    rec = {"N": p.N, "mode": args.mode,
           "sweep": "exhaustive" if args.samples is None else "sampled",
           "checked": res.checked, "mismatches": res.mismatches,
           "counterexample": list(res.first_counterexample) if res.first_counterexample else None,
           "verified": res.ok}
    _emit(args, [rec])
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_build_set(args) -> int:
    p = _params(args)
    classes = transcript_classes(p)
    key = classes.largest_key()
    best = largest_class(classes)
    corner = find_corner(best)
    if args.out:
        best.save(args.out)
    rec = {"N": p.N, "classes": len(classes), "good_size": classes.total(),
           "size": best.size, "density": best.density, "message": key,
           "corner_free": corner is None, "counterexample": list(corner) if corner else None,
           "out": args.out}
    _emit(args, [rec])
    return EXIT_OK if corner is None else EXIT_FAIL


def cmd_check_set(args) -> int:
    S = GridSet.load(args.path)
    corner = find_corner(S)
    rec = {"path": args.path, "N": S.N, "size": S.size, "corner_free": corner is None,
           "counterexample": list(corner) if corner else None}
    _emit(args, [rec])
    return EXIT_OK if corner is None else EXIT_FAIL


def cmd_compare(args) -> int:
    rows = [density_report(_params(args, N)) for N in args.n]
    _emit(args, rows)
    ok = all(r["protocol_corner_free"] and r["behrend_corner_free"] for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cover(args) -> int:
    p = _params(args)
    good = good_set(p)
    if args.method == "random":
        F = randomized_cover(good, seed=args.seed)
    else:
        F = greedy_cover(good)
    hole = find_uncovered(good, F)
    if args.out:
        F.save(args.out)
    rec = {"N": p.N, "method": args.method, "good_fraction": good.density, "shifts": len(F),
           "bound": cover_bound(p.N), "index_bits": shift_index_width(F),
           "verified": hole is None, "uncovered": list(hole) if hole else None, "out": args.out}
    _emit(args, [rec])
    return EXIT_OK if hole is None else EXIT_FAIL


def cmd_costs(args) -> int:
    p = _params(args)
    rep = measure_costs(p, mode=args.mode, samples=args.samples, seed=args.seed)
    _emit(args, [rep.as_record()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=None, help="radix override")
    common.add_argument("--d", type=int, default=None, help="dimension override")
    common.add_argument("--r", type=int, default=None, help="bucket count override")
    common.add_argument("--budget-slack", type=int, default=None,
                        help="bits added to ceil(lambda*d) for the good-pair budget")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["table", "json-lines"], default="table")

    def single_n(sp):
        sp.add_argument("--n", type=int, required=True, help="problem size N")

    parser = argparse.ArgumentParser(prog="nofcorners", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", parents=[common], help="show protocol parameters")
    single_n(sp)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("simulate", parents=[common], help="run one exactly-N instance")
    single_n(sp)
    sp.add_argument("inputs", nargs=3, type=int, metavar=("X", "Y", "Z"))
    sp.add_argument("--mode", choices=["typical", "smeared"], default="typical")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", parents=[common], help="correctness sweep")
    single_n(sp)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--mode", choices=["typical", "smeared"], default="typical")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("build-set", parents=[common], help="extract the largest transcript class")
    single_n(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_build_set)

    sp = sub.add_parser("check-set", parents=[common], help="re-verify a saved grid set")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_check_set)

    sp = sub.add_parser("compare", parents=[common], help="protocol classes vs Behrend")
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("cover", parents=[common], help="build and verify a shift cover")
    single_n(sp)
    sp.add_argument("--method", choices=["greedy", "random"], default="greedy")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("costs", parents=[common], help="transcript length statistics")
    single_n(sp)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--mode", choices=["typical", "smeared"], default="typical")
    sp.set_defaults(func=cmd_costs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UsageError, NOFError, OSError) as exc:
        print(f"nofcorners {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
