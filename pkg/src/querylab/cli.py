"""Command line front end.

Exit status: 0 on success, 1 when verification finds a violation, 2 on usage
errors (including malformed function specs).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from fractions import Fraction

from .amplify import builtin_algorithms, amplify_zero_error, estimate_question_rate
from .atlas import atlas, verify, write_csv
from .boolfn import SpecError, parse_spec, to_index, to_polynomial
from .derandomize import value_f
from .measures import (
    DEFAULT_EPSILON,
    CapExceeded,
    block_sensitivity,
    construct_ndeg_witness,
    measure_report,
)
from .trees import depth, tree_to_json
from .derandomize import extract_tree

GRAMMAR = """function specs:
  tt:<n>:<2^n bits, x1 = least significant index>   hex:<n>:<2^n/4 hex digits>
  or:<n>  and:<n>  parity:<n>  maj:<odd n>  dict:<n>:<i>
  nandtree:<depth>  (N = 2^depth)      addr:<k>  (N = k + 2^k)"""


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(obj, path: str | None) -> None:
    with _output(path) as out:
        out.write(json.dumps(obj, indent=2) + "\n")


def _cmd_measures(args) -> int:
    f = parse_spec(args.spec)
    rep = measure_report(f, args.epsilon, spec=args.spec)
    if args.json:
        _emit(rep.to_dict(), args.out)
    else:
        with _output(args.out) as out:
            for k, v in rep.to_dict().items():
                out.write(f"{k}: {'-' if v is None else v}\n")
    return 0


def _cmd_poly(args) -> int:
    _emit(to_polynomial(parse_spec(args.spec)).to_records(), args.out)
    return 0


def _cmd_ndeg(args) -> int:
    f = parse_spec(args.spec)
    q = construct_ndeg_witness(f)
    obj = {"spec": args.spec, "ndeg": q.degree}
    if args.witness:
        obj["witness"] = q.to_records()
    _emit(obj, args.out)
    return 0


def _cmd_derand(args) -> int:
    f = parse_spec(args.spec)
    q = construct_ndeg_witness(f)
    bs = block_sensitivity(f)
    obj = {"spec": args.spec, "ndeg": q.degree, "bs": bs, "depth_bound": (bs + 1) * q.degree}
    if args.tree_out or args.input is None:
        tree = extract_tree(q, bs)
        obj["tree_depth"] = depth(tree)
        if args.tree_out:
            with open(args.tree_out, "w") as fh:
                json.dump(tree_to_json(tree), fh)
    with _output(args.out) as out:
        if args.input is not None:
            x = to_index(args.input, f.n)
            answer, trace = value_f(q, bs, x)
            obj.update(input=args.input, answer=answer, queries=trace.query_count)
            if args.trace:
                for line in trace.lines():
                    out.write(line + "\n")
        out.write(json.dumps(obj) + "\n")
    return 0


def _cmd_amplify(args) -> int:
    f = parse_spec(args.spec)
    catalog = builtin_algorithms(f)
    if args.alg not in catalog:
        raise UsageError(f"unknown algorithm {args.alg!r} for {args.spec}; choose from {sorted(catalog)}")
    alg = catalog[args.alg]
    x = to_index(args.input, f.n)
    bs = block_sensitivity(f)
    first = amplify_zero_error(f, alg, x, args.seed, bs=bs)
    est = estimate_question_rate(f, alg, x, args.trials, args.seed, bs=bs)
    obj = first.to_dict()
    obj["algorithm"] = alg.name
    obj["declared_error"] = f"{alg.error.numerator}/{alg.error.denominator}"
    obj["estimate"] = est.to_dict()
    _emit(obj, args.out)
    return 0


def _cmd_atlas(args) -> int:
    if args.sample is None and args.n > 4:
        raise UsageError("full enumeration supports n <= 4; pass --sample for n = 5")
    rows = [a.row for a in atlas(args.n, sample=args.sample, seed=args.seed, epsilon=args.epsilon, jobs=args.jobs)]
    with _output(args.out) as out:
        write_csv(rows, out)
    return 0


def _cmd_verify(args) -> int:
    res = verify(args.n, epsilon=args.epsilon, jobs=args.jobs)
    _emit(res.to_dict(), args.out)
    return 0 if res.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="querylab",
        description="Exact query-complexity measures of small Boolean functions.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", help="write output to this file instead of stdout")
        return sp

    sp = add("measures", _cmd_measures, "all complexity measures of one function")
    sp.add_argument("spec")
    sp.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    sp.add_argument("--json", action="store_true")

    sp = add("poly", _cmd_poly, "exact multilinear polynomial")
    sp.add_argument("spec")

    sp = add("ndeg", _cmd_ndeg, "nondeterministic degree")
    sp.add_argument("spec")
    sp.add_argument("--witness", action="store_true", help="also print a witness polynomial")

    sp = add("derand", _cmd_derand, "evaluate through maxonomial queries")
    sp.add_argument("spec")
    sp.add_argument("--input", help="input bits, x1 first")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--tree-out", help="write the full decision tree as JSON")

    sp = add("amplify", _cmd_amplify, "zero-error amplification of a built-in algorithm")
    sp.add_argument("spec")
    sp.add_argument("--alg", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("atlas", _cmd_atlas, "CSV of every function on n variables (or a sample)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sample", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("verify", _cmd_verify, "check the constant-free inequalities on all functions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    sp.add_argument("--jobs", type=int, default=1)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (SpecError, CapExceeded, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
