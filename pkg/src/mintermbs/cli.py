"""Command-line front end.

Records are written as JSON lines (default) or CSV with a header row, to stdout
or ``--out``.  Errors print one JSON line ``{"error": kind, "reason": ...}`` to
stderr and exit with the code in ``EXIT_CODES``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys

import numpy as np

from .core import BitString, ExplicitGroup, Pattern, Permutation, random_pattern
from .dependency_bound import monte_carlo_zero_probability
from .errors import (
    ConstructionFailure,
    InvalidArgumentError,
    LogicError,
    ResourceLimitError,
)
from .functions import MintermFunction
from .lower_bound import DEFAULT_MAX_RETRIES, lower_bound_pipeline
from .sensitivity import BRUTE_FORCE_MAX_N, GLOBAL_INPUT_LIMIT, bs_at, global_measures
from .upper_bound import (
    DEFAULT_DOMAIN_CONSTANT,
    DEFAULT_MAX_ATTEMPTS,
    CoveringPatternSpec,
    bs0_upper_bound,
    construct_covering_pattern,
    construct_low_bs,
    low_bs_k,
)
from .verification import run_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_CONSTRUCTION = 3
EXIT_RESOURCE = 4

EXIT_CODES = {
    InvalidArgumentError: (EXIT_INVALID, "invalid-argument"),
    ConstructionFailure: (EXIT_CONSTRUCTION, "construction-failure"),
    ResourceLimitError: (EXIT_RESOURCE, "resource-limit"),
    LogicError: (EXIT_VERIFY, "logic-error"),
}

SCALING_COLUMNS = [
    "n", "k_formula", "k", "dom_size", "bs1_bound", "bs0_bound", "branch", "witness_count",
    "half_domain", "stubborn", "stubborn_free", "attempts", "seed",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flatten(record: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in record.items():
        if isinstance(value, dict):
            out.update(_flatten(value, f"{prefix}{key}_"))
        else:
            out[f"{prefix}{key}"] = value
    return out


def render(records: list, fmt: str, columns: list | None = None) -> str:
    if fmt == "json":
        return "".join(json.dumps(r) + "\n" for r in records)
    rows = [_flatten(r) for r in records]
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    if args.entropy:
        return secrets.randbits(32)
    raise InvalidArgumentError("randomized subcommand needs --seed (or --entropy)")


def _function(args) -> MintermFunction:
    n = getattr(args, "n", None)
    pattern = Pattern.from_str(args.pattern, n)
    if getattr(args, "generator", None):
        gens = tuple(Permutation([int(v) for v in g.split(",")]) for g in args.generator)
        return MintermFunction(ExplicitGroup(gens), pattern)
    return MintermFunction.cyclic(pattern)


def cmd_eval(args):
    f = _function(args)
    x = BitString.from_str(args.x)
    _emit(args, f"{f.eval(x)}\n")


def cmd_measure(args):
    f = _function(args)
    if args.x is None:
        rep = global_measures(f, args.input_limit, args.bf_limit)
        rec = rep.to_record()
        rec["explored_inputs"] = rep.explored_inputs
    else:
        x = BitString.from_str(args.x)
        mode = args.mode
        if mode == "auto":
            mode = "structured_zero" if f.eval(x) == 0 else "bruteforce"
        w = bs_at(f, x, mode, args.bf_limit)
        rec = {"n": f.n, "x": str(x), "value": w.value_at_input, "mode": mode,
               "bs_at": w.count, "witness_blocks": w.blocks_text()}
    _emit(args, render([rec], args.format))


def cmd_lower_witness(args):
    seed = _seed(args)
    if args.pattern is not None:
        f = _function(args)
    elif args.random_dom is not None:
        p = random_pattern(args.n, args.random_dom, np.random.default_rng([seed, 0xD0]))
        f = MintermFunction.cyclic(p)
    else:
        raise InvalidArgumentError("give --pattern or --random-dom")
    rep = lower_bound_pipeline(f, seed, args.max_retries, args.slack)
    rec = rep.to_record()
    rec["witness_blocks"] = rep.witness.blocks_text()
    _emit(args, render([rec], args.format))


def cmd_construct(args):
    seed = _seed(args)
    spec = CoveringPatternSpec(args.k, args.c)
    rep = construct_covering_pattern(spec, seed, args.max_attempts, algorithm=args.algorithm)
    _emit(args, render([rep.to_record()], args.format))


def cmd_build_f(args):
    seed = _seed(args)
    f, rep = construct_low_bs(args.n, seed, args.max_attempts)
    rec = {"n": args.n, "k": rep.k, "dom_size": rep.dom_size, "bs1_bound": rep.dom_size,
           "bs0_bound": bs0_upper_bound(args.n), "attempts": rep.attempts, "seed": seed,
           "pattern": str(f.pattern)}
    _emit(args, render([rec], args.format))


def cmd_janson(args):
    seed = _seed(args)
    a = [int(v) for v in args.a.split(",")]
    res = monte_carlo_zero_probability(args.k, a, args.trials, seed, workers=args.jobs,
                                       parallel=args.jobs > 1)
    _emit(args, render([res.to_record()], args.format))


def scaling_rows(n_list, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> list:
    rows = []
    for n in n_list:
        f, rep = construct_low_bs(n, seed, max_attempts, clamp_k=True)
        lb = lower_bound_pipeline(f, seed)
        rows.append({
            "n": n, "k_formula": low_bs_k(n), "k": rep.k, "dom_size": rep.dom_size,
            "bs1_bound": rep.dom_size, "bs0_bound": f"{bs0_upper_bound(n):.6f}",
            "branch": lb.branch, "witness_count": lb.witness_count, **lb.thresholds,
            "attempts": rep.attempts, "seed": seed,
        })
    return rows


def cmd_scaling(args):
    seed = _seed(args)
    n_list = [int(v) for v in args.n_list.split(",") if v.strip()]
    rows = scaling_rows(n_list, seed, args.max_attempts)
    fmt = args.format if args.format_given else "csv"
    _emit(args, render(rows, fmt, SCALING_COLUMNS if fmt == "csv" else None))


def cmd_verify(args):
    results = run_checks(args.level, args.seed or 0)
    _emit(args, "".join(r.line() + "\n" for r in results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mintermbs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, randomized=False):
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=None)
        if randomized:
            p.add_argument("--entropy", action="store_true",
                           help="draw a fresh seed (recorded in the output)")
        return p

    p = common(sub.add_parser("eval", help="evaluate f at one input"))
    p.add_argument("--pattern", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--generator", action="append", help="explicit group generator images a,b,c")
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("measure", help="exact s / bs, globally or at one input"))
    p.add_argument("--pattern", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--x", default=None)
    p.add_argument("--mode", choices=("auto", "bruteforce", "structured_zero"), default="auto")
    p.add_argument("--generator", action="append")
    p.add_argument("--input-limit", type=int, default=GLOBAL_INPUT_LIMIT)
    p.add_argument("--bf-limit", type=int, default=BRUTE_FORCE_MAX_N)
    p.set_defaults(func=cmd_measure)

    p = common(sub.add_parser("lower-witness", help="run the lower-bound witness pipeline"), True)
    p.add_argument("--pattern", default=None)
    p.add_argument("--random-dom", type=int, default=None,
                   help="use a random pattern with this many defined positions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--generator", action="append")
    p.add_argument("--max-retries", type=int, default=DEFAULT_MAX_RETRIES)
    p.add_argument("--slack", type=float, default=1.0)
    p.set_defaults(func=cmd_lower_witness)

    p = common(sub.add_parser("construct", help="build a covering pattern"), True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=DEFAULT_MAX_ATTEMPTS)
    p.add_argument("--c", type=float, default=DEFAULT_DOMAIN_CONSTANT)
    p.add_argument("--algorithm", choices=("indexed", "naive"), default="indexed")
    p.set_defaults(func=cmd_construct)

    p = common(sub.add_parser("build-f", help="build the low-bs function for length n"), True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=DEFAULT_MAX_ATTEMPTS)
    p.set_defaults(func=cmd_build_f)

    p = common(sub.add_parser("janson", help="dependency bound vs Monte Carlo"), True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", default="0,1,2,3")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_janson)

    p = common(sub.add_parser("scaling", help="per-N table of bounds and witnesses (CSV)"), True)
    p.add_argument("--n-list", required=True)
    p.add_argument("--max-attempts", type=int, default=DEFAULT_MAX_ATTEMPTS)
    p.set_defaults(func=cmd_scaling)

    p = common(sub.add_parser("verify", help="run oracle and lemma self-checks"))
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)
    return parser


def _fail(code: int, kind: str, reason: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "code": code, "reason": reason}) + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_INVALID, "invalid-argument", str(exc))
    args.format_given = args.format is not None
    if args.format is None:
        args.format = "json"
    try:
        code = args.func(args)
    except tuple(EXIT_CODES) as exc:
        for cls, (code, kind) in EXIT_CODES.items():
            if isinstance(exc, cls):
                reason = str(exc)
                if isinstance(exc, ConstructionFailure) and exc.stats:
                    reason += " " + json.dumps(exc.stats)
                return _fail(code, kind, reason)
        raise
    except ValueError as exc:
        return _fail(EXIT_INVALID, "invalid-argument", str(exc))
    return EXIT_OK if code is None else code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
