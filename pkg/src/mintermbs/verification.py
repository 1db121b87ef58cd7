"""Self-checks run by ``mintermbs verify``: oracle equivalences and lemma sweeps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import STAR, BitString, Pattern
from .dependency_bound import janson_stats
from .errors import LogicError
from .functions import MintermFunction
from .sensitivity import bs_at, global_measures
from .upper_bound import (
    CoveringPatternSpec,
    construct_covering_pattern,
    full_coverage_check,
    witness_to_shift_set,
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def all_patterns(n: int):
    """Every pattern of length n over {0,1,*} with nonempty domain."""
    for syms in itertools.product((0, 1, STAR), repeat=n):
        if any(s != STAR for s in syms):
            yield Pattern(bytes(syms))


def exhaustive_bs_sweep(n: int) -> dict:
    """Compare structured vs brute-force bs on every 0-input, and bs_1 <= |dom p| on every 1-input."""
    mismatches, lemma_violations, zero_inputs, one_inputs = 0, 0, 0, 0
    for p in all_patterns(n):
        f = MintermFunction.cyclic(p)
        table = f.truth_table
        for code in range(1 << n):
            x = BitString.from_code(code, n)
            brute = bs_at(f, x, "bruteforce").count
            if table[code]:
                one_inputs += 1
                lemma_violations += brute > p.dom_size
            else:
                zero_inputs += 1
                mismatches += bs_at(f, x, "structured_zero").count != brute
    return {"patterns": 3 ** n - 1, "zero_inputs": zero_inputs, "one_inputs": one_inputs,
            "mismatches": mismatches, "lemma_violations": lemma_violations}


def or_sanity(n: int) -> tuple:
    rep = global_measures(MintermFunction.cyclic("1" + "*" * (n - 1)))
    return rep.s, rep.bs


def random_small_pattern(n: int, rng: np.random.Generator) -> Pattern:
    while True:
        syms = rng.integers(0, 3, size=n).astype(np.uint8)
        if (syms != STAR).any():
            return Pattern(syms.tobytes())


def shift_set_sweep(n: int, count: int, seed: int) -> dict:
    """Map every brute-force 0-input witness to its shift set; count lemma failures."""
    rng = np.random.default_rng([seed, n])
    checked, failures = 0, 0
    for _ in range(count):
        f = MintermFunction.cyclic(random_small_pattern(n, rng))
        table = f.truth_table
        for code in np.flatnonzero(~table):
            x = BitString.from_code(int(code), n)
            w = bs_at(f, x, "bruteforce")
            try:
                witness_to_shift_set(f, x, w.blocks)
            except LogicError:
                failures += 1
            checked += 1
    return {"patterns": count, "witnesses": checked, "logic_errors": failures}


def run_checks(level: str = "quick", seed: int = 0) -> list:
    full = level == "full"
    results = []
    for n in ((4, 5, 6) if full else (4, 5)):
        r = exhaustive_bs_sweep(n)
        results.append(CheckResult(f"bs0-oracle-equivalence N={n}", r["mismatches"] == 0, str(r)))
        results.append(CheckResult(f"bs1-domain-lemma N={n}", r["lemma_violations"] == 0, str(r)))
    for n in range(4, (15 if full else 10)):
        s, bs = or_sanity(n)
        results.append(CheckResult(f"or-sanity N={n}", s == bs == n, f"s={s} bs={bs}"))
    for n in ((10, 12) if full else (8,)):
        r = shift_set_sweep(n, 100 if full else 10, seed)
        results.append(CheckResult(f"shift-set-lemma N={n}", r["logic_errors"] == 0, str(r)))
    k = 128 if full else 68
    rep = construct_covering_pattern(CoveringPatternSpec(k), seed)
    naive = full_coverage_check(rep.pattern, k, "naive")
    indexed = full_coverage_check(rep.pattern, k, "indexed")
    results.append(CheckResult(f"coverage-checkers K={k}", naive is None and indexed is None,
                               f"naive={naive} indexed={indexed} attempts={rep.attempts}"))
    stats = janson_stats(k, (0, 1, 2, 3))
    rel = abs(stats.mu - 6 * math.log(k)) / (6 * math.log(k))
    results.append(CheckResult(f"janson-mu K={k}", rel <= 1e-9, f"mu={stats.mu} rel_err={rel:.2e}"))
    return results
