"""Witness extraction for the Omega(N^{3/7}) lower bound on bs of minterm-transitive functions.

Pipeline: sample T_0 = ceil(N^{3/7}) group elements, delete every element whose
shifted domain covers an over-covered ("bad") index, fix a majority value on
doubly covered indices, walk greedily towards those values while f stays 0,
then read off either the stuck ("stubborn") indices or the disagreement sets
of the untouched shifted domains as disjoint sensitive blocks.

Randomness: attempt ``a`` of a run with seed ``s`` draws from
``numpy.random.default_rng([s, a])``, so (seed, attempt) fixes the samples.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import BitString, CyclicGroup, Pattern, Permutation, enumerate_group, flip, is_transitive
from .errors import ConstructionFailure, InvalidArgumentError, LogicError
from .functions import MintermFunction
from .sensitivity import BlockSensitivityWitness

BAD_COVERAGE = 4
TERRIBLE_COVERAGE = 7
DEFAULT_MAX_RETRIES = 50


def exponent_scale(n: int) -> float:
    return n ** (3 / 7)


@dataclass
class ShiftSelection:
    elements: list
    base_block: frozenset
    coverage: dict
    attempts_used: int
    t0_sampled: int
    bad_count: int = 0
    terrible_count: int = 0
    degraded: bool = False

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def max_coverage(self) -> int:
        return max(self.coverage.values(), default=0)


@dataclass
class ConsensusAssignment:
    assigned: dict
    multi_covered: frozenset


def _sample_elements(g, n: int, count: int, rng: np.random.Generator) -> list:
    if isinstance(g, CyclicGroup):
        return [Permutation.shift(n, int(j)) for j in rng.integers(0, n, size=count)]
    elems = enumerate_group(g)
    return [elems[int(k)] for k in rng.integers(0, len(elems), size=count)]


def _image(sigma: Permutation, block) -> list:
    return [sigma(b) for b in block]


def coverage_counts(elements, block) -> Counter:
    """Multiplicity of each index across the shifted blocks sigma(B)."""
    cov = Counter()
    for sigma in elements:
        cov.update(_image(sigma, block))
    return cov


def select_low_overlap_shifts(g, block, seed: int, max_retries: int = DEFAULT_MAX_RETRIES,
                              slack: float = 1.0, strict: bool = True) -> ShiftSelection:
    """Group elements whose images of ``block`` cover every index at most 3 times.

    An attempt is accepted when no index is covered >= 7 times and fewer than
    slack * N^{3/7} / 12 indices are covered >= 4 times, and the selection left
    after deleting every element touching such an index has at least
    ceil(N^{3/7} / (2 * slack)) members.  With ``strict=False`` an exhausted
    retry budget returns the largest repaired selection seen, flagged
    ``degraded``; the coverage guarantee holds regardless.
    """
    n = g.n
    block = frozenset(block)
    scale = exponent_scale(n)
    if not block:
        raise InvalidArgumentError("base block must be nonempty")
    if len(block) > scale:
        raise InvalidArgumentError(
            f"|B| = {len(block)} exceeds N^(3/7) = {scale:.3f}; use heavy_pattern_witness")
    if not is_transitive(g):
        raise InvalidArgumentError("group is not transitive")
    if any(not 0 <= b < n for b in block):
        raise InvalidArgumentError("base block not inside Z_N")

    t0 = math.ceil(scale)
    bad_limit = slack * scale / 12
    t_required = math.ceil(scale / (2 * slack))
    stats = Counter()
    best = None
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        sampled = _sample_elements(g, n, t0, rng)
        cov = coverage_counts(sampled, block)
        bad = {i for i, c in cov.items() if c >= BAD_COVERAGE}
        terrible = sum(1 for c in cov.values() if c >= TERRIBLE_COVERAGE)
        kept = [s for s in sampled if bad.isdisjoint(_image(s, block))]
        sel = ShiftSelection(kept, block, dict(coverage_counts(kept, block)), attempt + 1, t0,
                             len(bad), terrible)
        if terrible:
            stats["terrible"] += 1
        elif len(bad) >= bad_limit:
            stats["too_many_bad"] += 1
        elif len(kept) < t_required:
            stats["too_few_kept"] += 1
        else:
            return sel
        if best is None or sel.size > best.size:
            best = sel
    if strict or best is None:
        raise ConstructionFailure(
            f"no acceptable shift selection in {max_retries} attempts",
            {"attempts": max_retries, "t0": t0, "t_required": t_required, **stats})
    best.attempts_used = max_retries
    best.degraded = True
    return best


def consensus_values(sel: ShiftSelection, p: Pattern) -> ConsensusAssignment:
    """Majority value (ties -> 0) of the shifted patterns at every index covered >= 2 times."""
    multi = frozenset(i for i, c in sel.coverage.items() if c >= 2)
    votes = {i: [0, 0] for i in multi}
    dom = p.domain
    for sigma in sel.elements:
        for k in dom:
            i = sigma(k)
            if i in votes:
                votes[i][p[k]] += 1
    assigned = {i: int(v[1] > v[0]) for i, v in votes.items()}
    return ConsensusAssignment(assigned, multi)


def _flip_keeps_zero(f: MintermFunction, x: bytearray, arr: np.ndarray, i: int) -> bool:
    # f(x) = 0 holds throughout, so only shifts whose domain contains i can match x^i
    x[i] ^= 1
    try:
        for sigma in f.covering_elements(i):
            pos = f.shifted_positions(sigma)
            if np.array_equal(arr[pos], f._vals):
                return False
        return True
    finally:
        x[i] ^= 1


def greedy_flip_witness(f: MintermFunction, sel: ShiftSelection, cons: ConsensusAssignment,
                        x0: BitString) -> BlockSensitivityWitness:
    """Walk from x0 towards the consensus values and extract disjoint sensitive blocks.

    Each step flips the smallest i in U with x_i != v_i whose flip keeps f at 0.
    When no such i remains, the stuck indices are sensitive singletons, and the
    disagreement sets of shifted domains avoiding every stuck index are pairwise
    disjoint; the larger family is returned after verification through ``f.eval``.
    """
    if f.eval(x0) != 0:
        raise InvalidArgumentError("greedy walk needs a 0-input start")
    x = bytearray(x0.bits)
    arr = np.frombuffer(x, dtype=np.uint8)
    targets = sorted(cons.multi_covered)
    while True:
        for i in targets:
            if x[i] != cons.assigned[i] and _flip_keeps_zero(f, x, arr, i):
                x[i] ^= 1
                break
        else:
            break
    final = BitString(bytes(x))
    stubborn = [i for i in targets if x[i] != cons.assigned[i]]
    singles = [frozenset((i,)) for i in stubborn]

    stuck = set(stubborn)
    free_sets = []
    for sigma in dict.fromkeys(sel.elements):
        domain = set(f.shifted_positions(sigma).tolist())
        if domain & stuck:
            continue
        free_sets.append(f.disagreement_set(final, sigma))
    union = set()
    for d in free_sets:
        if not d or union & d:
            raise LogicError("stubborn-free disagreement sets overlap or are empty")
        union |= d

    blocks = singles if len(singles) > len(free_sets) else free_sets
    return BlockSensitivityWitness.build(f, final, blocks)


def heavy_pattern_witness(f: MintermFunction) -> BlockSensitivityWitness:
    """Singleton witness of size >= ceil(|dom p| / 2) from the majority value b of p.

    x agrees with p and is 1 - b off the domain; x has exactly as many b's as p,
    so flipping any b-position of p leaves too few b's for any shift of p to match.
    """
    p = f.pattern
    ones, zeros = p.count(1), p.count(0)
    b = 1 if ones >= zeros else 0
    x = BitString(bytes(s if s != 2 else 1 - b for s in p.symbols))
    blocks = [frozenset((i,)) for i in p.domain if p[i] == b]
    return BlockSensitivityWitness.build(f, x, blocks)


@dataclass
class LowerBoundReport:
    n: int
    dom_size: int
    branch: str
    witness: BlockSensitivityWitness
    thresholds: dict
    seed: int
    t0: int = 0
    t_final: int = 0
    retries: int = 0
    degraded: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def witness_count(self) -> int:
        return self.witness.count

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "dom_size": self.dom_size,
            "branch": self.branch,
            "t0": self.t0,
            "t_final": self.t_final,
            "witness_count": self.witness_count,
            "thresholds": dict(self.thresholds),
            "seed": self.seed,
            "retries": self.retries,
            "degraded": self.degraded,
        }


def lower_bound_thresholds(n: int, dom_size: int) -> dict:
    scale = exponent_scale(n)
    return {
        "half_domain": math.ceil(dom_size / 2),
        "stubborn": math.ceil(scale / 12),
        "stubborn_free": math.ceil(scale / 4),
    }


def lower_bound_pipeline(f: MintermFunction, seed: int, max_retries: int = DEFAULT_MAX_RETRIES,
                         slack: float = 1.0) -> LowerBoundReport:
    n, p = f.n, f.pattern
    thresholds = lower_bound_thresholds(n, p.dom_size)
    if p.dom_size > exponent_scale(n):
        return LowerBoundReport(n, p.dom_size, "heavy", heavy_pattern_witness(f), thresholds, seed)
    sel = select_low_overlap_shifts(f.group, p.domain, seed, max_retries, slack, strict=False)
    cons = consensus_values(sel, p)
    x0 = BitString.zeros(n) if p.count(1) else BitString.ones(n)
    w = greedy_flip_witness(f, sel, cons, x0)
    return LowerBoundReport(n, p.dom_size, "nicepack", w, thresholds, seed,
                            t0=sel.t0_sampled, t_final=sel.size, retries=sel.attempts_used,
                            degraded=sel.degraded)
