"""Low block-sensitivity minterm-cyclic functions.

A random pattern on the window {0, ..., 2K-2} (each entry 0 or 1 with
probability rho = (ln K / K)^{1/4} apiece, star otherwise) is accepted once
its domain is small and every 4-set inside {0, ..., K-1} has a balanced
translate (two 0s, two 1s) inside the pattern's domain.  Embedded in Z_N with
K = ceil(N^{4/7} / ln^{1/7} N) this gives f with bs_1 <= |dom p| and
bs_0 < 4 N^{3/7} ln^{1/7} N.

Coverage only depends on the difference triple of a 4-set: A and A - min(A)
have the same translates inside the window.  Both checkers therefore test
the normalized sets {0, d2, d3, d4}, which also makes the lexicographically
least uncovered 4-set a normalized one.  Translates never wrap around mod N.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .core import STAR, BitString, CyclicGroup, Pattern, flip
from .errors import ConstructionFailure, InvalidArgumentError, LogicError, ResourceLimitError
from .functions import MintermFunction

DEFAULT_DOMAIN_CONSTANT = 4.5
DEFAULT_MAX_ATTEMPTS = 200
INDEXED_WORK_CAP = 10**11
SHIFT_SET_CHECK_CAP = 40


def per_value_probability(k: int) -> float:
    return (math.log(k) / k) ** 0.25


def _min_k() -> int:
    k = 3
    while 2 * per_value_probability(k) > 1:
        k += 1
    return k


MIN_K = _min_k()


@dataclass(frozen=True)
class CoveringPatternSpec:
    k: int
    domain_constant: float = DEFAULT_DOMAIN_CONSTANT

    def __post_init__(self):
        if self.k < MIN_K or 2 * self.rho > 1:
            raise InvalidArgumentError(f"k below minimum {MIN_K}")

    @property
    def rho(self) -> float:
        return per_value_probability(self.k)

    @property
    def window(self) -> int:
        return 2 * self.k - 1

    @property
    def domain_bound(self) -> float:
        k = self.k
        return self.domain_constant * k ** 0.75 * math.log(k) ** 0.25

    @property
    def expected_dom_size(self) -> float:
        return self.window * 2 * self.rho


def make_four_set(elements, k: int | None = None) -> tuple:
    a = tuple(sorted({int(e) for e in elements}))
    if len(a) != 4:
        raise InvalidArgumentError(f"a 4-set needs 4 distinct elements, got {elements!r}")
    if a[0] < 0 or (k is not None and a[-1] > k - 1):
        raise InvalidArgumentError(f"4-set {a} not inside [0, {k})")
    return a


def sample_pattern(spec: CoveringPatternSpec, seed, n: int | None = None) -> Pattern:
    """Random window pattern embedded at offset 0 of a length-n string (default 2K-1).

    ``seed`` is anything ``numpy.random.default_rng`` accepts.
    """
    w = spec.window
    n = w if n is None else n
    if n < w:
        raise InvalidArgumentError(f"n = {n} shorter than the window 2K-1 = {w}")
    rho = spec.rho
    u = np.random.default_rng(seed).random(w)
    syms = np.full(n, STAR, dtype=np.uint8)
    syms[:w] = np.where(u < rho, 0, np.where(u < 2 * rho, 1, STAR))
    return Pattern(syms.tobytes())


def has_balanced_copy(p: Pattern, a) -> int | None:
    """Smallest offset u with a + u inside dom(p) holding exactly two 0s, else None."""
    a = make_four_set(a)
    sym = p.symbols
    a1, a2, a3, a4 = a
    for u in range(-a1, len(sym) - a4):
        v1 = sym[a1 + u]
        if v1 == STAR:
            continue
        v2, v3, v4 = sym[a2 + u], sym[a3 + u], sym[a4 + u]
        if STAR in (v2, v3, v4):
            continue
        if v1 + v2 + v3 + v4 == 2:
            return u
    return None


def _trimmed(p: Pattern) -> bytes:
    if not p.domain:
        return b""
    return p.symbols[: p.domain[-1] + 1]


def _naive_check(p: Pattern, k: int):
    sym = _trimmed(p)
    dom = [i for i, s in enumerate(sym) if s != STAR]
    length = len(sym)
    for d2 in range(1, k - 2):
        for d3 in range(d2 + 1, k - 1):
            for d4 in range(d3 + 1, k):
                found = False
                for u in dom:
                    if u + d4 >= length:
                        break
                    v2, v3, v4 = sym[u + d2], sym[u + d3], sym[u + d4]
                    if v2 != STAR and v3 != STAR and v4 != STAR and sym[u] + v2 + v3 + v4 == 2:
                        found = True
                        break
                if not found:
                    return (0, d2, d3, d4)
    return None


def _indexed_check(p: Pattern, k: int, cap: int):
    """Count balanced 4-subsets of dom(p) per normalized difference triple.

    For a fixed second difference d2, the first three points (u, u+d2, u+d3)
    leave the fourth needing a 0 (one zero so far) or a 1 (two zeros so far);
    summing over anchors u is a product with the Hankel matrices of the 0- and
    1-indicators, giving every (d3, d4) count for that d2 at once.
    """
    sym = np.frombuffer(_trimmed(p), dtype=np.uint8)
    length = sym.size
    if k < 4:
        raise InvalidArgumentError("k must be at least 4")
    if k ** 3 * max(length, 1) > cap:
        raise ResourceLimitError(f"indexed coverage check exceeds work cap {cap}")
    if length == 0:
        return (0, 1, 2, 3)
    pad = np.full(length + 2 * k, STAR, dtype=np.uint8)
    pad[:length] = sym
    zero = (pad == 0).astype(np.float32)
    one = (pad == 1).astype(np.float32)
    defined = pad != STAR
    anchors = np.arange(length)
    # hankel[u, d] = indicator[u + d]
    idx = anchors[:, None] + np.arange(k)[None, :]
    zero_h, one_h = zero[idx], one[idx]
    d3s = np.arange(k)
    upper = np.triu(np.ones((k, k), dtype=bool), 1)
    for d2 in range(1, k - 2):
        first_def = defined[anchors] & defined[anchors + d2]
        first_zeros = zero[anchors] + zero[anchors + d2]
        third = anchors[None, :] + d3s[:, None]
        ok = first_def[None, :] & defined[third]
        zeros3 = first_zeros[None, :] + zero[third]
        need_zero = (ok & (zeros3 == 1)).astype(np.float32)
        need_one = (ok & (zeros3 == 2)).astype(np.float32)
        counts = need_zero @ zero_h + need_one @ one_h
        missing = (counts == 0) & upper
        missing[: d2 + 1, :] = False
        hits = np.argwhere(missing)
        if hits.size:
            d3, d4 = hits[0]
            return (0, d2, int(d3), int(d4))
    return None


def full_coverage_check(p: Pattern, k: int, algorithm: str = "indexed",
                        cap: int = INDEXED_WORK_CAP):
    """None if every 4-set of {0, ..., k-1} has a balanced translate in p, else the least uncovered one."""
    if k < 4:
        raise InvalidArgumentError("k must be at least 4")
    if algorithm == "naive":
        return _naive_check(p, k)
    if algorithm == "indexed":
        return _indexed_check(p, k, cap)
    raise InvalidArgumentError(f"unknown algorithm {algorithm!r}")


@dataclass
class PatternConstructionReport:
    pattern: Pattern
    attempts: int
    dom_size: int
    coverage_verified: bool
    k: int
    rho: float
    bound: float
    seed: int
    failing_4set: tuple | None = None
    failures: dict | None = None

    def to_record(self) -> dict:
        return {
            "k": self.k,
            "rho": self.rho,
            "attempts": self.attempts,
            "dom_size": self.dom_size,
            "bound": self.bound,
            "coverage_verified": self.coverage_verified,
            "seed": self.seed,
            "pattern": str(self.pattern),
        }


def construct_covering_pattern(spec: CoveringPatternSpec, seed: int,
                               max_attempts: int = DEFAULT_MAX_ATTEMPTS, n: int | None = None,
                               algorithm: str = "indexed") -> PatternConstructionReport:
    """Rejection sampling; attempt a draws from ``default_rng([seed, a])``."""
    failures = Counter()
    last_uncovered = None
    for attempt in range(max_attempts):
        p = sample_pattern(spec, [seed, attempt], n)
        if p.dom_size > spec.domain_bound:
            failures["domain"] += 1
            continue
        uncovered = full_coverage_check(p, spec.k, algorithm)
        if uncovered is not None:
            failures["coverage"] += 1
            last_uncovered = uncovered
            continue
        return PatternConstructionReport(p, attempt + 1, p.dom_size, True, spec.k, spec.rho,
                                         spec.domain_bound, seed, None, dict(failures))
    stats = {"attempts": max_attempts, "domain": failures["domain"],
             "coverage": failures["coverage"]}
    if last_uncovered is not None:
        stats["failing_4set"] = list(last_uncovered)
    raise ConstructionFailure(f"no covering pattern for k={spec.k} in {max_attempts} attempts",
                              stats)


def low_bs_k(n: int) -> int:
    return math.ceil(n ** (4 / 7) / math.log(n) ** (1 / 7))


@lru_cache(maxsize=1)
def min_low_bs_n() -> int:
    n = 3
    while low_bs_k(n) < MIN_K or n < 2 * low_bs_k(n) - 1:
        n += 1
    return n


def construct_low_bs(n: int, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                     clamp_k: bool = False, domain_constant: float = DEFAULT_DOMAIN_CONSTANT):
    """(f, report) for the low-bs family at length n.

    ``clamp_k`` raises K to the minimum instead of rejecting small n; the
    result is still a valid f^{T,p} but outside the family's parameter law.
    """
    if n < 3:
        raise InvalidArgumentError("n must be at least 3")
    k = low_bs_k(n)
    if clamp_k:
        k = max(k, MIN_K)
    if k < MIN_K or n < 2 * k - 1:
        raise InvalidArgumentError(
            f"n = {n} gives k = {k} below minimum {MIN_K}; need n >= {min_low_bs_n()}")
    spec = CoveringPatternSpec(k, domain_constant)
    report = construct_covering_pattern(spec, seed, max_attempts, n)
    return MintermFunction(CyclicGroup(n), report.pattern), report


def build_low_bs_function(n: int, seed: int, max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                          clamp_k: bool = False) -> MintermFunction:
    return construct_low_bs(n, seed, max_attempts, clamp_k)[0]


def bs0_upper_bound(n: int) -> float:
    """4 N^{3/7} ln^{1/7} N: no 0-input of the family has that many disjoint sensitive blocks."""
    return 4 * n ** (3 / 7) * math.log(n) ** (1 / 7)


@dataclass(frozen=True)
class DenseWindow:
    offset: int
    four_set: tuple
    elements: tuple


def dense_interval_4set(s, k: int, n: int) -> DenseWindow:
    """Smallest a such that [a, a+k-1] (mod n) holds >= 4 points of s; first 4 of them, normalized."""
    pts = sorted({int(v) % n for v in s})
    if not 4 <= k <= n:
        raise InvalidArgumentError("need 4 <= k <= n")
    if len(pts) < 4 * n / k:
        raise InvalidArgumentError(f"|S| = {len(pts)} < 4N/K = {4 * n / k:.3f}")
    ind = np.zeros(2 * n, dtype=np.int64)
    ind[pts] = 1
    ind[[p + n for p in pts]] = 1
    csum = np.concatenate(([0], np.cumsum(ind)))
    counts = csum[np.arange(n) + k] - csum[np.arange(n)]
    hits = np.flatnonzero(counts >= 4)
    if hits.size == 0:
        raise LogicError("averaging argument failed: no window with 4 points")
    a = int(hits[0])
    inside = sorted((p for p in pts if (p - a) % n < k), key=lambda p: (p - a) % n)[:4]
    return DenseWindow(a, tuple((p - a) % n for p in inside), tuple(inside))


def cyclic_balanced_shift(p: Pattern, a) -> int | None:
    """Smallest j in Z_N with t_j(p) defined on a and balanced there (wraparound allowed)."""
    n = p.n
    sym = np.frombuffer(p.symbols, dtype=np.uint8)
    a = np.asarray(sorted(a), dtype=np.int64)
    j = np.arange(n, dtype=np.int64)
    vals = sym[(a[None, :] - j[:, None]) % n]
    ok = np.all(vals != STAR, axis=1) & (vals.sum(axis=1) == 2)
    hits = np.flatnonzero(ok)
    return int(hits[0]) if hits.size else None


def witness_to_shift_set(f: MintermFunction, x: BitString, blocks,
                         check_cap: int = SHIFT_SET_CHECK_CAP) -> frozenset:
    """Map disjoint sensitive blocks at a 0-input to S = {-j(k)}, j(k) the shift each flip matches.

    Checks the two consequences that must hold for minterm-cyclic f: the
    shifts are distinct, and (when |S| <= check_cap) no 4-subset of S has a
    balanced cyclic copy in p.  Either failing raises LogicError.
    """
    if not f.is_cyclic:
        raise InvalidArgumentError("shift-set mapping needs a cyclic group")
    if f.eval(x) != 0:
        raise InvalidArgumentError("x must be a 0-input")
    n = f.n
    used = set()
    union = set()
    for b in blocks:
        b = frozenset(b)
        if union & b:
            raise InvalidArgumentError("blocks are not pairwise disjoint")
        union |= b
        shifts = f.matching_shifts(flip(x, b))
        if not shifts:
            raise InvalidArgumentError(f"block {sorted(b)} is not sensitive")
        j = shifts[0].offset
        if j in used:
            raise LogicError(f"two disjoint blocks match the same shift t_{j}")
        used.add(j)
    s = frozenset((-j) % n for j in used)
    if len(s) != len(used):
        raise LogicError("shift set lost elements")
    if len(s) <= check_cap:
        table = _balanced_cyclic_4sets(f.pattern)
        for a in combinations(sorted(s), 4):
            hit = a in table if table is not None else cyclic_balanced_shift(f.pattern, a) is not None
            if hit:
                raise LogicError(f"4-subset {a} of S has a balanced copy in p")
    return s


@lru_cache(maxsize=256)
def _balanced_cyclic_4sets(p: Pattern, limit: int = 200_000):
    """All 4-sets of Z_N with a balanced cyclic copy in p, or None when that set is too large."""
    n, dom = p.n, p.domain
    if n * math.comb(len(dom), 4) > limit:
        return None
    found = set()
    for quad in combinations(dom, 4):
        if sum(p[i] for i in quad) != 2:
            continue
        for j in range(n):
            found.add(tuple(sorted((i + j) % n for i in quad)))
    return frozenset(found)
