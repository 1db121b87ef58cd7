"""Janson/Suen bound Pr[sum I_i = 0] <= exp(-mu + Delta * e^{2 delta}) for translate families.

The family: a random window pattern (entries 0 / 1 with probability rho each),
a fixed 4-set A in {0, ..., K-1}, and I_i = [A + i fully defined and balanced]
for 0 <= i <= K-1.  I_i and I_j are adjacent iff the translates overlap.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import STAR
from .errors import InvalidArgumentError
from .upper_bound import MIN_K, make_four_set, per_value_probability

MC_CHUNK = 2048


@dataclass(frozen=True)
class TranslateFamily:
    k: int
    a: tuple
    rho: float

    @classmethod
    def for_k(cls, k: int, a) -> "TranslateFamily":
        if k < MIN_K:
            raise InvalidArgumentError(f"k below minimum {MIN_K}")
        return cls(k, make_four_set(a, k), per_value_probability(k))

    @property
    def differences(self) -> frozenset:
        return frozenset(x - y for x in self.a for y in self.a if x != y)

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and j - i in self.differences

    def neighbors(self, i: int) -> list:
        return sorted(i + d for d in self.differences if 0 <= i + d < self.k)


@dataclass
class JansonStats:
    k: int
    a: tuple
    q: float
    mu: float
    delta_max: float
    big_delta: float
    log_bound: float

    @property
    def bound(self) -> float:
        try:
            return math.exp(self.log_bound)
        except OverflowError:
            return math.inf

    def to_record(self) -> dict:
        return {"k": self.k, "a": ",".join(map(str, self.a)), "mu": self.mu,
                "delta": self.delta_max, "big_delta": self.big_delta, "bound": self.bound}


def balanced_pair_colorings(a, i: int, j: int) -> tuple:
    """(m, |union|): 0/1 assignments of (A+i) | (A+j) balancing both translates, by enumeration."""
    ti = [x + i for x in a]
    tj = [x + j for x in a]
    union = sorted(set(ti) | set(tj))
    where = {pos: k for k, pos in enumerate(union)}
    si = [where[v] for v in ti]
    sj = [where[v] for v in tj]
    m = 0
    for bits in product((0, 1), repeat=len(union)):
        if sum(bits[t] for t in si) == 2 and sum(bits[t] for t in sj) == 2:
            m += 1
    return m, len(union)


def pairwise_joint_expectation(a, i: int, j: int, rho: float) -> float:
    """Exact E[I_i I_j] = m * rho^|union| for overlapping translates."""
    a = make_four_set(a)
    if i == j or not set(x + i for x in a) & set(x + j for x in a):
        raise InvalidArgumentError(f"indices {i} and {j} are not adjacent")
    m, size = balanced_pair_colorings(a, i, j)
    return m * rho ** size


def janson_stats(k: int, a) -> JansonStats:
    fam = TranslateFamily.for_k(k, a)
    rho = fam.rho
    q = 6 * rho ** 4
    mu = k * q
    delta_max = q * max(len(fam.neighbors(i)) for i in range(k))
    # E[I_i I_j] depends only on j - i
    big_delta = 0.0
    for d in sorted(x for x in fam.differences if 0 < x < k):
        big_delta += (k - d) * pairwise_joint_expectation(fam.a, 0, d, rho)
    log_bound = -mu + big_delta * math.exp(2 * delta_max)
    return JansonStats(k, fam.a, q, mu, delta_max, big_delta, log_bound)


@dataclass
class MonteCarloResult:
    stats: JansonStats
    trials: int
    zero_count: int
    seed: int
    workers: int = 1

    @property
    def estimate(self) -> float:
        return self.zero_count / self.trials

    @property
    def standard_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def bound(self) -> float:
        return self.stats.bound

    @property
    def verdict(self) -> bool:
        return self.estimate <= self.bound + 3 * self.standard_error

    def to_record(self) -> dict:
        rec = self.stats.to_record()
        rec.update(estimate=self.estimate, stderr=self.standard_error, trials=self.trials,
                   seed=self.seed, verdict=self.verdict)
        return rec


def _count_zero_trials(k: int, a: tuple, rho: float, trials: int, seed: int, worker: int) -> int:
    rng = np.random.default_rng([seed, worker])
    window = 2 * k - 1
    cols = np.arange(k)[:, None] + np.asarray(a)[None, :]
    zeros = 0
    done = 0
    while done < trials:
        size = min(MC_CHUNK, trials - done)
        u = rng.random((size, window))
        sym = np.where(u < rho, 0, np.where(u < 2 * rho, 1, STAR)).astype(np.uint8)
        vals = sym[:, cols]
        hit = np.all(vals != STAR, axis=2) & (vals.sum(axis=2) == 2)
        zeros += int(np.count_nonzero(~hit.any(axis=1)))
        done += size
    return zeros


def monte_carlo_zero_probability(k: int, a, trials: int, seed: int, workers: int = 1,
                                 parallel: bool = False) -> MonteCarloResult:
    """Estimate Pr[no translate of A is balanced] and compare with the Janson/Suen bound.

    Trials are split evenly across ``workers`` sub-streams ``default_rng([seed, w])``;
    the result depends on (seed, workers) only, not on ``parallel``.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be at least 1")
    if workers < 1:
        raise InvalidArgumentError("workers must be at least 1")
    stats = janson_stats(k, a)
    rho = per_value_probability(k)
    shares = [trials // workers + (w < trials % workers) for w in range(workers)]
    jobs = [(k, stats.a, rho, s, seed, w) for w, s in enumerate(shares) if s]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            counts = list(pool.map(_count_zero_trials, *zip(*jobs)))
    else:
        counts = [_count_zero_trials(*j) for j in jobs]
    return MonteCarloResult(stats, trials, sum(counts), seed, workers)
