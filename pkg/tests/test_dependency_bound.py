import itertools
import math

import numpy as np
import pytest

from mintermbs.dependency_bound import (
    JansonStats,
    TranslateFamily,
    balanced_pair_colorings,
    janson_stats,
    monte_carlo_zero_probability,
    pairwise_joint_expectation,
)
from mintermbs.errors import InvalidArgumentError
from mintermbs.upper_bound import per_value_probability


def colorings_oracle(a, i, j):
    ti, tj = {x + i for x in a}, {x + j for x in a}
    union = sorted(ti | tj)
    m = 0
    for values in itertools.product((0, 1), repeat=len(union)):
        v = dict(zip(union, values))
        if sum(v[t] for t in ti) == 2 and sum(v[t] for t in tj) == 2:
            m += 1
    return m, len(union)


def random_four_set(rng, k):
    return tuple(sorted(int(v) for v in rng.choice(k, size=4, replace=False)))


@pytest.mark.parametrize("k", [68, 100, 128, 256, 1000])
def test_mu_is_6_ln_k(k):
    st = janson_stats(k, (0, 1, 2, 3))
    assert abs(st.mu - 6 * math.log(k)) <= 1e-9 * 6 * math.log(k)
    assert st.q == pytest.approx(6 * per_value_probability(k) ** 4, rel=1e-12)


def test_delta_consecutive_block():
    k = 128
    st = janson_stats(k, (0, 1, 2, 3))
    assert st.delta_max == pytest.approx(36 * math.log(k) / k, rel=1e-12)
    fam = TranslateFamily.for_k(k, (0, 1, 2, 3))
    assert fam.neighbors(50) == [47, 48, 49, 51, 52, 53]
    assert fam.neighbors(0) == [1, 2, 3]


@pytest.mark.parametrize("seed", range(4))
def test_big_delta_against_enumerated_pairs(seed):
    rng = np.random.default_rng(seed)
    k = 68 + 10 * seed
    a = random_four_set(rng, k)
    rho = per_value_probability(k)
    total = 0.0
    for i in range(k):
        ti = {x + i for x in a}
        for j in range(i + 1, k):
            if ti & {x + j for x in a}:
                total += pairwise_joint_expectation(a, i, j, rho)
    st = janson_stats(k, a)
    assert st.big_delta == pytest.approx(total, rel=1e-12)
    assert st.log_bound == pytest.approx(-st.mu + st.big_delta * math.exp(2 * st.delta_max))
    # delta is the max over i of the summed neighbour expectations
    fam = TranslateFamily.for_k(k, a)
    assert st.delta_max == pytest.approx(max(len(fam.neighbors(i)) for i in range(k)) * st.q)


def test_pairwise_consecutive_offset_three():
    a = (0, 1, 2, 3)
    m, size = balanced_pair_colorings(a, 10, 13)
    assert (m, size) == colorings_oracle(a, 10, 13)
    assert size == 7
    rho = 0.3
    assert pairwise_joint_expectation(a, 10, 13, rho) == pytest.approx(m * rho ** 7)


def test_pairwise_bound_18_rho5():
    rng = np.random.default_rng(9)
    rho = per_value_probability(128)
    for _ in range(200):
        a = random_four_set(rng, 20)
        d = int(rng.choice([x - y for x in a for y in a if x > y]))
        m, size = balanced_pair_colorings(a, 0, d)
        assert (m, size) == colorings_oracle(a, 0, d)
        assert m <= 18 and size >= 5
        assert pairwise_joint_expectation(a, 0, d, rho) <= 18 * rho ** 5


def test_pairwise_errors():
    with pytest.raises(InvalidArgumentError):
        pairwise_joint_expectation((0, 1, 2, 3), 4, 4, 0.3)
    with pytest.raises(InvalidArgumentError):
        pairwise_joint_expectation((0, 1, 2, 3), 0, 4, 0.3)


def test_edgeless_limit():
    st = JansonStats(128, (0, 1, 2, 3), 0.1, 12.8, 0.0, 0.0, -12.8)
    assert st.bound == pytest.approx(math.exp(-12.8))


def test_bound_overflow_is_inf():
    st = janson_stats(68, (0, 1, 2, 3))
    assert st.log_bound > 700 and st.bound == math.inf


def test_family_rejects_small_k():
    with pytest.raises(InvalidArgumentError):
        janson_stats(40, (0, 1, 2, 3))


def test_monte_carlo_errors():
    with pytest.raises(InvalidArgumentError):
        monte_carlo_zero_probability(128, (0, 1, 2, 3), trials=0, seed=1)
    with pytest.raises(InvalidArgumentError):
        monte_carlo_zero_probability(128, (0, 1, 2, 3), trials=10, seed=1, workers=0)


def test_monte_carlo_deterministic():
    a = monte_carlo_zero_probability(128, (0, 1, 2, 3), trials=5000, seed=4)
    b = monte_carlo_zero_probability(128, (0, 1, 2, 3), trials=5000, seed=4)
    assert a.to_record() == b.to_record()


def test_monte_carlo_parallel_matches_serial():
    serial = monte_carlo_zero_probability(128, (0, 5, 9, 40), 3000, seed=2, workers=3)
    parallel = monte_carlo_zero_probability(128, (0, 5, 9, 40), 3000, seed=2, workers=3,
                                            parallel=True)
    assert serial.zero_count == parallel.zero_count


def test_monte_carlo_record_and_verdict():
    res = monte_carlo_zero_probability(128, (0, 1, 2, 3), trials=10_000, seed=1)
    rec = res.to_record()
    for key in ("k", "a", "mu", "delta", "big_delta", "bound", "estimate", "stderr", "trials",
                "seed", "verdict"):
        assert key in rec
    assert res.verdict
    assert res.estimate == 0.0


def test_monte_carlo_standard_error():
    res = monte_carlo_zero_probability(68, (0, 1, 2, 67), trials=20_000, seed=3)
    assert 0.0 <= res.estimate <= 1.0
    assert res.standard_error == pytest.approx(
        math.sqrt(res.estimate * (1 - res.estimate) / res.trials))
