"""Randomized property checks for the allocation-vector math.

Shared by the unit tests and the acceptance run.  Each check draws its own
seeded stream of vector pairs (length 1..8, entries 0..20) and returns the
number of pairs examined; a violated property raises AssertionError.
"""

from __future__ import annotations

import random

from fairtt.errors import AllZero
from fairtt.fairness import MMOrder, delta_e_cw, delta_e_lex, delta_e_ps, jain_index, mm_compare

import oracle

PAIRS = 10_000
DELTA = 1e-3


def _vec(rng: random.Random, n: int) -> list[int]:
    return [rng.randint(0, 20) for _ in range(n)]


def _pairs(seed: int, count: int = PAIRS):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, 8)
        x = _vec(rng, n)
        if rng.random() < 0.3:  # one-entry edits, so Equal and near ties show up
            y = list(x)
            y[rng.randrange(n)] = rng.randint(0, 20)
        else:
            y = _vec(rng, n)
        yield rng, x, y


def _strictly_worse(rng, x, y):
    """Return (better, worse) if the pair is ordered, else None."""
    order = mm_compare(x, y)
    if order is MMOrder.BETTER:
        return x, y
    if order is MMOrder.WORSE:
        return y, x
    return None


def check_permutation_invariance(seed: int = 1, count: int = PAIRS) -> int:
    for rng, x, y in _pairs(seed, count):
        px, py = rng.sample(x, len(x)), rng.sample(y, len(y))
        assert mm_compare(x, y) is mm_compare(px, py)
        if any(x):
            assert jain_index(px) == jain_index(x) or abs(jain_index(px) - jain_index(x)) < 1e-12
        pair = _strictly_worse(rng, x, y)
        if pair:
            a, b = pair
            pa, pb = rng.sample(a, len(a)), rng.sample(b, len(b))
            assert delta_e_lex(a, b) == delta_e_lex(pa, pb)
            assert delta_e_cw(a, b, DELTA) == delta_e_cw(pa, pb, DELTA)
            assert delta_e_ps(a, b, DELTA) == delta_e_ps(pa, pb, DELTA)
    return count


def check_antisymmetry(seed: int = 2, count: int = PAIRS) -> int:
    for _, x, y in _pairs(seed, count):
        assert mm_compare(y, x) is mm_compare(x, y).flipped()
        assert (mm_compare(x, y) is MMOrder.EQUAL) == (sorted(x) == sorted(y))
    return count


def check_pareto_consistency(seed: int = 3, count: int = PAIRS) -> int:
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, 8)
        x = sorted((rng.randint(0, 19) for _ in range(n)), reverse=True)
        y = [v + rng.randint(0, 1) for v in x]
        k = rng.randrange(n)
        y[k] = max(y[k], x[k] + 1)
        # y >= x componentwise after descending sort, one strict
        ys = sorted(y, reverse=True)
        assert all(b >= a for a, b in zip(x, ys)) and ys != x
        assert mm_compare(rng.sample(x, n), rng.sample(y, n)) is MMOrder.BETTER
    return count


def check_strict_positivity(seed: int = 4, count: int = PAIRS) -> int:
    for rng, x, y in _pairs(seed, count):
        pair = _strictly_worse(rng, x, y)
        if pair:
            a, b = pair
            assert delta_e_cw(a, b, DELTA) > 0
            assert delta_e_ps(a, b, DELTA) > 0
    return count


def check_lex_range(seed: int = 5, count: int = PAIRS) -> int:
    for rng, x, y in _pairs(seed, count):
        pair = _strictly_worse(rng, x, y)
        if pair:
            a, b = pair
            n = len(a)
            v = delta_e_lex(a, b)
            assert any(abs(v - k / n) < 1e-12 for k in range(1, n + 1)), (a, b, v)
    return count


def check_jain_range_and_scale(seed: int = 6, count: int = PAIRS) -> int:
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, 8)
        v = [rng.randint(0, 20) for _ in range(n)]
        c = rng.choice([0.5, 2, 3, 7.25, 1e3, rng.uniform(0.01, 100)])
        if not any(v):
            try:
                jain_index(v)
            except AllZero:
                continue
            raise AssertionError("AllZero expected")
        j = jain_index(v)
        assert 1 / n - 1e-12 <= j <= 1 + 1e-12
        assert abs(jain_index([c * e for e in v]) - j) < 1e-12
        assert abs(j - float(oracle.jain_fraction(v))) < 1e-12
    return count


def check_brute_agreement(seed: int = 7, count: int = PAIRS) -> int:
    for rng, x, y in _pairs(seed, count):
        pair = _strictly_worse(rng, x, y)
        if pair:
            a, b = pair
            assert abs(delta_e_lex(a, b) - oracle.brute_delta_lex(a, b)) < 1e-12
            assert abs(delta_e_cw(a, b, DELTA) - oracle.brute_delta_cw(a, b, DELTA)) <= 1e-9 * max(1, delta_e_cw(a, b, DELTA))
            assert abs(delta_e_ps(a, b, DELTA) - oracle.brute_delta_ps(a, b, DELTA)) <= 1e-9 * max(1, delta_e_ps(a, b, DELTA))
    return count


ALL_CHECKS = {
    "permutation invariance": check_permutation_invariance,
    "antisymmetry": check_antisymmetry,
    "Pareto consistency": check_pareto_consistency,
    "cw/ps strict positivity": check_strict_positivity,
    "lex range": check_lex_range,
    "Jain range and scale invariance": check_jain_range_and_scale,
    "brute-force agreement": check_brute_agreement,
}
