"""Max-min comparison, Jain's index and energy differences on penalty vectors.

All vectors hold nonnegative penalties (lower is better).  Sorting is by
value only, so every function here ignores which curriculum got what.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AllZero, LengthMismatch, NotWorse


class MMOrder(enum.Enum):
    BETTER = "better"
    EQUAL = "equal"
    WORSE = "worse"

    def flipped(self) -> "MMOrder":
        return {MMOrder.BETTER: MMOrder.WORSE, MMOrder.WORSE: MMOrder.BETTER}.get(self, self)


ENERGY_KINDS = ("lex", "cw", "ps")


@dataclass(frozen=True)
class EnergyKind:
    kind: str = "cw"
    delta: float = 1e-3

    def __post_init__(self):
        if self.kind not in ENERGY_KINDS:
            raise ValueError(f"energy kind must be one of {ENERGY_KINDS}, got {self.kind!r}")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def _check_lengths(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise LengthMismatch(f"allocation lengths differ: {len(x)} vs {len(y)}")
    if not x:
        raise LengthMismatch("allocations must be nonempty")


def mm_compare(x: Sequence[float], y: Sequence[float]) -> MMOrder:
    """Compare ``x`` against ``y`` in the max-min sense.

    Both vectors are sorted by decreasing penalty and compared
    lexicographically: the smaller worst-case penalty wins, ties are broken
    by the next-worst entry, and so on.
    """
    _check_lengths(x, y)
    xs = sorted(x, reverse=True)
    ys = sorted(y, reverse=True)
    if xs < ys:
        return MMOrder.BETTER
    if xs > ys:
        return MMOrder.WORSE
    return MMOrder.EQUAL


def jain_index(v: Sequence[float]) -> float:
    """Jain's fairness index ``(sum v)^2 / (n * sum v^2)``; raises AllZero on a zero vector."""
    if not v:
        raise ValueError("jain_index of an empty vector")
    sq = math.fsum(x * x for x in v)
    if sq == 0:
        raise AllZero("Jain's index is undefined for the all-zero vector")
    return math.fsum(v) ** 2 / (len(v) * sq)


def _require_worse(x: Sequence[float], y: Sequence[float]) -> None:
    if mm_compare(x, y) is not MMOrder.BETTER:
        raise NotWorse("energy difference needs y strictly worse than x")


def delta_e_lex(x: Sequence[float], y: Sequence[float]) -> float:
    """``1 - (i - 1)/n`` for the first decreasing-order rank ``i`` where y is worse."""
    _require_worse(x, y)
    n = len(x)
    xs = sorted(x, reverse=True)
    ys = sorted(y, reverse=True)
    first = next(i for i in range(n) if ys[i] > xs[i])
    return 1.0 - first / n


def delta_e_cw(x: Sequence[float], y: Sequence[float], delta: float = 1e-3) -> float:
    """Largest component-wise ratio of offset penalties, minus one.

    Entries are offset by ``delta - m`` with ``m`` the smallest penalty of
    either vector, which keeps every denominator at least ``delta``.
    """
    _require_worse(x, y)
    shift = delta - min(min(x), min(y))
    xs = sorted(x)
    ys = sorted(y)
    return max((shift + b) / (shift + a) for a, b in zip(xs, ys)) - 1.0


def delta_e_ps(x: Sequence[float], y: Sequence[float], delta: float = 1e-3) -> float:
    """Largest ratio of offset prefix sums over the decreasing-order vectors, minus one."""
    _require_worse(x, y)
    shift = delta - min(min(x), min(y))
    xs = sorted(x, reverse=True)
    ys = sorted(y, reverse=True)
    best = -math.inf
    sx = sy = 0.0
    for i, (a, b) in enumerate(zip(xs, ys), 1):
        sx += a
        sy += b
        best = max(best, (i * shift + sy) / (i * shift + sx))
    return best - 1.0


def energy_difference(x: Sequence[float], y: Sequence[float], energy: EnergyKind) -> float:
    if energy.kind == "lex":
        return delta_e_lex(x, y)
    if energy.kind == "cw":
        return delta_e_cw(x, y, energy.delta)
    return delta_e_ps(x, y, energy.delta)
