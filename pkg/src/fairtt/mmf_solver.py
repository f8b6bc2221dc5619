"""Simulated annealing for max-min fair timetables (MaxMinFair_SA)."""

from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import InfeasibleStart
from .evaluator import PenaltyAllocation, SearchState, check_hard
from .fairness import EnergyKind, MMOrder, energy_difference, mm_compare
from .instance_io import Instance, Timetable
from .neighborhood import NEIGHBOR_ATTEMPTS, propose_move

Clock = Callable[[], float]


@dataclass(frozen=True)
class SAParams:
    theta_max: float = 5.0
    theta_min: float = 0.01
    timeout: float = 192.0
    delta: float = 1e-3
    energy: str = "cw"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.theta_min < self.theta_max:
            raise ValueError("need 0 < theta_min < theta_max")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        EnergyKind(self.energy, self.delta)  # validates kind and delta

    @property
    def energy_kind(self) -> EnergyKind:
        return EnergyKind(self.energy, self.delta)

    @property
    def alpha(self) -> float:
        return (self.theta_min / self.theta_max) ** (1.0 / self.timeout)


class StepClock:
    """Deterministic clock that advances by ``step`` seconds on every read.

    Makes a run's trace reproducible bit for bit; wall-clock runs are not.
    """

    def __init__(self, step: float = 1e-3):
        self.step = step
        self.now = 0.0

    def __call__(self) -> float:
        self.now += self.step
        return self.now


@dataclass(frozen=True)
class TraceRecord:
    elapsed: float
    allocation: PenaltyAllocation
    total_penalty: int


@dataclass
class RunTrace:
    records: list[TraceRecord] = field(default_factory=list)
    best: Timetable | None = None
    iterations: int = 0
    accepted: int = 0

    def to_csv(self) -> str:
        from .harness import format_allocation

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["elapsed_s", "best_alloc", "total_penalty"])
        for r in self.records:
            w.writerow([f"{r.elapsed:.6f}", format_allocation(r.allocation), r.total_penalty])
        return buf.getvalue()


def temperature_at(p: SAParams, t: float) -> float:
    """Geometric cooling: ``theta_max`` at t=0 down to ``theta_min`` at the timeout."""
    return p.theta_max * p.alpha ** t


def acceptance_probability(
    x_cur: Sequence[float], y_next: Sequence[float], theta: float, e: EnergyKind
) -> float:
    if mm_compare(y_next, x_cur) is not MMOrder.WORSE:
        return 1.0
    return math.exp(-energy_difference(x_cur, y_next, e) / theta)


def solve_mmf(
    inst: Instance,
    start: Timetable,
    p: SAParams,
    clock: Clock = time.monotonic,
    attempts: int = NEIGHBOR_ATTEMPTS,
) -> tuple[Timetable, RunTrace]:
    """Anneal from ``start`` until ``p.timeout`` seconds have elapsed on ``clock``.

    The best timetable is refreshed whenever the current one is at least as
    good in the max-min sense.  The trace gets one record per strict
    improvement of the best allocation, plus the starting point.
    """
    violations = check_hard(inst, start)
    if violations:
        raise InfeasibleStart(violations)
    rng = random.Random(p.seed)
    energy = p.energy_kind
    state = SearchState(inst, start)
    trace = RunTrace()

    t0 = clock()
    current = state.allocation()
    best = current
    best_arrays = state.snapshot()
    trace.records.append(TraceRecord(0.0, best, state.total))

    while True:
        elapsed = clock() - t0
        if elapsed >= p.timeout:
            break
        theta = temperature_at(p, elapsed)
        undo = state.relocate(propose_move(state, rng, attempts))
        candidate = state.allocation()
        trace.iterations += 1
        if mm_compare(candidate, current) is not MMOrder.WORSE:
            accept = True
        else:
            # P_accept >= random(), with random() in [0, 1)
            accept = math.exp(-energy_difference(current, candidate, energy) / theta) >= rng.random()
        if accept:
            current = candidate
            trace.accepted += 1
        else:
            state.relocate(undo)
        order = mm_compare(current, best)
        if order is not MMOrder.WORSE:
            if order is MMOrder.BETTER:
                trace.records.append(TraceRecord(elapsed, current, state.total))
            best = current
            best_arrays = state.snapshot()

    trace.best = state.timetable_from(*best_arrays)
    return trace.best, trace

