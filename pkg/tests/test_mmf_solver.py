import math
import time

import pytest

import oracle
from conftest import tt
from fairtt.errors import InfeasibleStart
from fairtt.evaluator import check_hard, penalty_allocation
from fairtt.fairness import EnergyKind, MMOrder, mm_compare
from fairtt.mmf_solver import SAParams, StepClock, acceptance_probability, solve_mmf, temperature_at
from fairtt.neighborhood import build_initial

CW = EnergyKind("cw", 1e-3)


def test_params_defaults_and_validation():
    p = SAParams()
    assert (p.theta_max, p.theta_min, p.delta, p.energy) == (5.0, 0.01, 1e-3, "cw")
    for bad in (dict(theta_min=6.0), dict(theta_min=0.0), dict(timeout=0), dict(delta=0), dict(energy="x")):
        with pytest.raises(ValueError):
            SAParams(**bad)


@pytest.mark.parametrize("t, expected", [(0, 5.0), (192, 0.01), (96, math.sqrt(0.05))])
def test_temperature(t, expected):
    assert temperature_at(SAParams(timeout=192), t) == pytest.approx(expected, abs=1e-9)


def test_temperature_decreasing():
    p = SAParams(timeout=10)
    temps = [temperature_at(p, t / 10) for t in range(101)]
    assert all(a > b for a, b in zip(temps, temps[1:]))


def test_acceptance_not_worse():
    assert acceptance_probability((0, 5), (5, 0), 5.0, CW) == 1.0
    assert acceptance_probability((0, 7), (0, 5), 5.0, CW) == 1.0


def test_acceptance_worse():
    assert acceptance_probability((0, 5), (0, 7), 5.0, CW) == pytest.approx(0.9231311134129087, rel=1e-9)
    assert acceptance_probability((0, 5), (2, 5), 5.0, CW) == pytest.approx(0.0, abs=1e-170)
    p = acceptance_probability((3, 3), (4, 3), 1.0, EnergyKind("lex"))
    assert 0 < p < 1
    assert acceptance_probability((3, 3), (4, 3), 1e-6, EnergyKind("lex")) == 0.0


def test_short_run_not_worse_than_start(toy):
    start = build_initial(toy, 0)
    t0 = time.monotonic()
    best, trace = solve_mmf(toy, start, SAParams(timeout=0.1, seed=3))
    assert time.monotonic() - t0 < 0.1 + 1.0
    assert check_hard(toy, best) == []
    assert mm_compare(penalty_allocation(toy, best), penalty_allocation(toy, start)) is not MMOrder.WORSE
    assert trace.iterations > 0


def test_deterministic_with_step_clock(medium):
    start = build_initial(medium, 0)
    p = SAParams(timeout=5.0, seed=8)
    a = solve_mmf(medium, start, p, clock=StepClock(1e-3))
    b = solve_mmf(medium, start, p, clock=StepClock(1e-3))
    assert a[0] == b[0]
    assert a[1].to_csv() == b[1].to_csv()
    assert (a[1].iterations, a[1].accepted) == (b[1].iterations, b[1].accepted)


def test_trace_is_monotone(medium):
    _, trace = solve_mmf(medium, build_initial(medium, 1), SAParams(timeout=4.0, seed=1), clock=StepClock(1e-3))
    assert len(trace.records) > 1
    for prev, nxt in zip(trace.records, trace.records[1:]):
        assert mm_compare(nxt.allocation, prev.allocation) is MMOrder.BETTER
        assert nxt.elapsed >= prev.elapsed
    assert trace.records[-1].allocation == penalty_allocation(medium, trace.best)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "elapsed_s,best_alloc,total_penalty"
    assert len(lines) == len(trace.records) + 1


def test_best_is_feasible_and_matches_trace_total(toy):
    best, trace = solve_mmf(toy, build_initial(toy, 2), SAParams(timeout=2.0, seed=4), clock=StepClock(1e-3))
    total, alloc = oracle.recount(toy, oracle.from_timetable(best))
    assert check_hard(toy, best) == []
    assert trace.records[-1].total_penalty == total
    assert oracle.mm_key(alloc) == trace.records[-1].allocation.sorted_desc()


@pytest.mark.parametrize("energy", ["lex", "cw", "ps"])
def test_finds_toy_optimum(toy, toy_feasible, energy):
    optimum = min(oracle.mm_key(oracle.recount(toy, s)[1]) for s in toy_feasible)
    best, _ = solve_mmf(toy, build_initial(toy, 0), SAParams(timeout=3.0, energy=energy, seed=5), clock=StepClock(1e-4))
    assert penalty_allocation(toy, best).sorted_desc() == optimum


def test_infeasible_start(toy):
    bad = tt(c1=[(0, 0, "rA")], c2=[(0, 0, "rB"), (1, 0, "rA")], c3=[(1, 1, "rA")], c4=[(0, 1, "rA")])
    with pytest.raises(InfeasibleStart):
        solve_mmf(toy, bad, SAParams(timeout=0.1))
