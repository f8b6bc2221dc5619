"""Experiment plumbing: allocation notation, batch runs, rank-sum tests, Pareto reports."""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import groupby
from pathlib import Path
from typing import Callable, Sequence

from scipy.stats import norm

from .errors import DegenerateSample, FairTTError
from .evaluator import PenaltyAllocation, penalty_allocation, total_penalty
from .instance_io import Instance, Timetable
from .jfi_solver import ObjectivePair, ParetoArchive, solve_jfi
from .mmf_solver import SAParams, solve_mmf

SIGNIFICANCE = 0.01
EXACT_LIMIT = 12  # exact null distribution when m + n <= this


# -- allocation notation --------------------------------------------------------


def format_allocation(a: Sequence[int]) -> str:
    """Sorted run-length notation, e.g. ``(5, 0, 5, 0, 0)`` -> ``"5^2,0^3"``."""
    parts = []
    for value, run in groupby(sorted(a, reverse=True)):
        n = sum(1 for _ in run)
        parts.append(f"{value}^{n}" if n > 1 else f"{value}")
    return ",".join(parts)


def parse_allocation(text: str) -> tuple[int, ...]:
    """Inverse of :func:`format_allocation` (returns the decreasing vector)."""
    out: list[int] = []
    for tok in text.replace(" ", "").split(","):
        value, _, count = tok.partition("^")
        out.extend([int(value)] * int(count or 1))
    return tuple(out)


# -- Wilcoxon rank-sum ----------------------------------------------------------


@dataclass(frozen=True)
class RankSumReport:
    statistic: float  # rank sum of sample A, midranks for ties
    p_value: float  # P(rank sum <= observed) under H0
    direction: str  # "A_better" or "B_better"
    exact: bool

    def significant(self, level: float = SIGNIFICANCE) -> bool:
        return self.p_value < level


def midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_one_sided(a: Sequence[float], b: Sequence[float]) -> RankSumReport:
    """One-sided rank-sum test of "A tends to lower values than B".

    Exact over all ``C(m+n, m)`` label assignments for small samples, otherwise
    the normal approximation with tie and continuity corrections.
    """
    m, n = len(a), len(b)
    if not m or not n:
        raise ValueError("both samples must be nonempty")
    pooled = list(a) + list(b)
    if len(set(pooled)) == 1:
        raise DegenerateSample("all observations are identical")
    ranks = midranks(pooled)
    w = sum(ranks[:m])
    expected = m * (m + n + 1) / 2
    direction = "A_better" if w <= expected else "B_better"

    if m + n <= EXACT_LIMIT:
        total = hits = 0
        for combo in itertools.combinations(ranks, m):
            total += 1
            if sum(combo) <= w + 1e-9:
                hits += 1
        return RankSumReport(w, hits / total, direction, True)

    N = m + n
    ties = sum(t**3 - t for t in _tie_sizes(pooled))
    var = m * n / 12 * ((N + 1) - ties / (N * (N - 1)))
    z = (w - expected + 0.5) / math.sqrt(var)
    return RankSumReport(w, float(min(1.0, norm.cdf(z))), direction, False)


def _tie_sizes(values: Sequence[float]) -> list[int]:
    return [sum(1 for _ in g) for _, g in groupby(sorted(values))]


# -- batches --------------------------------------------------------------------


@dataclass
class RunRecord:
    seed: int
    allocation: PenaltyAllocation | None
    total_penalty: int | None
    wall_s: float
    error: str | None = None
    archive: list[ObjectivePair] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def worst_penalty(self) -> int | None:
        return max(self.allocation) if self.allocation else None


@dataclass
class BatchResult:
    instance: str
    mode: str
    params: SAParams
    records: list[RunRecord]

    def column(self, name: str = "worst_penalty") -> list[float]:
        return [getattr(r, name) for r in self.records if r.ok]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance", "mode", "seed", "total_penalty", "worst_penalty", "allocation", "wall_s", "error"])
        for r in self.records:
            w.writerow(
                [
                    self.instance,
                    self.mode,
                    r.seed,
                    "" if r.total_penalty is None else r.total_penalty,
                    "" if r.worst_penalty is None else r.worst_penalty,
                    format_allocation(r.allocation) if r.allocation else "",
                    f"{r.wall_s:.3f}",
                    r.error or "",
                ]
            )
        return buf.getvalue()


def read_batch_column(path: str | Path, column: str = "worst_penalty") -> list[float]:
    """One numeric column of a batch CSV, skipping failed runs."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and column not in rows[0]:
        raise KeyError(f"no column {column!r} in {path}")
    return [float(r[column]) for r in rows if not r["error"] and r[column] != ""]


def _one_run(args) -> RunRecord:
    inst, start, params, mode, clock_factory = args
    clock = clock_factory() if clock_factory else time.monotonic
    t0 = time.monotonic()
    try:
        if mode == "mmf":
            best, _ = solve_mmf(inst, start, params, clock=clock)
            alloc = penalty_allocation(inst, best)
            return RunRecord(params.seed, alloc, total_penalty(inst, best), time.monotonic() - t0)
        run = solve_jfi(inst, start, params, clock=clock)
        cheapest = min(run.archive.entries, key=lambda e: e.objective)
        return RunRecord(
            params.seed,
            penalty_allocation(inst, cheapest.timetable),
            cheapest.objective.penalty,
            time.monotonic() - t0,
            archive=sorted(run.archive.points()),
        )
    except FairTTError as exc:
        return RunRecord(params.seed, None, None, time.monotonic() - t0, error=f"{type(exc).__name__}: {exc}")


def default_jobs() -> int:
    env = os.environ.get("FAIRTT_JOBS")
    return max(1, int(env)) if env else 1


def run_batch(
    inst: Instance,
    start: Timetable,
    p: SAParams,
    runs: int,
    mode: str = "mmf",
    jobs: int | None = None,
    clock_factory: Callable[[], Callable[[], float]] | None = None,
) -> BatchResult:
    """Independent runs with seeds ``p.seed, p.seed + 1, ...`` from a shared start.

    Per-run solver errors are recorded, not raised.  Records come back in
    seed order whatever the number of worker processes.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if mode not in ("mmf", "jfi"):
        raise ValueError(f"mode must be 'mmf' or 'jfi', got {mode!r}")
    jobs = jobs or default_jobs()
    tasks = [(inst, start, _with_seed(p, p.seed + i), mode, clock_factory) for i in range(runs)]
    if jobs == 1:
        records = [_one_run(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_one_run, tasks))
    return BatchResult(inst.name, mode, p, records)


def _with_seed(p: SAParams, seed: int) -> SAParams:
    return SAParams(**{**asdict(p), "seed": seed})


# -- Pareto report ----------------------------------------------------------------


def tradeoff_penalty(seed_point: ObjectivePair, jain: float) -> float:
    """Penalty on the line where +1% fairness costs +1% penalty, through the seed."""
    return seed_point.penalty * jain / seed_point.jain


def pareto_rows(points: Sequence[ObjectivePair], seed_point: ObjectivePair) -> list[tuple[float, int, bool]]:
    seed_point = ObjectivePair(*seed_point)
    rows = []
    for pt in points:
        pt = ObjectivePair(*pt)
        rows.append((pt.jain, pt.penalty, pt.penalty < tradeoff_penalty(seed_point, pt.jain)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def pareto_report(arch: ParetoArchive | Sequence[ObjectivePair], seed_point: ObjectivePair) -> str:
    """CSV of (jain_index, penalty, below_tradeoff_line), by increasing fairness."""
    points = arch.points() if isinstance(arch, ParetoArchive) else list(arch)
    if not points:
        raise ValueError("empty archive")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["jain_index", "penalty", "below_tradeoff_line"])
    for jain, pen, below in pareto_rows(points, seed_point):
        w.writerow([f"{jain:.6f}", pen, str(below).lower()])
    return buf.getvalue()
