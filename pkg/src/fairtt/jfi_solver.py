"""Bi-objective (penalty, unfairness) search with a Pareto archive.

The annealer is a cut-down AMOSA: acceptance depends on Pareto dominance
between the candidate, the current point and the archive, and the archive
is pruned by single-linkage clustering once it grows past its soft limit.
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import AllZero, InfeasibleStart
from .evaluator import SearchState, check_hard, penalty_allocation, shifted_allocation, total_penalty
from .fairness import jain_index
from .instance_io import Instance, Timetable, write_solution
from .mmf_solver import Clock, SAParams, temperature_at
from .neighborhood import NEIGHBOR_ATTEMPTS, propose_move

SOFT_LIMIT = 50
HARD_LIMIT = 100
PENALTY_RANGE_FLOOR = 1.0
UNFAIRNESS_RANGE_FLOOR = 1e-6


class ObjectivePair(NamedTuple):
    penalty: int
    unfairness: float

    @property
    def jain(self) -> float:
        return 1.0 - self.unfairness


def unfairness_of(allocation: Sequence[int]) -> float:
    """``1 - J(A')``; a uniform allocation (all-zero shift) counts as perfectly fair."""
    try:
        return 1.0 - jain_index(shifted_allocation(allocation))
    except AllZero:
        return 0.0


def objective(inst: Instance, t: Timetable) -> ObjectivePair:
    return ObjectivePair(total_penalty(inst, t), unfairness_of(penalty_allocation(inst, t)))


def dominates(a: ObjectivePair, b: ObjectivePair) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


@dataclass
class ArchiveEntry:
    timetable: Timetable
    objective: ObjectivePair


@dataclass
class ParetoArchive:
    entries: list[ArchiveEntry] = field(default_factory=list)
    soft_limit: int = SOFT_LIMIT
    hard_limit: int = HARD_LIMIT
    pinned: ObjectivePair | None = None  # survives clustering while present

    def __post_init__(self):
        if not 0 < self.soft_limit <= self.hard_limit:
            raise ValueError("need 0 < soft_limit <= hard_limit")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def points(self) -> list[ObjectivePair]:
        return [e.objective for e in self.entries]

    def insert(self, t: Timetable, obj: ObjectivePair) -> bool:
        """Add ``(t, obj)`` unless dominated or already present; returns whether it was added."""
        return archive_insert(self, t, obj)

    def dominators(self, obj: ObjectivePair) -> list[ObjectivePair]:
        return [e.objective for e in self.entries if dominates(e.objective, obj)]

    def admits(self, obj: ObjectivePair) -> bool:
        """Whether ``obj`` would be inserted (not dominated, not a duplicate)."""
        return not any(dominates(e.objective, obj) or e.objective == obj for e in self.entries)


def _normalized(points: Sequence[ObjectivePair]) -> np.ndarray:
    arr = np.array(points, dtype=float)
    span = arr.max(axis=0) - arr.min(axis=0)
    span = np.maximum(span, [PENALTY_RANGE_FLOOR, UNFAIRNESS_RANGE_FLOOR])
    return (arr - arr.min(axis=0)) / span


def _cluster(entries: list[ArchiveEntry], target: int, pinned: ObjectivePair | None = None) -> list[ArchiveEntry]:
    """Reduce to ``target`` entries: single-linkage clusters, one medoid each."""
    pts = _normalized([e.objective for e in entries])
    labels = fcluster(linkage(pts, method="single"), t=target, criterion="maxclust")
    kept = []
    for label in sorted(set(labels)):
        idx = np.flatnonzero(labels == label)
        pin = [i for i in idx if entries[i].objective == pinned]
        if pin:
            kept.append(int(pin[0]))
            continue
        sub = pts[idx]
        dist = np.sqrt(((sub[:, None, :] - sub[None, :, :]) ** 2).sum(-1)).sum(1)
        kept.append(int(idx[np.argmin(dist)]))
    return [entries[i] for i in sorted(kept)]


def archive_insert(arch: ParetoArchive, t: Timetable, obj: ObjectivePair) -> bool:
    obj = ObjectivePair(*obj)
    if not arch.admits(obj):
        return False
    arch.entries = [e for e in arch.entries if not dominates(obj, e.objective)]
    arch.entries.append(ArchiveEntry(t, obj))
    if len(arch.entries) > arch.soft_limit:
        arch.entries = _cluster(arch.entries, arch.soft_limit, arch.pinned)
    return True


def merge_archives(archives: Iterable[ParetoArchive]) -> ParetoArchive:
    archives = list(archives)
    out = ParetoArchive(
        soft_limit=archives[0].soft_limit if archives else SOFT_LIMIT,
        hard_limit=archives[0].hard_limit if archives else HARD_LIMIT,
    )
    for arch in archives:
        for e in arch.entries:
            archive_insert(out, e.timetable, e.objective)
    return out


def domination_amount(a: ObjectivePair, b: ObjectivePair, ranges: Sequence[float]) -> float:
    """Product of normalized differences over the objectives where a and b differ."""
    amount = 1.0
    for x, y, r in zip(a, b, ranges):
        if x != y:
            amount *= abs(x - y) / r
    return amount


def _ranges(points: Iterable[ObjectivePair]) -> tuple[float, float]:
    pts = list(points)
    pen = max(p[0] for p in pts) - min(p[0] for p in pts)
    unf = max(p[1] for p in pts) - min(p[1] for p in pts)
    return max(pen, PENALTY_RANGE_FLOOR), max(unf, UNFAIRNESS_RANGE_FLOOR)


@dataclass
class JFIRun:
    archive: ParetoArchive
    seed_point: ObjectivePair
    iterations: int = 0
    accepted: int = 0


def jfi_params(**overrides) -> SAParams:
    """SAParams with the bi-objective defaults (theta_max=20)."""
    return SAParams(**{"theta_max": 20.0, **overrides})


def solve_jfi(
    inst: Instance,
    start: Timetable,
    p: SAParams,
    clock: Clock = time.monotonic,
    attempts: int = NEIGHBOR_ATTEMPTS,
    archive: ParetoArchive | None = None,
    on_insert=None,
) -> JFIRun:
    """Anneal over Kempe neighbors from ``start`` and return the Pareto archive.

    Acceptance: a candidate that dominates the current point is taken; one
    that is incomparable to the current point and undominated by the archive
    is taken; otherwise it is taken with probability
    ``1 / (1 + exp(mean_domination / theta))``, the mean running over the
    current point and all archive points that dominate the candidate.  Every
    evaluated candidate is offered to the archive.
    """
    violations = check_hard(inst, start)
    if violations:
        raise InfeasibleStart(violations)
    rng = random.Random(p.seed)
    state = SearchState(inst, start)
    arch = archive if archive is not None else ParetoArchive()
    current = ObjectivePair(state.total, unfairness_of(state.alloc))
    arch.pinned = current
    archive_insert(arch, start, current)
    if on_insert:
        on_insert(arch)
    run = JFIRun(arch, current)

    t0 = clock()
    while True:
        elapsed = clock() - t0
        if elapsed >= p.timeout:
            break
        theta = temperature_at(p, elapsed)
        undo = state.relocate(propose_move(state, rng, attempts))
        cand = ObjectivePair(state.total, unfairness_of(state.alloc))
        run.iterations += 1

        if arch.admits(cand):
            archive_insert(arch, state.to_timetable(), cand)
            if on_insert:
                on_insert(arch)

        if dominates(cand, current):
            accept = True
        else:
            doms = arch.dominators(cand)
            if dominates(current, cand):
                doms.append(current)
            if not doms:
                accept = True
            else:
                ranges = _ranges(arch.points() + [current, cand])
                mean = sum(domination_amount(d, cand, ranges) for d in doms) / len(doms)
                accept = rng.random() < _logistic(mean / theta)
        if accept:
            current = cand
            run.accepted += 1
        else:
            state.relocate(undo)
    return run


def _logistic(x: float) -> float:
    # 1 / (1 + exp(x)) without overflow
    if x > 700:
        return 0.0
    return 1.0 / (1.0 + math.exp(x))


# -- export -------------------------------------------------------------------


def export_archive(arch: ParetoArchive, out_dir: str | Path, stem: str = "pareto") -> Path:
    """Write one solution file per entry plus ``<stem>.csv`` indexing them."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = sorted(arch.entries, key=lambda e: (e.objective.jain, e.objective.penalty))
    csv_path = out_dir / f"{stem}.csv"
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["jain_index", "total_penalty", "solution_file_path"])
        for i, e in enumerate(rows):
            sol = out_dir / f"{stem}_{i:03d}.sol"
            write_solution(sol, e.timetable)
            w.writerow([repr(e.objective.jain), e.objective.penalty, sol.name])
    return csv_path


def read_archive_points(path: str | Path) -> list[ObjectivePair]:
    with Path(path).open(newline="") as fh:
        return [
            ObjectivePair(int(row["total_penalty"]), 1.0 - float(row["jain_index"]))
            for row in csv.DictReader(fh)
        ]
