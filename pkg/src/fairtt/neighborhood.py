"""Kempe-chain moves between two periods and greedy feasible construction."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    ConstructionFailed,
    MoveRejected,
    NoLectureInPeriod,
    NoNeighborFound,
    RoomOverflow,
    UnavailabilityViolated,
)
from .evaluator import SearchState
from .instance_io import Instance, Period, Timetable

NEIGHBOR_ATTEMPTS = 100
CONSTRUCTION_RESTARTS = 500

Change = tuple[int, int, int]  # (lecture, new period index, new room index)


@dataclass(frozen=True)
class KempeMove:
    period_a: Period
    period_b: Period
    seed_course: str
    chain: frozenset[tuple[str, Period]]  # (course, source period)
    room_plan: Mapping[tuple[str, Period], str] | None = field(default=None, compare=False)


# -- array-level primitives (used by the solvers) ------------------------------


def chain_lectures(state: SearchState, pa: int, pb: int, seed: int) -> list[int]:
    """Connected component of ``seed`` in the conflict graph between two periods."""
    conflicts = state.inst.conflicts
    course_of = state.course_of
    side = {pa: state.in_period[pb], pb: state.in_period[pa]}
    seen = {seed}
    queue = deque([seed])
    while queue:
        lec = queue.popleft()
        mine = conflicts[course_of[lec]]
        for other in side[state.period[lec]]:
            if other not in seen and course_of[other] in mine:
                seen.add(other)
                queue.append(other)
    return sorted(seen)


def plan_changes(state: SearchState, chain: Sequence[int], pa: int, pb: int) -> list[Change]:
    """Destination slots for every chain lecture, or raise if the move breaks feasibility.

    Lectures that stay keep their rooms.  A moved lecture keeps its previous
    room when that room is free at the destination; the rest are matched by
    decreasing head count against decreasing capacity.
    """
    unavailable = state.inst.unavailable
    course_of = state.course_of
    for lec in chain:
        dest = pb if state.period[lec] == pa else pa
        if dest in unavailable[course_of[lec]]:
            raise UnavailabilityViolated(f"lecture {lec} unavailable in period {dest}")

    moving = set(chain)
    n_rooms = len(state.capacity)
    changes: list[Change] = []
    for src, dest in ((pa, pb), (pb, pa)):
        movers = [lec for lec in chain if state.period[lec] == src]
        stayers = [lec for lec in state.in_period[dest] if lec not in moving]
        if len(movers) + len(stayers) > n_rooms:
            raise RoomOverflow(f"period {dest} would hold {len(movers) + len(stayers)} lectures")
        free = set(range(n_rooms)) - {state.room[lec] for lec in stayers}
        rest = []
        for lec in movers:
            if state.room[lec] in free:
                free.discard(state.room[lec])
                changes.append((lec, dest, state.room[lec]))
            else:
                rest.append(lec)
        courses = state.inst.courses
        rest.sort(key=lambda lec: (-courses[course_of[lec]].students, lec))
        rooms = sorted(free, key=lambda r: (-state.capacity[r], r))
        changes.extend((lec, dest, r) for lec, r in zip(rest, rooms))
    return changes


def propose_move(state: SearchState, rng: random.Random, attempts: int = NEIGHBOR_ATTEMPTS) -> list[Change]:
    """Sample a feasible Kempe move: uniform seed lecture, uniform other period."""
    n_lectures = len(state.course_of)
    n_periods = state.inst.n_periods
    if n_lectures and n_periods > 1:
        for _ in range(attempts):
            seed = rng.randrange(n_lectures)
            pa = state.period[seed]
            pb = rng.randrange(n_periods - 1)
            if pb >= pa:
                pb += 1
            chain = chain_lectures(state, pa, pb, seed)
            try:
                return plan_changes(state, chain, pa, pb)
            except MoveRejected:
                continue
    raise NoNeighborFound(f"no feasible Kempe move in {attempts} attempts")


# -- timetable-level API -------------------------------------------------------


def _seed_lecture(state: SearchState, course_id: str, pa: int) -> int:
    ci = state.inst.course_index[course_id]
    for lec in state.lectures_of[ci]:
        if state.period[lec] == pa:
            return lec
    raise NoLectureInPeriod(f"course {course_id} has no lecture in period {state.inst.period_at(pa)}")


def kempe_chain(inst: Instance, t: Timetable, period_a: Period, period_b: Period, seed_course: str) -> KempeMove:
    period_a, period_b = Period(*period_a), Period(*period_b)
    if period_a == period_b:
        raise ValueError("a Kempe move needs two distinct periods")
    state = SearchState(inst, t)
    pa, pb = inst.period_index(period_a), inst.period_index(period_b)
    chain = chain_lectures(state, pa, pb, _seed_lecture(state, seed_course, pa))
    members = frozenset(
        (inst.courses[state.course_of[lec]].id, inst.period_at(state.period[lec])) for lec in chain
    )
    return KempeMove(period_a, period_b, seed_course, members)


def apply_move(inst: Instance, t: Timetable, m: KempeMove) -> Timetable:
    """Exchange the chain between the two periods and return the new timetable."""
    state = SearchState(inst, t)
    pa, pb = inst.period_index(m.period_a), inst.period_index(m.period_b)
    chain = []
    for cid, src in m.chain:
        chain.append(_seed_lecture(state, cid, inst.period_index(src)))
    chain.sort()
    if m.room_plan is None:
        changes = plan_changes(state, chain, pa, pb)
    else:
        # validate H4 and room counts even for an explicit plan
        plan_changes(state, chain, pa, pb)
        changes = []
        for lec in chain:
            key = (inst.courses[state.course_of[lec]].id, inst.period_at(state.period[lec]))
            dest = pb if state.period[lec] == pa else pa
            changes.append((lec, dest, inst.room_index[m.room_plan[key]]))
    state.relocate(changes)
    return state.to_timetable()


def random_neighbor(
    inst: Instance, t: Timetable, rng: random.Random, attempts: int = NEIGHBOR_ATTEMPTS
) -> Timetable:
    state = SearchState(inst, t)
    state.relocate(propose_move(state, rng, attempts))
    return state.to_timetable()


# -- construction --------------------------------------------------------------


def _greedy(inst: Instance, rng: random.Random) -> Timetable | None:
    n_periods = inst.n_periods
    conflicts = inst.conflicts
    unavailable = inst.unavailable
    courses = inst.courses
    remaining = [c.lectures for c in courses]
    degree = [sum(courses[o].lectures for o in conflicts[ci] if o != ci) for ci in range(len(courses))]
    occupied: list[set[int]] = [set() for _ in range(n_periods)]  # course indices per period
    free_rooms: list[set[int]] = [set(range(len(inst.rooms))) for _ in range(n_periods)]
    placed: dict[int, list[tuple[int, int]]] = {ci: [] for ci in range(len(courses))}

    def options(ci: int) -> list[int]:
        mine = conflicts[ci]
        return [
            p
            for p in range(n_periods)
            if free_rooms[p] and p not in unavailable[ci] and not (occupied[p] & mine)
        ]

    for _ in range(inst.total_lectures):
        best_key, best_ci, best_opts = None, -1, []
        for ci, left in enumerate(remaining):
            if not left:
                continue
            opts = options(ci)
            key = (len(opts), -degree[ci], rng.random())
            if best_key is None or key < best_key:
                best_key, best_ci, best_opts = key, ci, opts
        if not best_opts:
            return None
        p = rng.choice(best_opts)
        students = courses[best_ci].students
        fitting = [r for r in free_rooms[p] if inst.rooms[r].capacity >= students]
        if fitting:
            room = min(fitting, key=lambda r: (inst.rooms[r].capacity, r))
        else:
            room = max(free_rooms[p], key=lambda r: (inst.rooms[r].capacity, -r))
        free_rooms[p].discard(room)
        occupied[p].add(best_ci)
        placed[best_ci].append((p, room))
        remaining[best_ci] -= 1

    return Timetable(
        {
            c.id: [(inst.period_at(p), inst.rooms[r].id) for p, r in placed[ci]]
            for ci, c in enumerate(courses)
        }
    )


def build_initial(inst: Instance, seed: int | None = 0, restarts: int = CONSTRUCTION_RESTARTS) -> Timetable:
    """Feasible timetable by saturation-degree greedy with randomized restarts.

    Soft constraints are ignored apart from preferring the smallest room that
    fits the course.
    """
    rng = random.Random(seed)
    for _ in range(restarts):
        t = _greedy(inst, rng)
        if t is not None:
            return t
    raise ConstructionFailed(f"no feasible timetable after {restarts} greedy restarts")
