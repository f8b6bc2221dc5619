"""Hard/soft constraint evaluation and per-curriculum penalty attribution.

Weights are the standard track-3 ones: 1 per student over capacity (S1),
5 per missing working day (S2), 2 per isolated curriculum lecture (S3) and
1 per extra room used by a course (S4).  A course's S1, S2 and S4 points are
charged in full to every curriculum that contains it; S3 belongs to the
curriculum itself.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import Infeasible, UnknownCourse, UnknownCurriculum
from .instance_io import Instance, Period, Timetable

W_ROOM_CAPACITY = 1
W_MIN_WORKING_DAYS = 5
W_ISOLATED_LECTURES = 2
W_ROOM_STABILITY = 1


@dataclass(frozen=True)
class HardViolation:
    kind: str  # "H1" .. "H4"
    detail: tuple

    def __str__(self) -> str:
        return f"{self.kind}: {' '.join(map(str, self.detail))}"


@dataclass(frozen=True)
class PenaltyBreakdown:
    room_capacity: int = 0
    min_working_days: int = 0
    isolated_lectures: int = 0
    room_stability: int = 0

    @property
    def total(self) -> int:
        return self.room_capacity + self.min_working_days + self.isolated_lectures + self.room_stability


@dataclass(frozen=True)
class PenaltyAllocation(Sequence[int]):
    """Nonnegative penalty per curriculum, in instance curriculum order."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if any(v < 0 for v in self.values):
            raise ValueError("penalty allocations are nonnegative")

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def sorted_desc(self) -> tuple[int, ...]:
        return tuple(sorted(self.values, reverse=True))


# -- hard constraints ---------------------------------------------------------


def check_hard(inst: Instance, t: Timetable) -> list[HardViolation]:
    """All hard-constraint violations; empty iff ``t`` is feasible."""
    out: list[HardViolation] = []
    by_period: dict[Period, list[tuple[str, str]]] = defaultdict(list)
    for cid, (period, room) in t:
        by_period[period].append((cid, room))

    conflicts = inst.conflicts
    cidx = inst.course_index
    for period, entries in sorted(by_period.items()):
        for (c1, r1), (c2, r2) in combinations(entries, 2):
            if c1 == c2:
                out.append(HardViolation("H1", (c1, period)))
            elif cidx[c2] in conflicts[cidx[c1]]:
                out.append(HardViolation("H3", (c1, c2, period)))
            if r1 == r2:
                out.append(HardViolation("H2", (c1, c2, period, r1)))
    for cid, (period, _) in t:
        if (cid, period) in inst.unavailability:
            out.append(HardViolation("H4", (cid, period)))
    return out


def ensure_feasible(inst: Instance, t: Timetable) -> None:
    violations = check_hard(inst, t)
    if violations:
        raise Infeasible(violations)


# -- soft constraints ---------------------------------------------------------


def course_soft_penalties(inst: Instance, t: Timetable, course_id: str) -> PenaltyBreakdown:
    if course_id not in inst.course_index:
        raise UnknownCourse(f"unknown course {course_id!r}")
    course = inst.courses[inst.course_index[course_id]]
    caps = {r.id: r.capacity for r in inst.rooms}
    placements = t[course_id]
    s1 = sum(max(0, course.students - caps[room]) for _, room in placements)
    days = len({p.day for p, _ in placements})
    rooms = len({room for _, room in placements})
    return PenaltyBreakdown(
        room_capacity=s1 * W_ROOM_CAPACITY,
        min_working_days=max(0, course.min_working_days - days) * W_MIN_WORKING_DAYS,
        room_stability=max(0, rooms - 1) * W_ROOM_STABILITY,
    )


def curriculum_compactness_penalty(inst: Instance, t: Timetable, curriculum_id: str) -> int:
    if curriculum_id not in inst.curriculum_index:
        raise UnknownCurriculum(f"unknown curriculum {curriculum_id!r}")
    q = inst.curricula[inst.curriculum_index[curriculum_id]]
    slots = Counter(p for cid in q.course_ids for p, _ in t[cid])
    isolated = 0
    for (day, slot), n in slots.items():
        if slots.get(Period(day, slot - 1), 0) == 0 and slots.get(Period(day, slot + 1), 0) == 0:
            isolated += n
    return isolated * W_ISOLATED_LECTURES


def curriculum_penalty(inst: Instance, t: Timetable, curriculum_id: str) -> int:
    """Penalty f_c of one curriculum."""
    if curriculum_id not in inst.curriculum_index:
        raise UnknownCurriculum(f"unknown curriculum {curriculum_id!r}")
    q = inst.curricula[inst.curriculum_index[curriculum_id]]
    courses = sum(course_soft_penalties(inst, t, cid).total for cid in q.course_ids)
    return courses + curriculum_compactness_penalty(inst, t, curriculum_id)


def total_penalty(inst: Instance, t: Timetable) -> int:
    ensure_feasible(inst, t)
    courses = sum(course_soft_penalties(inst, t, c.id).total for c in inst.courses)
    return courses + sum(curriculum_compactness_penalty(inst, t, q.id) for q in inst.curricula)


def penalty_allocation(inst: Instance, t: Timetable) -> PenaltyAllocation:
    ensure_feasible(inst, t)
    return PenaltyAllocation(tuple(curriculum_penalty(inst, t, q.id) for q in inst.curricula))


def shifted_allocation(a: Iterable[int]) -> tuple[int, ...]:
    """Map penalties to ``f_max - f_c`` so that unpenalized curricula score highest."""
    values = tuple(a)
    if not values:
        return ()
    top = max(values)
    return tuple(top - v for v in values)


# -- incremental state --------------------------------------------------------


class SearchState:
    """Mutable array form of a feasible timetable with cached penalties.

    Lectures are numbered course by course in instance order.  ``relocate``
    moves a batch of lectures and refreshes only the penalties of the moved
    courses and of the curricula containing them.  One state belongs to one
    solver run.
    """

    def __init__(self, inst: Instance, t: Timetable):
        self.inst = inst
        n_periods = inst.n_periods
        self.course_of: list[int] = []
        self.lectures_of: list[list[int]] = [[] for _ in inst.courses]
        self.period: list[int] = []
        self.room: list[int] = []
        for ci, c in enumerate(inst.courses):
            for p, r in t[c.id]:
                self.lectures_of[ci].append(len(self.course_of))
                self.course_of.append(ci)
                self.period.append(inst.period_index(p))
                self.room.append(inst.room_index[r])
        self.capacity = [r.capacity for r in inst.rooms]
        self.room_at = [[-1] * len(inst.rooms) for _ in range(n_periods)]
        self.in_period: list[set[int]] = [set() for _ in range(n_periods)]
        self.cur_count = [[0] * n_periods for _ in inst.curricula]
        for lec in range(len(self.course_of)):
            self._place(lec)
        self.recompute()

    # occupancy bookkeeping
    def _place(self, lec: int) -> None:
        p = self.period[lec]
        self.room_at[p][self.room[lec]] = lec
        self.in_period[p].add(lec)
        for q in self.inst.curricula_of_course[self.course_of[lec]]:
            self.cur_count[q][p] += 1

    def _remove(self, lec: int) -> None:
        p = self.period[lec]
        if self.room_at[p][self.room[lec]] == lec:
            self.room_at[p][self.room[lec]] = -1
        self.in_period[p].discard(lec)
        for q in self.inst.curricula_of_course[self.course_of[lec]]:
            self.cur_count[q][p] -= 1

    # penalty terms
    def course_penalty(self, ci: int) -> int:
        course = self.inst.courses[ci]
        lecs = self.lectures_of[ci]
        ppd = self.inst.periods_per_day
        s1 = sum(max(0, course.students - self.capacity[self.room[l]]) for l in lecs)
        days = len({self.period[l] // ppd for l in lecs})
        rooms = len({self.room[l] for l in lecs})
        return (
            s1 * W_ROOM_CAPACITY
            + max(0, course.min_working_days - days) * W_MIN_WORKING_DAYS
            + (rooms - 1) * W_ROOM_STABILITY
        )

    def curriculum_s3(self, qi: int) -> int:
        counts = self.cur_count[qi]
        ppd = self.inst.periods_per_day
        isolated = 0
        for p, n in enumerate(counts):
            if n:
                s = p % ppd
                left = counts[p - 1] if s > 0 else 0
                right = counts[p + 1] if s < ppd - 1 else 0
                if not left and not right:
                    isolated += n
        return isolated * W_ISOLATED_LECTURES

    def _curriculum_total(self, qi: int) -> int:
        return sum(self.course_pen[ci] for ci in self.inst.curriculum_members[qi]) + self.s3[qi]

    def recompute(self) -> None:
        """Full re-evaluation of every cached term."""
        self.course_pen = [self.course_penalty(ci) for ci in range(len(self.inst.courses))]
        self.s3 = [self.curriculum_s3(qi) for qi in range(len(self.inst.curricula))]
        self.alloc = [self._curriculum_total(qi) for qi in range(len(self.inst.curricula))]
        self.total = sum(self.course_pen) + sum(self.s3)

    # mutation
    def relocate(self, changes: Sequence[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
        """Move lectures to new ``(period, room)`` slots; returns the undo batch."""
        undo = [(lec, self.period[lec], self.room[lec]) for lec, _, _ in changes]
        for lec, _, _ in changes:
            self._remove(lec)
        for lec, p, r in changes:
            self.period[lec] = p
            self.room[lec] = r
            self._place(lec)
        courses = {self.course_of[lec] for lec, _, _ in changes}
        curricula = set()
        for ci in courses:
            new = self.course_penalty(ci)
            self.total += new - self.course_pen[ci]
            self.course_pen[ci] = new
            curricula.update(self.inst.curricula_of_course[ci])
        for qi in curricula:
            new = self.curriculum_s3(qi)
            self.total += new - self.s3[qi]
            self.s3[qi] = new
            self.alloc[qi] = self._curriculum_total(qi)
        return undo

    def allocation(self) -> PenaltyAllocation:
        return PenaltyAllocation(tuple(self.alloc))

    def snapshot(self) -> tuple[list[int], list[int]]:
        return self.period[:], self.room[:]

    def timetable_from(self, periods: Sequence[int], rooms: Sequence[int]) -> Timetable:
        inst = self.inst
        return Timetable(
            {
                c.id: [(inst.period_at(periods[l]), inst.rooms[rooms[l]].id) for l in self.lectures_of[ci]]
                for ci, c in enumerate(inst.courses)
            }
        )

    def to_timetable(self) -> Timetable:
        return self.timetable_from(self.period, self.room)
