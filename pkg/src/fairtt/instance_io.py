"""ITC2007 track-3 (``.ctt``) instance files and solution files.

Instance grammar::

    Name: <tok>
    Courses: <int>
    Rooms: <int>
    Days: <int>
    Periods_per_day: <int>
    Curricula: <int>
    Constraints: <int>

    COURSES:
    <id> <teacher> <#lectures> <minWorkingDays> <#students>
    ROOMS:
    <id> <capacity>
    CURRICULA:
    <id> <#courses> <course...>
    UNAVAILABILITY_CONSTRAINTS:
    <course> <day> <timeslot>
    END.

Fields are separated by any run of blanks or tabs, blank lines are ignored.
A solution file has one ``<course> <room> <day> <timeslot>`` line per lecture.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import (
    CapacityExceeded,
    CountMismatch,
    DanglingReference,
    InvalidPeriod,
    LectureCountMismatch,
    MalformedEntry,
    MalformedHeader,
    UnknownCourse,
    UnknownRoom,
)

HEADER_KEYS = ("Name", "Courses", "Rooms", "Days", "Periods_per_day", "Curricula", "Constraints")
SECTIONS = ("COURSES:", "ROOMS:", "CURRICULA:", "UNAVAILABILITY_CONSTRAINTS:")
TERMINATOR = "END."


class Period(NamedTuple):
    day: int
    timeslot: int


class Placement(NamedTuple):
    period: Period
    room: str


@dataclass(frozen=True)
class Course:
    id: str
    teacher: str
    lectures: int
    min_working_days: int
    students: int


@dataclass(frozen=True)
class Room:
    id: str
    capacity: int


@dataclass(frozen=True)
class Curriculum:
    id: str
    course_ids: tuple[str, ...]


@dataclass(frozen=True)
class Instance:
    """Immutable CB-CTT problem description.

    Courses, rooms and curricula keep file order; that order defines the
    integer indices used by the evaluator and the allocation vector layout.
    """

    name: str
    days: int
    periods_per_day: int
    courses: tuple[Course, ...]
    rooms: tuple[Room, ...]
    curricula: tuple[Curriculum, ...]
    unavailability: frozenset[tuple[str, Period]]

    @property
    def n_periods(self) -> int:
        return self.days * self.periods_per_day

    @property
    def total_lectures(self) -> int:
        return sum(c.lectures for c in self.courses)

    def periods(self) -> Iterator[Period]:
        for d in range(self.days):
            for s in range(self.periods_per_day):
                yield Period(d, s)

    def period_index(self, period: Period) -> int:
        return period[0] * self.periods_per_day + period[1]

    def period_at(self, index: int) -> Period:
        return Period(*divmod(index, self.periods_per_day))

    def valid_period(self, period: Period) -> bool:
        return 0 <= period[0] < self.days and 0 <= period[1] < self.periods_per_day

    @cached_property
    def course_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.courses)}

    @cached_property
    def room_index(self) -> dict[str, int]:
        return {r.id: i for i, r in enumerate(self.rooms)}

    @cached_property
    def curriculum_index(self) -> dict[str, int]:
        return {q.id: i for i, q in enumerate(self.curricula)}

    @cached_property
    def curriculum_members(self) -> tuple[tuple[int, ...], ...]:
        """Course indices per curriculum."""
        idx = self.course_index
        return tuple(tuple(idx[c] for c in q.course_ids) for q in self.curricula)

    @cached_property
    def curricula_of_course(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.courses]
        for qi, members in enumerate(self.curriculum_members):
            for ci in members:
                out[ci].append(qi)
        return tuple(tuple(x) for x in out)

    @cached_property
    def teacher_of_course(self) -> tuple[int, ...]:
        ids: dict[str, int] = {}
        return tuple(ids.setdefault(c.teacher, len(ids)) for c in self.courses)

    @cached_property
    def conflicts(self) -> tuple[frozenset[int], ...]:
        """Courses that may not share a period with each course (itself included)."""
        adj: list[set[int]] = [{i} for i in range(len(self.courses))]
        for members in self.curriculum_members:
            for a in members:
                adj[a].update(members)
        by_teacher: dict[int, list[int]] = {}
        for ci, t in enumerate(self.teacher_of_course):
            by_teacher.setdefault(t, []).append(ci)
        for group in by_teacher.values():
            for a in group:
                adj[a].update(group)
        return tuple(frozenset(s) for s in adj)

    @cached_property
    def unavailable(self) -> tuple[frozenset[int], ...]:
        """Unavailable period indices per course index."""
        out: list[set[int]] = [set() for _ in self.courses]
        for cid, period in self.unavailability:
            out[self.course_index[cid]].add(self.period_index(period))
        return tuple(frozenset(s) for s in out)


class Timetable:
    """Placement of every lecture as a ``(Period, room_id)`` pair, per course.

    Placements are kept sorted by (day, timeslot, room), so two timetables
    compare equal whenever they agree up to per-course placement order.
    """

    __slots__ = ("_placements",)

    def __init__(self, placements: Mapping[str, Iterable[tuple[tuple[int, int], str]]]):
        self._placements: dict[str, tuple[Placement, ...]] = {
            cid: tuple(sorted(Placement(Period(*p), r) for p, r in ps))
            for cid, ps in placements.items()
        }

    @property
    def placements(self) -> Mapping[str, tuple[Placement, ...]]:
        return self._placements

    def __getitem__(self, course_id: str) -> tuple[Placement, ...]:
        return self._placements[course_id]

    def __iter__(self) -> Iterator[tuple[str, Placement]]:
        for cid, ps in self._placements.items():
            for p in ps:
                yield cid, p

    def __len__(self) -> int:
        return sum(len(ps) for ps in self._placements.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Timetable):
            return NotImplemented
        return self._placements == other._placements

    def __hash__(self) -> int:
        return hash(frozenset(self._placements.items()))

    def __repr__(self) -> str:
        return f"Timetable({self._placements!r})"


# -- parsing ------------------------------------------------------------------


def _int(tok: str, lineno: int, what: str, minimum: int = 0) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise MalformedEntry(f"{what} must be an integer, got {tok!r}", lineno) from None
    if v < minimum:
        raise MalformedEntry(f"{what} must be >= {minimum}, got {v}", lineno)
    return v


def _lines(text: str) -> list[tuple[int, list[str]]]:
    return [(n, line.split()) for n, line in enumerate(text.splitlines(), 1) if line.strip()]


def parse_instance(text: str) -> Instance:
    """Parse a ``.ctt`` instance and check every structural invariant."""
    lines = _lines(text)
    pos = 0
    header: dict[str, str] = {}
    while pos < len(lines) and lines[pos][1][0] not in SECTIONS:
        lineno, toks = lines[pos]
        key = toks[0]
        if not key.endswith(":") or len(toks) != 2:
            raise MalformedHeader(f"expected 'Key: value', got {' '.join(toks)!r}", lineno)
        key = key[:-1]
        if key not in HEADER_KEYS:
            raise MalformedHeader(f"unknown header key {key!r}", lineno)
        if key in header:
            raise MalformedHeader(f"duplicate header key {key!r}", lineno)
        header[key] = toks[1]
        pos += 1
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise MalformedHeader(f"missing header key(s): {', '.join(missing)}")

    n_courses = _int(header["Courses"], 0, "Courses")
    n_rooms = _int(header["Rooms"], 0, "Rooms")
    days = _int(header["Days"], 0, "Days", 1)
    ppd = _int(header["Periods_per_day"], 0, "Periods_per_day", 1)
    n_curricula = _int(header["Curricula"], 0, "Curricula")
    n_constraints = _int(header["Constraints"], 0, "Constraints")

    sections: dict[str, list[tuple[int, list[str]]]] = {}
    for marker in SECTIONS:
        if pos >= len(lines) or lines[pos][1] != [marker]:
            where = lines[pos][0] if pos < len(lines) else None
            raise MalformedHeader(f"expected section {marker}", where)
        pos += 1
        body = []
        while pos < len(lines) and lines[pos][1][0] not in SECTIONS and lines[pos][1] != [TERMINATOR]:
            body.append(lines[pos])
            pos += 1
        sections[marker] = body
    if pos >= len(lines) or lines[pos][1] != [TERMINATOR]:
        raise MalformedHeader(f"missing terminator {TERMINATOR}")
    if pos + 1 != len(lines):
        raise MalformedEntry("content after END.", lines[pos + 1][0])

    def check_count(marker: str, declared: int, key: str) -> None:
        actual = len(sections[marker])
        if actual != declared:
            raise CountMismatch(f"{key}: declared {declared}, found {actual} entries")

    check_count("COURSES:", n_courses, "Courses")
    check_count("ROOMS:", n_rooms, "Rooms")
    check_count("CURRICULA:", n_curricula, "Curricula")
    check_count("UNAVAILABILITY_CONSTRAINTS:", n_constraints, "Constraints")

    courses = []
    for lineno, toks in sections["COURSES:"]:
        if len(toks) != 5:
            raise MalformedEntry(f"course line needs 5 fields, got {len(toks)}", lineno)
        courses.append(
            Course(
                toks[0],
                toks[1],
                _int(toks[2], lineno, "lectures", 1),
                _int(toks[3], lineno, "min_working_days", 1),
                _int(toks[4], lineno, "students"),
            )
        )
    course_ids = {c.id for c in courses}
    if len(course_ids) != len(courses):
        raise MalformedEntry("duplicate course id")

    rooms = []
    for lineno, toks in sections["ROOMS:"]:
        if len(toks) != 2:
            raise MalformedEntry(f"room line needs 2 fields, got {len(toks)}", lineno)
        rooms.append(Room(toks[0], _int(toks[1], lineno, "capacity")))
    if len({r.id for r in rooms}) != len(rooms):
        raise MalformedEntry("duplicate room id")

    curricula = []
    for lineno, toks in sections["CURRICULA:"]:
        if len(toks) < 2:
            raise MalformedEntry("curriculum line needs an id and a member count", lineno)
        n = _int(toks[1], lineno, "curriculum size", 1)
        members = toks[2:]
        if len(members) != n:
            raise CountMismatch(f"curriculum {toks[0]}: declared {n} courses, found {len(members)}", lineno)
        if len(set(members)) != len(members):
            raise MalformedEntry(f"curriculum {toks[0]} lists a course twice", lineno)
        for cid in members:
            if cid not in course_ids:
                raise DanglingReference(f"curriculum {toks[0]} references unknown course {cid!r}", lineno)
        curricula.append(Curriculum(toks[0], tuple(members)))
    if len({q.id for q in curricula}) != len(curricula):
        raise MalformedEntry("duplicate curriculum id")

    unavailability = set()
    for lineno, toks in sections["UNAVAILABILITY_CONSTRAINTS:"]:
        if len(toks) != 3:
            raise MalformedEntry(f"constraint line needs 3 fields, got {len(toks)}", lineno)
        if toks[0] not in course_ids:
            raise DanglingReference(f"constraint references unknown course {toks[0]!r}", lineno)
        day = _int(toks[1], lineno, "day")
        slot = _int(toks[2], lineno, "timeslot")
        if day >= days or slot >= ppd:
            raise InvalidPeriod(f"period ({day}, {slot}) outside {days}x{ppd} grid", lineno)
        unavailability.add((toks[0], Period(day, slot)))

    total = sum(c.lectures for c in courses)
    if total > n_rooms * days * ppd:
        raise CapacityExceeded(f"{total} lectures exceed {n_rooms * days * ppd} resources")

    return Instance(
        name=header["Name"],
        days=days,
        periods_per_day=ppd,
        courses=tuple(courses),
        rooms=tuple(rooms),
        curricula=tuple(curricula),
        unavailability=frozenset(unavailability),
    )


def serialize_instance(inst: Instance) -> str:
    """Inverse of :func:`parse_instance` (unavailabilities sorted)."""
    out = [
        f"Name: {inst.name}",
        f"Courses: {len(inst.courses)}",
        f"Rooms: {len(inst.rooms)}",
        f"Days: {inst.days}",
        f"Periods_per_day: {inst.periods_per_day}",
        f"Curricula: {len(inst.curricula)}",
        f"Constraints: {len(inst.unavailability)}",
        "",
        "COURSES:",
    ]
    out += [f"{c.id} {c.teacher} {c.lectures} {c.min_working_days} {c.students}" for c in inst.courses]
    out += ["", "ROOMS:"]
    out += [f"{r.id}\t{r.capacity}" for r in inst.rooms]
    out += ["", "CURRICULA:"]
    out += [f"{q.id}  {len(q.course_ids)}  {' '.join(q.course_ids)}" for q in inst.curricula]
    out += ["", "UNAVAILABILITY_CONSTRAINTS:"]
    order = inst.course_index
    for cid, p in sorted(inst.unavailability, key=lambda u: (order[u[0]], u[1])):
        out.append(f"{cid} {p.day} {p.timeslot}")
    out += ["", TERMINATOR, ""]
    return "\n".join(out)


def parse_solution(text: str, inst: Instance) -> Timetable:
    placements: dict[str, list[Placement]] = {c.id: [] for c in inst.courses}
    for lineno, toks in _lines(text):
        if len(toks) != 4:
            raise MalformedEntry(f"solution line needs 4 fields, got {len(toks)}", lineno)
        cid, rid = toks[0], toks[1]
        if cid not in placements:
            raise UnknownCourse(f"unknown course {cid!r}", lineno)
        if rid not in inst.room_index:
            raise UnknownRoom(f"unknown room {rid!r}", lineno)
        period = Period(_int(toks[2], lineno, "day"), _int(toks[3], lineno, "timeslot"))
        if not inst.valid_period(period):
            raise InvalidPeriod(f"period {tuple(period)} outside {inst.days}x{inst.periods_per_day} grid", lineno)
        placements[cid].append(Placement(period, rid))
    for c in inst.courses:
        if len(placements[c.id]) != c.lectures:
            raise LectureCountMismatch(
                f"course {c.id}: {len(placements[c.id])} placements for {c.lectures} lectures"
            )
    return Timetable(placements)


def serialize_solution(t: Timetable) -> str:
    """One ``course room day timeslot`` line per placement, deterministic order."""
    return "".join(f"{cid} {room} {p.day} {p.timeslot}\n" for cid, (p, room) in t)


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def load_solution(path: str | Path, inst: Instance) -> Timetable:
    return parse_solution(Path(path).read_text(), inst)


def write_solution(path: str | Path, t: Timetable) -> None:
    Path(path).write_text(serialize_solution(t))
