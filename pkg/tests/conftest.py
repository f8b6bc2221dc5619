from __future__ import annotations

from pathlib import Path

import pytest

from fairtt.instance_io import load_instance

import oracle

DATA = Path(__file__).parent / "data"

MINIMAL = """Name: mini
Courses: 1
Rooms: 1
Days: 2
Periods_per_day: 2
Curricula: 1
Constraints: 0

COURSES:
c1 t1 2 1 10

ROOMS:
r1 20

CURRICULA:
q1 1 c1

UNAVAILABILITY_CONSTRAINTS:

END.
"""


@pytest.fixture(scope="session")
def toy():
    return load_instance(DATA / "toy.ctt")


@pytest.fixture(scope="session")
def toy_zero():
    return load_instance(DATA / "toy_zero.ctt")


@pytest.fixture(scope="session")
def medium():
    return load_instance(DATA / "medium.ctt")


@pytest.fixture(scope="session")
def toy_feasible(toy):
    return oracle.enumerate_feasible(toy)


def make_instance(courses, rooms, curricula=(), unavailable=(), days=2, ppd=2, name="t"):
    """Build an instance from compact tuples via the file format."""
    lines = [
        f"Name: {name}",
        f"Courses: {len(courses)}",
        f"Rooms: {len(rooms)}",
        f"Days: {days}",
        f"Periods_per_day: {ppd}",
        f"Curricula: {len(curricula)}",
        f"Constraints: {len(unavailable)}",
        "COURSES:",
        *(" ".join(map(str, c)) for c in courses),
        "ROOMS:",
        *(" ".join(map(str, r)) for r in rooms),
        "CURRICULA:",
        *(f"{q} {len(ms)} {' '.join(ms)}" for q, ms in curricula),
        "UNAVAILABILITY_CONSTRAINTS:",
        *(" ".join(map(str, u)) for u in unavailable),
        "END.",
    ]
    from fairtt.instance_io import parse_instance

    return parse_instance("\n".join(lines))


def tt(**placements):
    """``tt(c1=[(0, 0, "r1"), ...])`` -> Timetable."""
    from fairtt.instance_io import Timetable

    return Timetable({c: [((d, s), r) for d, s, r in ps] for c, ps in placements.items()})
