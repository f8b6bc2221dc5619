"""Exception hierarchy shared by all fairtt modules."""

from __future__ import annotations


class FairTTError(Exception):
    """Base class for every error raised by fairtt."""


# -- instance / solution files ------------------------------------------------


class FormatError(FairTTError, ValueError):
    """Problem with an instance or solution file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedHeader(FormatError):
    pass


class MalformedEntry(FormatError):
    """A section line with the wrong field count or a bad value."""


class CountMismatch(FormatError):
    pass


class DanglingReference(FormatError):
    pass


class InvalidPeriod(FormatError):
    pass


class CapacityExceeded(FormatError):
    """More lectures than (period, room) resources."""


class UnknownCourse(FormatError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return Exception.__str__(self)


class UnknownRoom(FormatError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class LectureCountMismatch(FormatError):
    pass


# -- evaluation ---------------------------------------------------------------


class UnknownCurriculum(FairTTError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class Infeasible(FairTTError):
    """Timetable violates at least one hard constraint."""

    def __init__(self, violations):
        self.violations = list(violations)
        kinds = ", ".join(sorted({v.kind for v in self.violations}))
        super().__init__(f"{len(self.violations)} hard violation(s): {kinds}")


# -- fairness math ------------------------------------------------------------


class LengthMismatch(FairTTError, ValueError):
    pass


class AllZero(FairTTError, ZeroDivisionError):
    """Jain's index is undefined for the all-zero vector."""


class NotWorse(FairTTError, ValueError):
    """Energy difference requested for a candidate that is not strictly worse."""


# -- neighborhood / solvers ---------------------------------------------------


class ConstructionFailed(FairTTError):
    pass


class NoLectureInPeriod(FairTTError, ValueError):
    pass


class MoveRejected(FairTTError):
    """A Kempe move would break feasibility."""


class RoomOverflow(MoveRejected):
    pass


class UnavailabilityViolated(MoveRejected):
    pass


class NoNeighborFound(FairTTError):
    pass


class InfeasibleStart(Infeasible):
    pass


# -- statistics ---------------------------------------------------------------


class DegenerateSample(FairTTError, ValueError):
    pass
