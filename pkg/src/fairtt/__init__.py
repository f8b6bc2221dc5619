"""Fair curriculum-based course timetabling."""

from .errors import FairTTError
from .evaluator import (
    PenaltyAllocation,
    check_hard,
    penalty_allocation,
    shifted_allocation,
    total_penalty,
)
from .fairness import EnergyKind, MMOrder, jain_index, mm_compare
from .harness import format_allocation, run_batch, wilcoxon_one_sided
from .instance_io import Instance, Period, Timetable, parse_instance, parse_solution, serialize_solution
from .jfi_solver import ObjectivePair, ParetoArchive, solve_jfi
from .mmf_solver import SAParams, solve_mmf
from .neighborhood import build_initial

__all__ = [
    "EnergyKind",
    "FairTTError",
    "Instance",
    "MMOrder",
    "ObjectivePair",
    "ParetoArchive",
    "PenaltyAllocation",
    "Period",
    "SAParams",
    "Timetable",
    "build_initial",
    "check_hard",
    "format_allocation",
    "jain_index",
    "mm_compare",
    "parse_instance",
    "parse_solution",
    "penalty_allocation",
    "run_batch",
    "serialize_solution",
    "shifted_allocation",
    "solve_jfi",
    "solve_mmf",
    "total_penalty",
    "wilcoxon_one_sided",
]
