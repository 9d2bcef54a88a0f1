"""Stable matching by parallel-style iterative improvement.

Implements the PII family of matching algorithms: the standard iteration,
right-minimum and dynamic pair selection, and their composition (PII-RMD),
together with initialization methods, a simulated-parallel cost ledger, a
brute-force oracle for small instances, and a Monte-Carlo benchmark
harness.
"""

from .costmodel import CostLedger, log_step_cost
from .engine import (
    DynamicState,
    OutcomeKind,
    RunResult,
    SelectionPolicy,
    apply_iteration,
    detect_cycle,
    parse_policy,
    run,
    select_nm1,
    select_nm1_generating,
    update_dynamic_state,
)
from .init import gale_shapley_init, initial_matching, quick_init, random_matching
from .matching import (
    Matching,
    Pair,
    count_unstable_pairs,
    find_blocking_pairs,
    is_blocking,
    is_stable,
)
from .oracle import StableSet, enumerate_stable
from .prefs import (
    PreferenceLists,
    PreferenceStructure,
    ValidationError,
    lists_from_ranks,
    random_preferences,
    ranks_from_lists,
)
from .rng import make_rng, mix_seed

__all__ = [
    "CostLedger",
    "DynamicState",
    "Matching",
    "OutcomeKind",
    "Pair",
    "PreferenceLists",
    "PreferenceStructure",
    "RunResult",
    "SelectionPolicy",
    "StableSet",
    "ValidationError",
    "apply_iteration",
    "count_unstable_pairs",
    "detect_cycle",
    "enumerate_stable",
    "find_blocking_pairs",
    "gale_shapley_init",
    "initial_matching",
    "is_blocking",
    "is_stable",
    "lists_from_ranks",
    "log_step_cost",
    "make_rng",
    "mix_seed",
    "parse_policy",
    "quick_init",
    "random_matching",
    "random_preferences",
    "ranks_from_lists",
    "run",
    "select_nm1",
    "select_nm1_generating",
    "update_dynamic_state",
]

__version__ = "0.1.0"
