"""Brute-force ground truth for small instances.

Enumerates every permutation and classifies stability with its own
blocking test, written directly from the rank-comparison definition and
deliberately NOT calling the matching module, so a shared bug cannot
validate itself. Guarded to n <= 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .prefs import PreferenceStructure, ValidationError

MAX_ORACLE_N = 8


def oracle_is_stable(P: PreferenceStructure, assignment: tuple[int, ...]) -> bool:
    """Independent stability test over a row->col permutation tuple."""
    left = P.left_rank.tolist()
    right = P.right_rank.tolist()
    n = len(assignment)
    partner_of_col = [0] * n
    for man, woman in enumerate(assignment):
        partner_of_col[woman] = man
    for i in range(n):
        li = left[i]
        li_matched = li[assignment[i]]
        for j in range(n):
            if li[j] < li_matched and right[i][j] < right[partner_of_col[j]][j]:
                return False
    return True


@dataclass(frozen=True)
class StableSet:
    """All stable matchings of an instance plus the man-optimal one."""

    matchings: tuple[tuple[int, ...], ...]
    man_optimal: tuple[int, ...]

    def __contains__(self, assignment) -> bool:
        return tuple(int(x) for x in assignment) in self.matchings


def enumerate_stable(P: PreferenceStructure) -> StableSet:
    """Exhaustively enumerate the stable matchings of P (n <= 8 only)."""
    n = P.n
    if n > MAX_ORACLE_N:
        raise ValidationError(f"oracle refuses n={n} > {MAX_ORACLE_N} (factorial blowup)")
    stable = [perm for perm in permutations(range(n)) if oracle_is_stable(P, perm)]
    assert stable, "every instance has a stable matching; enumeration found none"

    left = P.left_rank.tolist()
    best_rank = [min(left[i][mu[i]] for mu in stable) for i in range(n)]
    optimal = [mu for mu in stable if all(left[i][mu[i]] == best_rank[i] for i in range(n))]
    assert len(optimal) == 1, "man-optimal stable matching must exist and be unique"
    return StableSet(matchings=tuple(stable), man_optimal=optimal[0])
