"""Initial matchings: random, greedy quick-init, Gale-Shapley.

quick_init and gale_shapley_init are deterministic; random_matching draws
from the caller's stream. All three return valid perfect matchings, but
only Gale-Shapley guarantees a stable one.
"""

from __future__ import annotations

import numpy as np

from .costmodel import CostLedger
from .matching import Matching
from .prefs import PreferenceStructure, ValidationError, lists_from_ranks

INIT_METHODS = ("random", "quick", "gs")


def random_matching(n: int, rng: np.random.Generator) -> Matching:
    """Uniform random permutation matching."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return Matching(row_to_col=rng.permutation(n))


def quick_init(P: PreferenceStructure, ledger: CostLedger | None = None) -> Matching:
    """Greedy one-pass matching: each man, in index order, takes his most
    preferred woman still unmatched. Exactly n proposals, none rejected.
    """
    n = P.n
    men_lists = lists_from_ranks(P).men_lists
    taken = np.zeros(n, dtype=bool)
    row_to_col = np.empty(n, dtype=np.int64)
    proposals = 0
    for man in range(n):
        for woman in men_lists[man]:
            if not taken[woman]:
                taken[woman] = True
                row_to_col[man] = woman
                proposals += 1
                break
    assert proposals == n
    if ledger is not None:
        # One constant-time proposal per man on the modeled hardware.
        ledger.charge_init("constant-op", proposals)
    return Matching(row_to_col=row_to_col)


def gale_shapley_init(P: PreferenceStructure, ledger: CostLedger | None = None) -> Matching:
    """Man-proposing deferred acceptance; returns the man-optimal stable matching.

    Runs in synchronous rounds (every free man proposes to his next choice,
    each woman keeps the best proposer seen so far), which matches the
    modeled parallel cost of one column find-min per round.
    """
    n = P.n
    men_lists = lists_from_ranks(P).men_lists
    next_choice = np.zeros(n, dtype=np.int64)
    woman_partner = np.full(n, -1, dtype=np.int64)
    free = list(range(n))
    rounds = 0
    while free:
        rounds += 1
        proposals: dict[int, list[int]] = {}
        for man in free:
            woman = int(men_lists[man, next_choice[man]])
            next_choice[man] += 1
            proposals.setdefault(woman, []).append(man)
        still_free = []
        for woman, suitors in proposals.items():
            best = min(suitors, key=lambda m: P.right_rank[m, woman])
            incumbent = int(woman_partner[woman])
            if incumbent >= 0 and P.right_rank[incumbent, woman] < P.right_rank[best, woman]:
                best = incumbent
            if incumbent >= 0 and incumbent != best:
                still_free.append(incumbent)
            for m in suitors:
                if m != best:
                    still_free.append(m)
            woman_partner[woman] = best
        free = [m for m in still_free if next_choice[m] < n]
        assert len(free) == len(still_free), "a man ran out of women to propose to"
    if ledger is not None:
        ledger.charge_init("col-find-min", rounds)
    row_to_col = np.empty(n, dtype=np.int64)
    row_to_col[woman_partner] = np.arange(n)
    return Matching(row_to_col=row_to_col)


def initial_matching(
    method: str,
    P: PreferenceStructure,
    rng: np.random.Generator,
    ledger: CostLedger | None = None,
) -> Matching:
    """Dispatch by method name: 'random', 'quick' or 'gs'."""
    if method == "random":
        return random_matching(P.n, rng)
    if method == "quick":
        return quick_init(P, ledger)
    if method == "gs":
        return gale_shapley_init(P, ledger)
    raise ValidationError(f"unknown init method {method!r}, expected one of {INIT_METHODS}")
