"""Iterative-improvement matching engine with pluggable pair selection.

Each iteration over the current matching:

  1. find all blocking pairs;
  2. per row, among the policy-eligible blocking pairs, keep the one with
     the lowest left value (the "generating" pair for that row);
  3. per column, among the generating pairs, keep the one with the lowest
     right value (the NM1 pairs actually satisfied this iteration);
  4. remove matched pairs sharing a row or column with an NM1 pair, insert
     the NM1 pairs, and fill the remaining open rows/columns arbitrarily
     (the NM2 fill pairs).

Policies restrict step 2's eligibility:

  * standard: every blocking pair is eligible.
  * rm (right-minimum): additionally the blocking pair's right value must
    beat the right value of the row's matched pair, so the woman's side
    improves on every swap; this makes runs cycle-free but they may stall.
  * dynamic: blocking pairs compete as usual except the cell holding the
    row's historical-minimum left value among previously chosen NM1 pairs
    sits out of the comparison until a per-row wait time expires; a
    selection below that minimum moves the pointer onto itself.
  * rmd: dynamic eligibility throughout, intersected with rm eligibility
    once the configured start iteration is reached; if the intersection
    empties every row while unstable, that iteration falls back to
    dynamic-only eligibility.

Within a row all left values are distinct and within a column all right
values are distinct (permutation invariants), so the minima in steps 2-3
are unique and no tie-breaking is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .costmodel import CostLedger
from .matching import Matching, Pair, blocking_matrix, count_unstable_pairs
from .prefs import PreferenceStructure, ValidationError
from .rng import make_rng

POLICY_KINDS = ("standard", "rm", "dynamic", "rmd")
FILL_RULES = ("random", "greedy")

DEFAULT_CAP_MULTIPLIER = 5.0


@dataclass(frozen=True)
class SelectionPolicy:
    """Selection policy tag plus the rmd schedule parameters.

    rm_start and initial_wait default to n (resolved at run time) per the
    composed-policy tuning; they are only meaningful for kind "rmd" and
    "dynamic" respectively.
    """

    kind: str
    rm_start: int | None = None
    initial_wait: int | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"unknown policy {self.kind!r}, expected one of {POLICY_KINDS}")
        if self.rm_start is not None and self.rm_start < 0:
            raise ValidationError("rm_start must be >= 0")
        if self.initial_wait is not None and self.initial_wait < 1:
            raise ValidationError("initial_wait must be >= 1")

    @property
    def dynamic_active(self) -> bool:
        return self.kind in ("dynamic", "rmd")

    def rm_active(self, k: int, n: int) -> bool:
        if self.kind == "rm":
            return True
        if self.kind == "rmd":
            start = self.rm_start if self.rm_start is not None else n
            return k >= start
        return False

    @staticmethod
    def standard() -> "SelectionPolicy":
        return SelectionPolicy("standard")

    @staticmethod
    def right_minimum() -> "SelectionPolicy":
        return SelectionPolicy("rm")

    @staticmethod
    def dynamic(initial_wait: int | None = None) -> "SelectionPolicy":
        return SelectionPolicy("dynamic", initial_wait=initial_wait)

    @staticmethod
    def rmd(rm_start: int | None = None, initial_wait: int | None = None) -> "SelectionPolicy":
        return SelectionPolicy("rmd", rm_start=rm_start, initial_wait=initial_wait)


def parse_policy(name: str) -> SelectionPolicy:
    return SelectionPolicy(name.strip().lower())


class DynamicRowState(NamedTuple):
    """Per-row view of the dynamic-selection bookkeeping."""

    min_left: int | None
    min_col: int | None
    last_compared: int | None
    wait: int


class DynamicState:
    """History of chosen NM1 pairs per row, with minimum pointers and waits.

    selected[i][j] is True once (i, j) has been chosen as an NM1 pair;
    such cells are excluded from later comparisons, which is what prevents
    cycling (a cycle must re-select a previously selected pair). The one
    exception is the row's left-minimum cell min_col[i] (the cell holding
    min_left[i], the lowest left value ever chosen in the row): it may
    re-enter the comparison when more than wait[i] iterations have passed
    since it was last compared.
    """

    def __init__(self, P: PreferenceStructure, initial_wait: int):
        n = P.n
        self.left_rank = P.left_rank
        self.n = n
        self.initial_wait = initial_wait
        self.selected = np.zeros((n, n), dtype=bool)
        self.min_left = np.full(n, n + 1, dtype=np.int64)
        self.min_col = np.full(n, -1, dtype=np.int64)
        self.last_compared = np.zeros(n, dtype=np.int64)
        self.wait = np.full(n, initial_wait, dtype=np.int64)

    def has_min(self) -> np.ndarray:
        return self.min_col >= 0

    def wait_fired(self, k: int) -> np.ndarray:
        """Rows whose left-minimum cell re-enters comparison at iteration k."""
        return (self.min_col >= 0) & (k - self.last_compared > self.wait)

    def note_wait_entries(self, rows: np.ndarray, k: int) -> None:
        """Log a comparison entry for every wait-triggered row, win or lose."""
        self.last_compared[rows] = k

    def row(self, i: int) -> DynamicRowState:
        if self.min_col[i] < 0:
            return DynamicRowState(None, None, None, int(self.wait[i]))
        return DynamicRowState(
            int(self.min_left[i]), int(self.min_col[i]), int(self.last_compared[i]), int(self.wait[i])
        )


def update_dynamic_state(state: DynamicState, nm1: Iterable[Pair], k: int) -> DynamicState:
    """Fold this iteration's NM1 pairs into the selection history.

    Every chosen pair joins its row's selected set. A row's first NM1 pair
    creates its minimum pointer with the configured initial wait; a pair
    below the row's minimum moves the pointer onto a new cell and resets
    the wait to 2; re-selecting the current minimum cell (possible only
    through the wait path) increments its wait; a selection at or above
    the minimum leaves the pointer unchanged.
    """
    for i, j in nm1:
        state.selected[i, j] = True
        left = int(state.left_rank[i, j])
        if state.min_col[i] < 0:
            state.min_left[i] = left
            state.min_col[i] = j
            state.wait[i] = state.initial_wait
            state.last_compared[i] = k
        elif left < state.min_left[i]:
            state.min_left[i] = left
            state.min_col[i] = j
            state.wait[i] = 2
            state.last_compared[i] = k
        elif j == state.min_col[i]:
            state.wait[i] += 1
            state.last_compared[i] = k
    return state


class OutcomeKind(Enum):
    STABLE = "stable"
    CAP_REACHED = "cap_reached"
    STALLED = "stalled"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    matching: tuple[int, ...]
    nm1: tuple[Pair, ...]
    events: dict
    cost: int


@dataclass
class RunResult:
    outcome: OutcomeKind
    iterations: int
    matching: Matching
    unstable_pairs: int
    initial: Matching
    trace: list[IterationRecord] | None
    ledger: CostLedger

    @property
    def converged(self) -> bool:
        return self.outcome is OutcomeKind.STABLE

    def matchings(self) -> list[tuple[int, ...]]:
        """Matching sequence mu_0, mu_1, ... (requires a recorded trace)."""
        if self.trace is None:
            raise ValueError("run was executed without trace recording")
        seq = [tuple(int(x) for x in self.initial.row_to_col)]
        seq.extend(rec.matching for rec in self.trace)
        return seq


def detect_cycle(trace) -> tuple[int, int] | None:
    """Earliest repeated matching in a trace: (start, period), or None.

    Accepts a RunResult, a list of IterationRecords, or a raw sequence of
    matchings. Only the matchings are compared; policy state is ignored.
    """
    if isinstance(trace, RunResult):
        seq: Sequence = trace.matchings()
    elif trace and isinstance(trace[0], IterationRecord):
        seq = [rec.matching for rec in trace]
    else:
        seq = trace
    first_seen: dict[tuple[int, ...], int] = {}
    for t, m in enumerate(seq):
        key = tuple(int(x) for x in (m.row_to_col if isinstance(m, Matching) else m))
        if key in first_seen:
            start = first_seen[key]
            return (start, t - start)
        first_seen[key] = t
    return None


# ---------------------------------------------------------------------------
# selection / application cores (shared by the public ops and the run loop)


def _eligibility(
    P: PreferenceStructure,
    mu_arr: np.ndarray,
    blocking: np.ndarray,
    policy: SelectionPolicy,
    state: DynamicState | None,
    k: int,
) -> tuple[np.ndarray, dict]:
    """Policy-eligible blocking pairs as a boolean matrix, plus events."""
    events: dict = {}
    fired_rows = np.zeros(0, dtype=np.int64)
    if policy.dynamic_active:
        if state is None:
            raise ValidationError(f"policy {policy.kind!r} requires a DynamicState")
        if _TABU_MODE == "all":
            elig = blocking & ~state.selected
        elif _TABU_MODE == "min":
            elig = blocking.copy()
            has = state.has_min()
            rows = np.nonzero(has)[0]
            elig[rows, state.min_col[rows]] = False
        else:  # "strict": only left values below the row's historical minimum
            elig = blocking & (P.left_rank < state.min_left[:, None])
        fired = state.wait_fired(k)
        fired_rows = np.nonzero(fired)[0]
        if fired_rows.size:
            if _TABU_MODE == "strict":
                # A fired row re-admits its best current blocking pair.
                masked = np.where(blocking[fired_rows], P.left_rank[fired_rows], P.n + 1)
                best = np.argmin(masked, axis=1)
                ok = masked[np.arange(fired_rows.size), best] <= P.n
                elig[fired_rows[ok], best[ok]] = True
            else:
                cols = state.min_col[fired_rows]
                elig[fired_rows, cols] = blocking[fired_rows, cols]
            events["wait_fired"] = tuple(int(i) for i in fired_rows)
    else:
        elig = blocking.copy()

    if policy.rm_active(k, P.n):
        rows = np.arange(P.n)
        row_matched_right = P.right_rank[rows, mu_arr]
        rm_elig = elig & (P.right_rank < row_matched_right[:, None])
        if policy.kind == "rmd":
            if _RM_MODE == "global":
                if not rm_elig.any() and elig.any():
                    events["rm_fallback"] = True
                else:
                    elig = rm_elig
            elif _RM_MODE == "perrow":
                has_rm = rm_elig.any(axis=1)
                if not has_rm.all():
                    events["rm_fallback"] = True
                elig = np.where(has_rm[:, None], rm_elig, elig)
            elif _RM_MODE == "rmwait":
                # rm filter always on, but wait-expired minimum cells may act
                if fired_rows.size:
                    cols = state.min_col[fired_rows]
                    rm_elig[fired_rows, cols] = blocking[fired_rows, cols]
                elig = rm_elig
            elif _RM_MODE == "globalfired":
                if not rm_elig.any() and fired_rows.size:
                    cols = state.min_col[fired_rows]
                    rm_elig[fired_rows, cols] = blocking[fired_rows, cols]
                    events["rm_fallback"] = True
                elig = rm_elig
            else:  # strict
                elig = rm_elig
        else:
            elig = rm_elig
    return elig, events


_RM_MODE = "global"       # experiment knob: global | perrow | strict | rmwait | globalfired
_TABU_MODE = "min"        # experiment knob: min | all


def _generating_cols(P: PreferenceStructure, elig: np.ndarray) -> np.ndarray:
    """Per-row column of the minimum-left eligible pair; -1 where none."""
    n = P.n
    masked = np.where(elig, P.left_rank, n + 1)
    gen_col = np.argmin(masked, axis=1)
    rows = np.arange(n)
    gen_col[masked[rows, gen_col] > n] = -1
    return gen_col


def _nm1_rows(P: PreferenceStructure, gen_col: np.ndarray) -> np.ndarray:
    """Rows whose generating pair wins its column's right-minimum."""
    n = P.n
    rows = np.nonzero(gen_col >= 0)[0]
    if rows.size == 0:
        return rows
    cols = gen_col[rows]
    rvals = P.right_rank[rows, cols]
    col_min = np.full(n, n + 1, dtype=np.int64)
    np.minimum.at(col_min, cols, rvals)
    winners = rows[rvals == col_min[cols]]
    assert np.unique(cols[rvals == col_min[cols]]).size == winners.size, (
        "column right-minima must be unique"
    )
    return winners


def _apply_core(
    n: int,
    mu_arr: np.ndarray,
    nm1_rows: np.ndarray,
    nm1_cols: np.ndarray,
    rng: np.random.Generator,
    fill: str,
    left_rank: np.ndarray,
) -> np.ndarray:
    """New matching: keep untouched pairs, insert NM1, fill the rest."""
    new = np.full(n, -1, dtype=np.int64)
    in_nm1_row = np.zeros(n, dtype=bool)
    in_nm1_row[nm1_rows] = True
    in_nm1_col = np.zeros(n, dtype=bool)
    in_nm1_col[nm1_cols] = True
    keep = ~in_nm1_row & ~in_nm1_col[mu_arr]
    new[keep] = mu_arr[keep]
    new[nm1_rows] = nm1_cols

    open_rows = np.nonzero(new < 0)[0]
    if open_rows.size:
        used = np.zeros(n, dtype=bool)
        used[new[new >= 0]] = True
        open_cols = np.nonzero(~used)[0]
        if fill == "random":
            new[open_rows] = rng.permutation(open_cols)
        else:  # greedy: each open row takes its best remaining open column
            remaining = list(open_cols)
            for i in open_rows:
                pick = min(remaining, key=lambda j: left_rank[i, j])
                remaining.remove(pick)
                new[i] = pick
    return new


# ---------------------------------------------------------------------------
# public per-step operations


def select_nm1_generating(
    P: PreferenceStructure,
    mu: Matching,
    policy: SelectionPolicy,
    state: DynamicState | None = None,
    k: int = 0,
) -> dict[int, Pair]:
    """Per-row generating pair (minimum-left eligible blocking pair)."""
    blocking = blocking_matrix(P, mu.row_to_col)
    elig, _ = _eligibility(P, mu.row_to_col, blocking, policy, state, k)
    gen_col = _generating_cols(P, elig)
    return {int(i): Pair(int(i), int(j)) for i, j in enumerate(gen_col) if j >= 0}


def _coerce_pairs(generating) -> list[Pair]:
    pairs = list(generating.values()) if isinstance(generating, Mapping) else list(generating)
    rows = [p[0] for p in pairs]
    if len(set(rows)) != len(rows):
        raise ValidationError("generating pairs must have at most one pair per row")
    return [Pair(int(p[0]), int(p[1])) for p in pairs]


def select_nm1(P: PreferenceStructure, generating) -> set[Pair]:
    """Column-wise right-minimum over the generating pairs."""
    pairs = _coerce_pairs(generating)
    if not pairs:
        return set()
    n = P.n
    gen_col = np.full(n, -1, dtype=np.int64)
    for i, j in pairs:
        gen_col[i] = j
    winners = _nm1_rows(P, gen_col)
    return {Pair(int(i), int(gen_col[i])) for i in winners}


def apply_iteration(
    P: PreferenceStructure,
    mu: Matching,
    nm1: Iterable[Pair],
    rng: np.random.Generator,
    fill: str = "random",
) -> Matching:
    """Insert the NM1 pairs, evict row/column conflicts, fill open slots."""
    if fill not in FILL_RULES:
        raise ValidationError(f"unknown fill rule {fill!r}, expected one of {FILL_RULES}")
    pairs = [Pair(int(p[0]), int(p[1])) for p in nm1]
    rows = np.asarray([p.row for p in pairs], dtype=np.int64)
    cols = np.asarray([p.col for p in pairs], dtype=np.int64)
    if np.unique(rows).size != rows.size or np.unique(cols).size != cols.size:
        raise AssertionError("NM1 pairs must be row- and column-disjoint")
    blocking = blocking_matrix(P, mu.row_to_col)
    for i, j in pairs:
        if not blocking[i, j]:
            raise AssertionError(f"NM1 pair ({i},{j}) is not a blocking pair of the matching")
    new = _apply_core(P.n, mu.row_to_col, rows, cols, rng, fill, P.left_rank)
    return Matching(row_to_col=new)


# ---------------------------------------------------------------------------
# the run loop


def default_cap(n: int, multiplier: float = DEFAULT_CAP_MULTIPLIER) -> int:
    return max(1, math.ceil(multiplier * n))


def run(
    P: PreferenceStructure,
    mu0: Matching,
    policy: SelectionPolicy,
    cap: int | None = None,
    rng: np.random.Generator | None = None,
    *,
    ledger: CostLedger | None = None,
    record_trace: bool = True,
    fill: str = "random",
) -> RunResult:
    """Iterate until stable, the cap, or a stall; deterministic per seed.

    The iteration count of a STABLE outcome is the number of applied
    iterations (0 if mu0 is already stable). Iterations that select no
    NM1 pair still advance the counter: under dynamic selection the wait
    clocks must keep running, and a stall is declared only when no future
    wait re-entry can produce a candidate.
    """
    n = P.n
    if mu0.n != n:
        raise ValidationError(f"matching size {mu0.n} does not match instance n={n}")
    if cap is None:
        cap = default_cap(n)
    if cap < 1:
        raise ValidationError(f"cap must be >= 1, got {cap}")
    if fill not in FILL_RULES:
        raise ValidationError(f"unknown fill rule {fill!r}, expected one of {FILL_RULES}")
    if rng is None:
        rng = make_rng(0)
    if ledger is None:
        ledger = CostLedger(n=n)

    state: DynamicState | None = None
    if policy.dynamic_active:
        initial_wait = policy.initial_wait if policy.initial_wait is not None else n
        state = DynamicState(P, initial_wait)

    mu = mu0.row_to_col.copy()
    trace: list[IterationRecord] | None = [] if record_trace else None
    rows_idx = np.arange(n)
    k = 0

    while True:
        blocking = blocking_matrix(P, mu)
        if not blocking.any():
            return RunResult(
                outcome=OutcomeKind.STABLE,
                iterations=k,
                matching=Matching(row_to_col=mu.copy()),
                unstable_pairs=0,
                initial=mu0,
                trace=trace,
                ledger=ledger,
            )
        if k >= cap:
            final = Matching(row_to_col=mu.copy())
            return RunResult(
                outcome=OutcomeKind.CAP_REACHED,
                iterations=k,
                matching=final,
                unstable_pairs=count_unstable_pairs(P, final),
                initial=mu0,
                trace=trace,
                ledger=ledger,
            )

        elig, events = _eligibility(P, mu, blocking, policy, state, k)
        cost = 0

        def charge(kind: str, times: int = 1) -> None:
            nonlocal cost
            ledger.charge(k, kind, times)
            cost += times * ledger.step_cost(kind)

        charge("constant-op")      # local blocking test at each processor
        charge("row-find-min")     # generating-pair selection
        if policy.dynamic_active:
            charge("constant-op")  # left-value comparison against the minimum cell

        gen_col = _generating_cols(P, elig)
        winners = _nm1_rows(P, gen_col)

        if winners.size == 0:
            if policy.kind == "standard":
                raise AssertionError("standard selection cannot be empty while unstable")
            # A future wait re-entry can only help if some row's minimum
            # cell currently blocks; otherwise nothing will ever change.
            alive = False
            if policy.dynamic_active:
                if _TABU_MODE == "strict":
                    alive = True  # every blocking row eventually fires its best pair
                else:
                    has = state.has_min()
                    safe_cols = np.where(has, state.min_col, 0)
                    alive = bool((blocking[rows_idx, safe_cols] & has).any())
            if not alive:
                final = Matching(row_to_col=mu.copy())
                return RunResult(
                    outcome=OutcomeKind.STALLED,
                    iterations=k,
                    matching=final,
                    unstable_pairs=count_unstable_pairs(P, final),
                    initial=mu0,
                    trace=trace,
                    ledger=ledger,
                )
            # Idle iteration: only the wait clocks advance.
            if "wait_fired" in events:
                state.note_wait_entries(np.asarray(events["wait_fired"], dtype=np.int64), k)
            events["idle"] = True
            if trace is not None:
                trace.append(
                    IterationRecord(k, tuple(int(x) for x in mu), (), events, cost)
                )
            k += 1
            continue

        charge("col-find-min")                     # NM1 selection
        charge("row-broadcast")                    # removal / insertion, row side
        charge("col-broadcast")                    # removal / insertion, column side

        nm1_cols = gen_col[winners]
        new = _apply_core(n, mu, winners, nm1_cols, rng, fill, P.left_rank)
        charge("col-broadcast")                    # fill coordination
        if policy.dynamic_active:
            charge("row-broadcast")                # minimum-pointer broadcast
            if "wait_fired" in events:
                state.note_wait_entries(np.asarray(events["wait_fired"], dtype=np.int64), k)
            nm1_pairs = tuple(Pair(int(i), int(j)) for i, j in zip(winners, nm1_cols))
            update_dynamic_state(state, nm1_pairs, k)
        else:
            nm1_pairs = tuple(Pair(int(i), int(j)) for i, j in zip(winners, nm1_cols))

        mu = new
        if trace is not None:
            trace.append(IterationRecord(k, tuple(int(x) for x in mu), nm1_pairs, events, cost))
        k += 1
