"""Matchings, blocking-pair detection, stability checks.

A pair (i, j) blocks a matching when both sides strictly prefer it to
their matched pairs: left_rank[i][j] < left_rank[i][mu(i)] and
right_rank[i][j] < right_rank[m][j] where m is the man matched to woman j.
All operations here are pure functions over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .prefs import PreferenceStructure, ValidationError


class Pair(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class Matching:
    """Perfect one-to-one row -> column assignment."""

    row_to_col: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.row_to_col, dtype=np.int64)
        if arr.ndim != 1:
            raise ValidationError(f"matching must be one-dimensional, got shape {arr.shape}")
        n = arr.shape[0]
        if not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValidationError(f"matching is not a permutation of 0..{n - 1}: {arr.tolist()}")
        arr.setflags(write=False)
        object.__setattr__(self, "row_to_col", arr)

    @property
    def n(self) -> int:
        return self.row_to_col.shape[0]

    def col_to_row(self) -> np.ndarray:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.row_to_col] = np.arange(self.n)
        return inv

    def pairs(self) -> list[Pair]:
        return [Pair(i, int(j)) for i, j in enumerate(self.row_to_col)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Matching) and np.array_equal(self.row_to_col, other.row_to_col)

    def __hash__(self) -> int:
        return hash(tuple(int(x) for x in self.row_to_col))


def blocking_matrix(P: PreferenceStructure, row_to_col: np.ndarray) -> np.ndarray:
    """Boolean n x n matrix of blocking pairs for the given assignment.

    Matched cells come out False automatically (strict inequalities).
    """
    n = P.n
    rows = np.arange(n)
    col_to_row = np.empty(n, dtype=np.int64)
    col_to_row[row_to_col] = rows
    matched_left = P.left_rank[rows, row_to_col]          # L of row i's matched pair
    matched_right = P.right_rank[col_to_row, rows]        # R of column j's matched pair
    return (P.left_rank < matched_left[:, None]) & (P.right_rank < matched_right[None, :])


def is_blocking(P: PreferenceStructure, mu: Matching, pair: Pair) -> bool:
    """True iff `pair` blocks `mu`; always False for a matched pair."""
    i, j = pair
    if not (0 <= i < P.n and 0 <= j < P.n):
        raise ValidationError(f"pair {pair} out of range for n={P.n}")
    if mu.row_to_col[i] == j:
        return False
    m = int(mu.col_to_row()[j])
    return bool(
        P.left_rank[i, j] < P.left_rank[i, mu.row_to_col[i]]
        and P.right_rank[i, j] < P.right_rank[m, j]
    )


def find_blocking_pairs(P: PreferenceStructure, mu: Matching) -> list[Pair]:
    """All blocking pairs in row-major order."""
    block = blocking_matrix(P, mu.row_to_col)
    return [Pair(int(i), int(j)) for i, j in zip(*np.nonzero(block))]


def is_stable(P: PreferenceStructure, mu: Matching) -> bool:
    return not blocking_matrix(P, mu.row_to_col).any()


def count_unstable_pairs(P: PreferenceStructure, mu: Matching) -> int:
    """Matched pairs sharing a row or column with at least one blocking pair.

    0 iff stable; at most n. The metric counts matched pairs (i, mu(i))
    whose row i or column mu(i) contains a blocking pair.
    """
    block = blocking_matrix(P, mu.row_to_col)
    row_hit = block.any(axis=1)
    col_hit = block.any(axis=0)
    return int(np.count_nonzero(row_hit | col_hit[mu.row_to_col]))


def write_matching(mu: Matching) -> str:
    """One line of n space-separated column indices."""
    return " ".join(str(int(j)) for j in mu.row_to_col) + "\n"


def read_matching(text: str, n: int | None = None) -> Matching:
    """Parse the one-line matching format; validates the permutation."""
    parts = text.split()
    if not parts:
        raise ValidationError("empty matching text")
    try:
        cols = [int(p) for p in parts]
    except ValueError:
        raise ValidationError("matching contains a non-integer entry") from None
    if n is not None and len(cols) != n:
        raise ValidationError(f"matching has {len(cols)} entries, expected {n}")
    return Matching(row_to_col=np.asarray(cols, dtype=np.int64))
