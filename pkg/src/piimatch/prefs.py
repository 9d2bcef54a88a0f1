"""Preference structures: rank matrices, ordered lists, random generation.

Conventions used throughout the package:
  * indices (men, women) are 0-based,
  * ranks are 1-based with 1 = most preferred,
  * ``left_rank[i][j]`` is man i's rank of woman j,
  * ``right_rank[i][j]`` is woman j's rank of man i.

Consequently every row of ``left_rank`` and every column of ``right_rank``
is a permutation of 1..n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant."""


def _check_permutation_rows(rows: np.ndarray, what: str) -> None:
    n = rows.shape[1]
    expected = np.arange(n)
    bad = np.nonzero((np.sort(rows, axis=1) != expected).any(axis=1))[0]
    if bad.size:
        raise ValidationError(
            f"{what} {bad[0]} is not a permutation of 0..{n - 1}: {rows[bad[0]].tolist()}"
        )


@dataclass(frozen=True)
class PreferenceLists:
    """Ordered preference lists; position 0 is the top choice."""

    men_lists: np.ndarray
    women_lists: np.ndarray

    def __post_init__(self):
        men = np.asarray(self.men_lists, dtype=np.int64)
        women = np.asarray(self.women_lists, dtype=np.int64)
        if men.ndim != 2 or men.shape[0] != men.shape[1]:
            raise ValidationError(f"men_lists must be n x n, got shape {men.shape}")
        if women.shape != men.shape:
            raise ValidationError(
                f"women_lists shape {women.shape} does not match men_lists {men.shape}"
            )
        _check_permutation_rows(men, "men_lists row")
        _check_permutation_rows(women, "women_lists row")
        men.setflags(write=False)
        women.setflags(write=False)
        object.__setattr__(self, "men_lists", men)
        object.__setattr__(self, "women_lists", women)

    @property
    def n(self) -> int:
        return self.men_lists.shape[0]


@dataclass(frozen=True)
class PreferenceStructure:
    """Rank-matrix view of the preferences (immutable after construction)."""

    left_rank: np.ndarray
    right_rank: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left_rank, dtype=np.int64)
        right = np.asarray(self.right_rank, dtype=np.int64)
        if left.ndim != 2 or left.shape[0] != left.shape[1]:
            raise ValidationError(f"left_rank must be n x n, got shape {left.shape}")
        if right.shape != left.shape:
            raise ValidationError(
                f"right_rank shape {right.shape} does not match left_rank {left.shape}"
            )
        n = left.shape[0]
        expected = np.arange(1, n + 1)
        bad_rows = np.nonzero((np.sort(left, axis=1) != expected).any(axis=1))[0]
        if bad_rows.size:
            raise ValidationError(f"left_rank row {bad_rows[0]} is not a permutation of 1..{n}")
        bad_cols = np.nonzero((np.sort(right, axis=0) != expected[:, None]).any(axis=0))[0]
        if bad_cols.size:
            raise ValidationError(f"right_rank column {bad_cols[0]} is not a permutation of 1..{n}")
        left.setflags(write=False)
        right.setflags(write=False)
        object.__setattr__(self, "left_rank", left)
        object.__setattr__(self, "right_rank", right)

    @property
    def n(self) -> int:
        return self.left_rank.shape[0]


def ranks_from_lists(lists: PreferenceLists) -> PreferenceStructure:
    """Invert ordered lists into rank matrices.

    left_rank[i][j] = 1 + position of j in men_lists[i];
    right_rank[i][j] = 1 + position of i in women_lists[j].
    """
    n = lists.n
    positions = np.arange(1, n + 1, dtype=np.int64)
    rows = np.arange(n)[:, None]
    left = np.empty((n, n), dtype=np.int64)
    left[rows, lists.men_lists] = positions[None, :]
    right_t = np.empty((n, n), dtype=np.int64)
    right_t[rows, lists.women_lists] = positions[None, :]
    return PreferenceStructure(left_rank=left, right_rank=right_t.T)


def lists_from_ranks(structure: PreferenceStructure) -> PreferenceLists:
    """Inverse of :func:`ranks_from_lists`; exact because ranks are distinct."""
    men = np.argsort(structure.left_rank, axis=1)
    women = np.argsort(structure.right_rank.T, axis=1)
    return PreferenceLists(men_lists=men, women_lists=women)


def random_lists(n: int, rng: np.random.Generator) -> PreferenceLists:
    """n independent uniform permutations per side, from the caller's stream."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    base = np.tile(np.arange(n, dtype=np.int64), (n, 1))
    men = rng.permuted(base, axis=1)
    women = rng.permuted(base, axis=1)
    return PreferenceLists(men_lists=men, women_lists=women)


def random_preferences(n: int, rng: np.random.Generator) -> PreferenceStructure:
    """Uniform random preference structure; deterministic for a fixed stream."""
    return ranks_from_lists(random_lists(n, rng))


def write_instance(lists: PreferenceLists) -> str:
    """Serialize to the text interchange format.

    First line n, then n men's ordered lists, then n women's ordered lists,
    space-separated 0-based indices.
    """
    out = [str(lists.n)]
    for row in lists.men_lists:
        out.append(" ".join(str(x) for x in row))
    for row in lists.women_lists:
        out.append(" ".join(str(x) for x in row))
    return "\n".join(out) + "\n"


def read_instance(text: str) -> PreferenceLists:
    """Parse the text interchange format; raises ValidationError with the line."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValidationError("empty instance: expected first line to hold n")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValidationError(f"line 1: expected integer n, got {lines[0]!r}") from None
    if n < 1:
        raise ValidationError(f"line 1: n must be >= 1, got {n}")
    if len(lines) != 1 + 2 * n:
        raise ValidationError(f"expected {1 + 2 * n} lines for n={n}, got {len(lines)}")

    def parse_block(start: int, what: str) -> np.ndarray:
        block = np.empty((n, n), dtype=np.int64)
        for r in range(n):
            lineno = start + r + 1
            parts = lines[start + r].split()
            if len(parts) != n:
                raise ValidationError(f"line {lineno}: expected {n} indices, got {len(parts)}")
            try:
                block[r] = [int(p) for p in parts]
            except ValueError:
                raise ValidationError(f"line {lineno}: non-integer entry in {what}") from None
        return block

    men = parse_block(1, "men's lists")
    women = parse_block(1 + n, "women's lists")
    return PreferenceLists(men_lists=men, women_lists=women)
