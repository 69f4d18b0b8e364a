"""Zeroth-order indicator basis enumeration and sparse design evaluation.

A basis function is a pair (section, knot): a nonempty set of covariate
coordinates and a knot vector taken from an observed training row. It
evaluates to 1 on a row exactly when the knot is coordinatewise <= the
row on the section, so each column of the design matrix is the
indicator of an upper-right orthant anchored at a data point.

Enumeration generates one candidate per (section, training row) for all
sections up to ``max_degree``, then prunes columns that duplicate an
earlier one and columns that are constant on the training data. Knot
comparisons are exact float comparisons; ties between rows are resolved
by the dedup step.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "BasisFunction",
    "BasisSet",
    "DesignMatrix",
    "enumerate_basis",
    "evaluate_basis",
    "candidate_count",
]


@dataclass(frozen=True)
class BasisFunction:
    """Indicator basis phi(c) = 1(knot <= c on section).

    ``section`` holds strictly increasing 1-based coordinate indices;
    ``knot`` holds the matching covariate values of the training row
    that generated the basis.
    """

    section: tuple[int, ...]
    knot: tuple[float, ...]

    def __post_init__(self):
        if not self.section:
            raise ValueError("section must be nonempty")
        if any(b <= a for a, b in zip(self.section, self.section[1:])):
            raise ValueError("section indices must be strictly increasing")
        if self.section[0] < 1:
            raise ValueError("section indices are 1-based")
        if len(self.knot) != len(self.section):
            raise ValueError("knot length must match section length")

    @property
    def degree(self) -> int:
        return len(self.section)


@dataclass(frozen=True)
class BasisSet:
    """Ordered, deduplicated collection of indicator bases.

    Ordering is canonical: increasing section size, then lexicographic
    section, then the training-row order in which knots first appeared.
    """

    bases: tuple[BasisFunction, ...]
    max_degree: int
    source_n: int

    def __len__(self) -> int:
        return len(self.bases)

    def to_json_obj(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "source_n": self.source_n,
            "count": len(self.bases),
            "bases": [
                {"section": list(b.section), "knot": list(b.knot)} for b in self.bases
            ],
        }


@dataclass(frozen=True)
class DesignMatrix:
    """Sparse binary evaluation of a BasisSet on a covariate matrix."""

    columns: sp.csc_matrix
    basis_set: BasisSet

    def __post_init__(self):
        if self.columns.shape[1] != len(self.basis_set):
            raise ValueError("column count must equal basis count")

    @property
    def shape(self) -> tuple[int, int]:
        return self.columns.shape

    def column_of(self, j: int) -> BasisFunction:
        return self.basis_set.bases[j]


def candidate_count(n: int, d: int, max_degree: int) -> int:
    """Pre-dedup candidate column count: n * sum_k C(d, k), k=1..max_degree."""
    return n * sum(comb(d, k) for k in range(1, max_degree + 1))


def _sections(d: int, max_degree: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in range(1, max_degree + 1):
        out.extend(combinations(range(1, d + 1), size))
    return out


def _indicator_block(w: np.ndarray, section: tuple[int, ...], knots: np.ndarray) -> np.ndarray:
    """Dense bool block B[i, j] = 1(knots[j] <= w[i] on section)."""
    cols = [s - 1 for s in section]
    block = w[:, cols[0]][:, None] >= knots[:, 0][None, :]
    for k in range(1, len(cols)):
        block &= w[:, cols[k]][:, None] >= knots[:, k][None, :]
    return block


def enumerate_basis(w_train: np.ndarray, max_degree: int) -> tuple[BasisSet, DesignMatrix]:
    """Enumerate every (section, training-row) indicator basis and dedup.

    Args:
        w_train: Training covariate matrix, shape (n, d), n >= 2.
        max_degree: Largest section size to include, in {1..d}.

    Returns:
        The pruned BasisSet and its evaluation on the training rows.
        Duplicate columns keep the lexicographically smallest
        (section, knot) representative; all-zero and all-one columns
        are dropped (the latter alias the intercept).
    """
    w_train = np.ascontiguousarray(np.asarray(w_train, dtype=np.float64))
    if w_train.ndim != 2:
        raise ValueError("w_train must be 2-D")
    n, d = w_train.shape
    if n < 2:
        raise ValueError("basis enumeration needs at least 2 training rows")
    if not 1 <= max_degree <= d:
        raise ValueError(f"max_degree must be in 1..{d}, got {max_degree}")

    # groups: column fingerprint -> [best (section, knot), row order per section]
    best_key: dict[bytes, tuple[tuple[int, ...], tuple[float, ...]]] = {}
    first_row: dict[tuple[bytes, tuple[int, ...]], int] = {}
    for section in _sections(d, max_degree):
        knots = w_train[:, [s - 1 for s in section]]
        block = _indicator_block(w_train, section, knots)
        colsums = block.sum(axis=0)
        packed = np.packbits(block, axis=0)
        for i in range(n):
            if colsums[i] == 0 or colsums[i] == n:
                continue
            fp = packed[:, i].tobytes()
            key = (section, tuple(knots[i]))
            if fp not in best_key or key < best_key[fp]:
                best_key[fp] = key
            sec_key = (fp, section)
            if sec_key not in first_row:
                first_row[sec_key] = i

    reps = [
        (len(sec), sec, first_row[(fp, sec)], knot)
        for fp, (sec, knot) in best_key.items()
    ]
    reps.sort(key=lambda r: (r[0], r[1], r[2]))
    bases = tuple(BasisFunction(section=sec, knot=knot) for _, sec, _, knot in reps)
    basis_set = BasisSet(bases=bases, max_degree=max_degree, source_n=n)
    return basis_set, evaluate_basis(basis_set, w_train)


def evaluate_basis(basis_set: BasisSet, w_new: np.ndarray) -> DesignMatrix:
    """Evaluate training-knot bases on new rows; no re-deduplication.

    Raises:
        ValueError: if ``w_new`` has a different column count than the
            training covariates.
    """
    w_new = np.ascontiguousarray(np.asarray(w_new, dtype=np.float64))
    if w_new.ndim != 2:
        raise ValueError("w_new must be 2-D")
    d_needed = max((b.section[-1] for b in basis_set.bases), default=1)
    if w_new.shape[1] < d_needed:
        raise ValueError(
            f"w_new has {w_new.shape[1]} columns, bases reference coordinate {d_needed}"
        )
    n = w_new.shape[0]
    blocks: list[sp.csc_matrix] = []
    # Bases sharing a section are contiguous in canonical order.
    start = 0
    bases = basis_set.bases
    while start < len(bases):
        section = bases[start].section
        stop = start
        while stop < len(bases) and bases[stop].section == section:
            stop += 1
        knots = np.asarray([bases[j].knot for j in range(start, stop)], dtype=np.float64)
        block = _indicator_block(w_new, section, knots)
        blocks.append(sp.csc_matrix(block, dtype=np.float64))
        start = stop
    if blocks:
        columns = sp.hstack(blocks, format="csc", dtype=np.float64)
    else:
        columns = sp.csc_matrix((n, 0), dtype=np.float64)
    columns.sort_indices()
    return DesignMatrix(columns=columns, basis_set=basis_set)
