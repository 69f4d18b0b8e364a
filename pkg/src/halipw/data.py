"""Observed-data containers, CSV ingestion, and fold assignment.

The observed unit is (W, A, Y): a covariate row W, a binary treatment
indicator A, and a real outcome Y. Everything downstream (basis
enumeration, path fitting, cross-fitting, estimation) consumes the
immutable :class:`Dataset` built here.

Fold splits are stratified on treatment so that every validation fold
contains units from both arms; the shuffle uses numpy's counter-based
Philox generator, so splits are reproducible across platforms for a
given (treatment vector, V, seed).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = ["Dataset", "FoldAssignment", "load_csv", "save_csv", "make_folds"]

# Philox key word distinguishing fold shuffles from other consumers of a seed.
_FOLD_STREAM = 0xF01D


def _rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream); platform independent."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """Immutable (W, A, Y) sample of n units.

    Attributes:
        w: Covariate matrix, shape (n, d), finite floats.
        a: Treatment indicators in {0, 1}, shape (n,).
        y: Real outcomes, shape (n,), finite.
        names: Optional covariate column labels, length d.
    """

    w: np.ndarray
    a: np.ndarray
    y: np.ndarray
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.w, dtype=np.float64))
        if w.ndim != 2:
            raise ValueError("w must be a 2-D matrix")
        a = np.asarray(self.a)
        y = np.asarray(self.y, dtype=np.float64)
        if a.ndim != 1 or y.ndim != 1:
            raise ValueError("a and y must be 1-D vectors")
        n = w.shape[0]
        if n < 1:
            raise ValueError("dataset must contain at least one row")
        if a.shape[0] != n or y.shape[0] != n:
            raise ValueError(
                f"row mismatch: w has {n} rows, a has {a.shape[0]}, y has {y.shape[0]}"
            )
        if not np.all(np.isin(a, (0, 1))):
            bad = int(np.flatnonzero(~np.isin(a, (0, 1)))[0])
            raise ValueError(f"treatment value outside {{0,1}} at row {bad + 1}")
        if not np.all(np.isfinite(w)):
            i, j = np.argwhere(~np.isfinite(w))[0]
            raise ValueError(f"non-finite covariate at row {int(i) + 1}, column {int(j) + 1}")
        if not np.all(np.isfinite(y)):
            i = int(np.flatnonzero(~np.isfinite(y))[0])
            raise ValueError(f"non-finite outcome at row {i + 1}")
        object.__setattr__(self, "w", _freeze(w))
        object.__setattr__(self, "a", _freeze(a.astype(np.int64)))
        object.__setattr__(self, "y", _freeze(y))
        if self.names is not None:
            names = tuple(str(c) for c in self.names)
            if len(names) != w.shape[1]:
                raise ValueError("names length must match covariate column count")
            object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def d(self) -> int:
        return self.w.shape[1]

    def subset(self, idx: np.ndarray) -> "Dataset":
        """Row-subset view (copying), preserving column labels."""
        idx = np.asarray(idx)
        return Dataset(self.w[idx], self.a[idx], self.y[idx], self.names)


@dataclass(frozen=True)
class FoldAssignment:
    """Deterministic stratified V-fold split.

    ``fold_of[i]`` is the validation fold (1..v) holding row i out.
    Within each treatment stratum the seeded generator shuffles indices
    and deals them round-robin, so stratum fold sizes differ by at most
    one and no fold is empty.
    """

    fold_of: np.ndarray
    v: int
    seed: int = field(default=0)

    def __post_init__(self):
        fold_of = np.asarray(self.fold_of, dtype=np.int64)
        if self.v < 2:
            raise ValueError("fold count v must be at least 2")
        if fold_of.min() < 1 or fold_of.max() > self.v:
            raise ValueError("fold indices must lie in {1..v}")
        counts = np.bincount(fold_of, minlength=self.v + 1)[1:]
        if np.any(counts == 0):
            raise ValueError("every fold must be nonempty")
        object.__setattr__(self, "fold_of", _freeze(fold_of))

    @property
    def n(self) -> int:
        return self.fold_of.shape[0]

    def validation_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def training_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


def make_folds(dataset: Dataset, v: int, seed: int) -> FoldAssignment:
    """Assign each row to one of ``v`` validation folds, stratified on A.

    Args:
        dataset: Sample to split.
        v: Fold count, at least 2.
        seed: Seed for the Philox shuffle; identical (a, v, seed) always
            reproduce the identical assignment.

    Raises:
        ValueError: if ``v < 2`` or either treatment stratum has fewer
            than ``v`` members.
    """
    if v < 2:
        raise ValueError("fold count v must be at least 2")
    a = dataset.a
    fold_of = np.zeros(dataset.n, dtype=np.int64)
    rng = _rng(seed, _FOLD_STREAM)
    for arm in (1, 0):
        stratum = np.flatnonzero(a == arm)
        if stratum.size < v:
            raise ValueError(
                f"treatment stratum a={arm} has {stratum.size} units, fewer than v={v}"
            )
        order = rng.permutation(stratum.size)
        fold_of[stratum[order]] = (np.arange(stratum.size) % v) + 1
    return FoldAssignment(fold_of=fold_of, v=v, seed=seed)


def _parse_cell(text: str, row: int, col: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"non-numeric value {text!r} at row {row}, column {col!r}") from None


def load_csv(path, w_cols: Optional[Sequence[str]], a_col: str, y_col: str) -> Dataset:
    """Read a Dataset from a headered, comma-separated UTF-8 file.

    Args:
        path: File to read.
        w_cols: Covariate column names; ``None`` selects every column
            other than ``a_col`` and ``y_col``, in file order.
        a_col: Treatment column; values must parse to 0 or 1.
        y_col: Outcome column.

    Row numbers in error messages count the header as row 1, matching
    what a spreadsheet shows.
    """
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty, header row required") from None
        header = [h.strip() for h in header]
        col_idx = {name: i for i, name in enumerate(header)}
        if len(col_idx) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise ValueError(f"{path}: duplicated column name(s) {dupes}")
        if w_cols is None:
            w_cols = [c for c in header if c not in (a_col, y_col)]
        for col in [*w_cols, a_col, y_col]:
            if col not in col_idx:
                raise ValueError(f"{path}: missing column {col!r}")
        if not w_cols:
            raise ValueError(f"{path}: no covariate columns")
        w_idx = [col_idx[c] for c in w_cols]
        a_idx = col_idx[a_col]
        y_idx = col_idx[y_col]

        w_rows: list[list[float]] = []
        a_vals: list[int] = []
        y_vals: list[float] = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise ValueError(
                    f"{path}: row {lineno} has {len(record)} fields, expected {len(header)}"
                )
            a_raw = _parse_cell(record[a_idx].strip(), lineno, a_col)
            if a_raw not in (0.0, 1.0):
                raise ValueError(
                    f"{path}: treatment value {record[a_idx].strip()!r} outside {{0,1}} "
                    f"at row {lineno}, column {a_col!r}"
                )
            w_rows.append([_parse_cell(record[i].strip(), lineno, header[i]) for i in w_idx])
            a_vals.append(int(a_raw))
            y_vals.append(_parse_cell(record[y_idx].strip(), lineno, y_col))
    if not w_rows:
        raise ValueError(f"{path}: no data rows after the header")
    w = np.asarray(w_rows, dtype=np.float64)
    if not np.all(np.isfinite(w)):
        i, j = np.argwhere(~np.isfinite(w))[0]
        raise ValueError(
            f"{path}: non-finite covariate at row {int(i) + 2}, column {w_cols[int(j)]!r}"
        )
    y = np.asarray(y_vals, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        i = int(np.flatnonzero(~np.isfinite(y))[0])
        raise ValueError(f"{path}: non-finite outcome at row {i + 2}, column {y_col!r}")
    return Dataset(w=w, a=np.asarray(a_vals), y=y, names=tuple(w_cols))


def save_csv(dataset: Dataset, path) -> None:
    """Write a Dataset back to CSV with round-trip float formatting.

    Floats are written with ``repr``, the shortest decimal string that
    re-parses to the identical IEEE-754 double, so load(save(x)) == x
    bit-exactly.
    """
    names = dataset.names or tuple(f"w{j + 1}" for j in range(dataset.d))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([*names, "a", "y"])
        for i in range(dataset.n):
            writer.writerow(
                [*(repr(x) for x in dataset.w[i]), int(dataset.a[i]), repr(float(dataset.y[i]))]
            )
