"""Time-series ingestion, validation, standardization, and correlation matrices."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import linalg


@dataclass(frozen=True)
class TimeSeriesDataset:
    """A named T x N observation matrix; the mining input.

    Rows are timestamps, columns are variables. ``standardized`` promises
    zero mean and unit sample variance per column (checked on construction).
    """

    names: tuple[str, ...]
    values: NDArray[np.float64]
    standardized: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError(f"values must be a 2-d matrix, got ndim={vals.ndim}")
        T, N = vals.shape
        if T < 3:
            raise ValueError(f"need at least 3 rows, got {T}")
        if N < 2:
            raise ValueError(f"need at least 2 columns, got {N}")
        names = tuple(str(n) for n in self.names)
        if len(names) != N:
            raise ValueError(f"{len(names)} names for {N} columns")
        if len(set(names)) != N:
            raise ValueError("duplicate variable names")
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise ValueError(f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}")
        if self.standardized:
            mu = vals.mean(axis=0)
            var = vals.var(axis=0, ddof=1)
            if np.max(np.abs(mu)) > 1e-9 or np.max(np.abs(var - 1.0)) > 1e-9:
                raise ValueError("standardized flag set but columns are not zero-mean unit-variance")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "names", names)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric unit-diagonal matrix with entries in [-1, 1], PSD within 1e-9.

    The eigenvalue check runs only for dimensions up to 64 (the eigensolver
    cap). Larger instances arise solely as Gram matrices of standardized
    data, which are positive semidefinite by construction.
    """

    entries: NDArray[np.float64]

    def __post_init__(self):
        M = np.asarray(self.entries, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {M.shape}")
        if M.shape[0] < 2:
            raise ValueError("correlation matrix needs dimension >= 2")
        if not np.all(np.isfinite(M)):
            raise ValueError("correlation matrix contains non-finite entries")
        if np.max(np.abs(M - M.T), initial=0.0) > 1e-12:
            raise ValueError("correlation matrix is not symmetric within 1e-12")
        if np.max(np.abs(M)) > 1.0 + 1e-12:
            raise ValueError("correlation entries must lie in [-1, 1]")
        if np.max(np.abs(np.diag(M) - 1.0), initial=0.0) != 0.0:
            raise ValueError("diagonal entries must be exactly 1")
        if M.shape[0] <= linalg.MAX_DIM:
            values, _ = linalg.eigh_many(((M + M.T) / 2.0)[None, :, :], vectors=False)
            if values[0, 0] < -1e-9:
                raise ValueError(f"matrix is not PSD: smallest eigenvalue {values[0, 0]:.3e}")
        M = M.copy()
        M.flags.writeable = False
        object.__setattr__(self, "entries", M)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def load_csv(path) -> TimeSeriesDataset:
    """Read a UTF-8 comma-separated file: header of unique names, numeric rows.

    Errors name the offending location; data rows and columns are reported
    1-based, not counting the header.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        names = [h.strip() for h in header]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"{path}: duplicate column names {dupes}")
        width = len(names)
        rows: list[list[float]] = []
        for r, row in enumerate(reader, start=1):
            if len(row) != width:
                raise ValueError(f"{path}: row {r} has {len(row)} cells, expected {width}")
            parsed = []
            for c, cell in enumerate(row, start=1):
                try:
                    x = float(cell)
                except ValueError:
                    raise ValueError(f"{path}: non-finite value at row {r}, column {c}") from None
                if not np.isfinite(x):
                    raise ValueError(f"{path}: non-finite value at row {r}, column {c}")
                parsed.append(x)
            rows.append(parsed)
    return TimeSeriesDataset(names=tuple(names), values=np.asarray(rows, dtype=np.float64))


def save_csv(d: TimeSeriesDataset, path) -> None:
    """Write a dataset back out in the load_csv format, full float precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(d.names) + "\n")
        for row in d.values:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def standardize(d: TimeSeriesDataset, detrend: bool = False) -> TimeSeriesDataset:
    """Return a copy with zero-mean, unit-sample-variance columns.

    With ``detrend`` a least-squares linear trend is subtracted first. A
    column whose (residual) variance is at or below 1e-12 cannot be scaled
    and raises, naming the column so the caller can drop it and retry.
    """
    X = np.array(d.values, dtype=np.float64)
    T = X.shape[0]
    if detrend:
        t = np.arange(T, dtype=np.float64)
        t = t - t.mean()
        denom = float(np.dot(t, t))
        slope = (t @ X) / denom
        X = X - X.mean(axis=0) - np.outer(t, slope)
    mu = X.mean(axis=0)
    X = X - mu
    var = (X * X).sum(axis=0) / (T - 1)
    bad = np.nonzero(var <= 1e-12)[0]
    if bad.size:
        raise ValueError(f"near-constant column {d.names[bad[0]]!r}: variance {var[bad[0]]:.3e}")
    X = X / np.sqrt(var)
    return TimeSeriesDataset(names=d.names, values=X, standardized=True)


def correlation_matrix(d: TimeSeriesDataset) -> CorrelationMatrix:
    """Pearson correlation matrix of a standardized dataset, 1/(T-1) normalized."""
    if not d.standardized:
        raise ValueError("dataset must be standardized first")
    X = d.values
    C = (X.T @ X) / (d.T - 1)
    C = (C + C.T) / 2.0
    np.clip(C, -1.0, 1.0, out=C)
    np.fill_diagonal(C, 1.0)
    return CorrelationMatrix(entries=C)
