"""Core quantities: least-variant combination, linear dependence and gain,
self-canceling forms, negative-clique predicates.

All operations take either a CorrelationMatrix or a plain symmetric ndarray
and a subset of variable indices. Subsets are handled in sorted order;
weight vectors line up with the sorted members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from . import linalg

FLIP_EPS = 1e-10
# Two smallest eigenvalues closer than this: min-eigenvector is not unique.
DEGENERATE_GAP = 1e-8


@dataclass(frozen=True, order=True)
class SignedSet:
    """Variable indices with a ±1 sign each; lowest member always signed +1.

    The canonical orientation makes a sign pattern and its global negation
    compare equal, which is what makes deduplication of mirror solutions a
    plain equality test.
    """

    members: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(m) for m in self.members)
        signs = tuple(int(s) for s in self.signs)
        if len(members) < 2:
            raise ValueError("signed set needs at least 2 members")
        if len(signs) != len(members):
            raise ValueError(f"{len(signs)} signs for {len(members)} members")
        if any(b <= a for a, b in zip(members, members[1:])):
            raise ValueError("members must be strictly increasing")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        if signs[0] != 1:
            raise ValueError("canonical orientation requires sign +1 on the lowest member")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def canonical(cls, members: Sequence[int], signs: Sequence[int]) -> "SignedSet":
        """Sort by member index and negate globally if needed."""
        pairs = sorted(zip((int(m) for m in members), (int(s) for s in signs)))
        ms = tuple(m for m, _ in pairs)
        ss = tuple(s for _, s in pairs)
        if ss and ss[0] == -1:
            ss = tuple(-s for s in ss)
        return cls(members=ms, signs=ss)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CanonicalForm:
    """Self-canceling form of a subset: signs, adjusted max correlation, weights."""

    signed: SignedSet
    rho_s: float
    weights: tuple[float, ...]


@dataclass(frozen=True)
class MultipoleRecord:
    """One mined multipole: members+signs, dependence, gain, weights, maximality.

    near_degenerate marks records whose two smallest subset eigenvalues differ
    by less than 1e-8, where the weight vector is not uniquely determined.
    """

    signed: SignedSet
    sigma: float
    gain: float
    weights: tuple[float, ...]
    maximal: bool
    near_degenerate: bool = False

    @property
    def members(self) -> tuple[int, ...]:
        return self.signed.members

    @property
    def size(self) -> int:
        return self.signed.size


def _entries(A) -> NDArray[np.float64]:
    M = getattr(A, "entries", A)
    return np.asarray(M, dtype=np.float64)


def _checked_subset(A, subset, min_size: int) -> tuple[NDArray[np.float64], tuple[int, ...]]:
    M = _entries(A)
    idx = tuple(sorted(int(i) for i in subset))
    if len(idx) < min_size:
        raise ValueError(f"subset needs at least {min_size} members, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate members in subset")
    n = M.shape[0]
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"member index out of range for a {n}-variable matrix")
    return M, idx


def _submatrix(M: NDArray[np.float64], idx: Sequence[int]) -> NDArray[np.float64]:
    ix = np.asarray(idx, dtype=np.intp)
    return M[np.ix_(ix, ix)]


def lvnlc(A, subset) -> tuple[float, NDArray[np.float64]]:
    """Least-variant normalized linear combination of a subset.

    Returns (variance, weights): the smallest eigenvalue of the principal
    correlation submatrix and its unit eigenvector in canonical orientation.
    """
    M, idx = _checked_subset(A, subset, 2)
    pair = linalg.min_eigenpair(_submatrix(M, idx))
    return pair.lambda_min, pair.vector


def linear_dependence(A, subset) -> float:
    """1 minus the LVNLC variance, clamped to [0, 1]."""
    var, _ = lvnlc(A, subset)
    return float(min(1.0, max(0.0, 1.0 - var)))


def linear_gain(A, subset) -> float:
    """Dependence of the subset minus the best dependence after deleting one member.

    Equals min_j mu_j - lambda where mu_j is the smallest eigenvalue with
    member j removed; nonnegative up to eigensolver tolerance.
    """
    M, idx = _checked_subset(A, subset, 3)
    sub = _submatrix(M, idx)
    lam = linalg.eigh_many(sub[None, :, :], vectors=False)[0][0, 0]
    mus = _deletion_min_eigvals(sub[None, :, :])[0]
    return float(mus.min() - lam)


def self_canceling_form(A, subset) -> CanonicalForm:
    """Flip members with negative LVNLC weight so the combination becomes a sum.

    Flips exactly the members whose canonical weight is below -1e-10; the
    sign-adjusted submatrix keeps the original eigenvalues. rho_s is its
    largest off-diagonal entry and the returned weights (weight times applied
    sign) are all above -1e-10.
    """
    M, idx = _checked_subset(A, subset, 2)
    sub = _submatrix(M, idx)
    pair = linalg.min_eigenpair(sub)
    w = pair.vector
    signs = np.where(w < -FLIP_EPS, -1, 1)
    adj = sub * np.outer(signs, signs)
    k = len(idx)
    off = adj[~np.eye(k, dtype=bool)]
    weights = w * signs
    signed = SignedSet.canonical(idx, signs.tolist())
    return CanonicalForm(signed=signed, rho_s=float(off.max()), weights=tuple(float(x) for x in weights))


def is_negative_clique(A, signed: SignedSet, rho: float) -> bool:
    """True iff every sign-adjusted pairwise correlation is at most rho."""
    M = _entries(A)
    idx = signed.members
    n = M.shape[0]
    if idx[-1] >= n:
        raise ValueError(f"member index out of range for a {n}-variable matrix")
    sub = _submatrix(M, idx)
    s = np.asarray(signed.signs, dtype=np.float64)
    adj = sub * np.outer(s, s)
    k = len(idx)
    return bool(np.all(adj[~np.eye(k, dtype=bool)] <= rho))


def negative_equivalent_witness(A, subset, rho: float) -> Optional[SignedSet]:
    """Canonical sign assignment making all adjusted correlations <= rho, if any.

    Exhausts the 2^(k-1) canonical patterns in binary counting order and
    returns the first that works, so the witness is deterministic. Limited to
    25 members.
    """
    M, idx = _checked_subset(A, subset, 2)
    k = len(idx)
    if k > 25:
        raise ValueError(f"subset of size {k} too large for exhaustive sign search (max 25)")
    sub = _submatrix(M, idx)
    iu, ju = np.triu_indices(k, 1)
    pair_corr = sub[iu, ju]
    total = 1 << (k - 1)
    chunk = 1 << 16
    free = np.arange(1, k)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = (codes[:, None] >> (free - 1).astype(np.uint64)) & 1
        signs = np.ones((codes.size, k), dtype=np.float64)
        signs[:, 1:] = 1.0 - 2.0 * bits
        ok = np.all(signs[:, iu] * signs[:, ju] * pair_corr <= rho, axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size:
            s = signs[hits[0]].astype(np.int64)
            return SignedSet(members=idx, signs=tuple(int(x) for x in s))
    return None


class StackStudy(NamedTuple):
    """Batched per-matrix quantities for a (B, k, k) correlation stack."""

    lambda_min: NDArray[np.float64]
    vectors: NDArray[np.float64]
    deletion_min: NDArray[np.float64]
    gain: NDArray[np.float64]
    rho_s: NDArray[np.float64]


def _deletion_min_eigvals(mats: NDArray[np.float64]) -> NDArray[np.float64]:
    """Smallest eigenvalue of every single-member deletion; shape (B, k)."""
    B, k, _ = mats.shape
    out = np.empty((B, k), dtype=np.float64)
    keep = np.arange(k)
    for j in range(k):
        sel = keep[keep != j]
        sub = mats[:, sel[:, None], sel[None, :]]
        out[:, j] = linalg.eigh_many(sub, vectors=False)[0][:, 0]
    return out


def _study_stack(mats: NDArray[np.float64]) -> StackStudy:
    """Eigen-structure, deletion eigenvalues, gain, and adjusted max correlation
    for a stack of correlation submatrices of a common size k >= 3."""
    mats = np.asarray(mats, dtype=np.float64)
    B, k, _ = mats.shape
    values, vecs = linalg.eigh_many(mats, vectors=True)
    lam = values[:, 0]
    vectors = vecs[:, :, 0]
    deletion = _deletion_min_eigvals(mats)
    gain = deletion.min(axis=1) - lam
    signs = np.where(vectors < -FLIP_EPS, -1.0, 1.0)
    adj = mats * signs[:, :, None] * signs[:, None, :]
    offmask = ~np.eye(k, dtype=bool)
    rho_s = adj[:, offmask].max(axis=1)
    return StackStudy(lambda_min=lam, vectors=vectors, deletion_min=deletion, gain=gain, rho_s=rho_s)
