"""Dense symmetric kernels for small matrices: eigen-decomposition, Cholesky, PSD test.

The eigensolver is a cyclic Jacobi sweep with a fixed row-major rotation
order. Matrices here are correlation submatrices, rarely beyond a dozen
variables and capped at 64, where Jacobi is accurate to machine precision
and, crucially, bit-reproducible: identical input bits give identical
output bits regardless of batch composition or thread count. Everything
downstream leans on that for deterministic result files.

``eigh_many`` diagonalizes a whole stack of same-sized matrices in one
vectorized pass; the scalar entry points wrap it with a stack of one, so
there is a single code path to trust.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

MAX_DIM = 64

# Sign convention for eigenvectors: the first component with absolute value
# above this threshold is made positive.
ORIENT_EPS = 1e-10

_SWEEP_LIMIT = 100
_OFF_TOL = 1e-13  # off-diagonal Frobenius norm at convergence


class NotPositiveDefiniteError(ValueError):
    """Raised by :func:`cholesky` when a pivot is not positive.

    ``pivot_index`` is the zero-based row whose pivot failed, ``pivot`` the
    offending value.
    """

    def __init__(self, pivot_index: int, pivot: float):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot_index} is {pivot:.6e} (<= 1e-12)"
        )
        self.pivot_index = pivot_index
        self.pivot = pivot


@dataclass(frozen=True)
class EigenResult:
    """Smallest eigenpair of a symmetric matrix.

    ``vector`` has unit norm and canonical orientation: its first component
    with magnitude above 1e-10 is positive.
    """

    lambda_min: float
    vector: NDArray[np.float64]


def _as_square(A, sym_tol: float) -> NDArray[np.float64]:
    """Validate and symmetrize the input; accepts anything with ``.entries``."""
    M = np.asarray(getattr(A, "entries", A), dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise ValueError(f"matrix dimension {M.shape[0]} exceeds the {MAX_DIM} cap")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains non-finite entries")
    asym = float(np.max(np.abs(M - M.T), initial=0.0))
    if asym > sym_tol:
        raise ValueError(f"matrix is not symmetric: max |A - A^T| = {asym:.3e}")
    return (M + M.T) / 2.0


def eigh_many(
    mats: NDArray[np.float64], vectors: bool = True
) -> tuple[NDArray[np.float64], NDArray[np.float64] | None]:
    """Jacobi-diagonalize a stack of symmetric matrices in one vectorized pass.

    Parameters
    ----------
    mats : (n, k, k) array
        Stack of symmetric matrices, k <= 64. Symmetry is trusted, not checked;
        the scalar wrappers validate.
    vectors : bool
        When false, skip eigenvector accumulation (about twice as fast).

    Returns
    -------
    values : (n, k) array, each row ascending
    vectors : (n, k, k) array or None
        Column ``[:, :, i]`` pairs with ``values[:, i]``, canonically oriented.

    Rotations run in row-major upper-triangle order until a matrix's
    off-diagonal Frobenius norm is <= 1e-13 (or 100 sweeps). A matrix that
    converges drops out of later sweeps, so each matrix sees exactly the
    rotation sequence it would see alone: results do not depend on what else
    shares the stack. 2x2 matrices are solved in closed form, so e.g. a
    correlation pair has eigenvalues exactly 1 -+ |c| on every code path.
    """
    A = np.array(np.asarray(mats, dtype=np.float64))
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected an (n, k, k) stack, got shape {A.shape}")
    n, k = A.shape[0], A.shape[1]
    if k > MAX_DIM:
        raise ValueError(f"matrix dimension {k} exceeds the {MAX_DIM} cap")
    if k == 2 and n > 0:
        return _eigh2(A, vectors)
    V = np.tile(np.eye(k), (n, 1, 1)) if vectors else None

    if k >= 2 and n > 0:
        iu, ju = np.triu_indices(k, 1)
        # off-diagonal Frobenius norm counts both triangles
        half_tol = 0.5 * _OFF_TOL * _OFF_TOL
        for _ in range(_SWEEP_LIMIT):
            upper = A[:, iu, ju]
            live = np.nonzero(np.einsum("nm,nm->n", upper, upper) > half_tol)[0]
            if live.size == 0:
                break
            for p in range(k - 1):
                for q in range(p + 1, k):
                    apq = A[live, p, q]
                    act = live[apq != 0.0]
                    if act.size == 0:
                        continue
                    a_pq = A[act, p, q]
                    tau = (A[act, q, q] - A[act, p, p]) / (2.0 * a_pq)
                    t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(tau * tau + 1.0))
                    c = (1.0 / np.sqrt(t * t + 1.0))[:, None]
                    s = (t[:, None]) * c
                    rp = A[act, p, :]
                    rq = A[act, q, :]
                    A[act, p, :] = c * rp - s * rq
                    A[act, q, :] = s * rp + c * rq
                    cp = A[act, :, p]
                    cq = A[act, :, q]
                    A[act, :, p] = c * cp - s * cq
                    A[act, :, q] = s * cp + c * cq
                    A[act, p, q] = 0.0
                    A[act, q, p] = 0.0
                    if V is not None:
                        vp = V[act, :, p]
                        vq = V[act, :, q]
                        V[act, :, p] = c * vp - s * vq
                        V[act, :, q] = s * vp + c * vq

    diag = np.arange(k)
    values = A[:, diag, diag]
    order = np.argsort(values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    if V is not None:
        V = np.take_along_axis(V, order[:, None, :], axis=2)
        # canonical orientation per eigenvector column
        significant = np.abs(V) > ORIENT_EPS
        first = np.argmax(significant, axis=1)  # (n, k) row index per column
        lead = np.take_along_axis(V, first[:, None, :], axis=1)[:, 0, :]
        flip = np.where(lead < 0.0, -1.0, 1.0)
        V = V * flip[:, None, :]
    return values, V


def _eigh2(A: NDArray[np.float64], vectors: bool) -> tuple[NDArray[np.float64], NDArray[np.float64] | None]:
    """Closed-form eigen-decomposition of a 2x2 symmetric stack."""
    a = A[:, 0, 0]
    b = A[:, 0, 1]
    d = A[:, 1, 1]
    mid = (a + d) / 2.0
    rad = np.hypot((a - d) / 2.0, b)
    values = np.stack([mid - rad, mid + rad], axis=1)
    if not vectors:
        return values, None
    lam0 = values[:, 0]
    # null directions of (A - lam0 I) from either row; take the better-conditioned
    u1 = np.stack([b, lam0 - a], axis=1)
    u2 = np.stack([lam0 - d, b], axis=1)
    n1 = (u1 * u1).sum(axis=1)
    n2 = (u2 * u2).sum(axis=1)
    v0 = np.where((n1 >= n2)[:, None], u1, u2)
    norm = np.sqrt((v0 * v0).sum(axis=1))
    diagonal = norm == 0.0  # b = 0 and a = d: any basis works, keep axes
    safe = np.where(diagonal, 1.0, norm)
    v0 = np.where(diagonal[:, None], np.array([1.0, 0.0]), v0 / safe[:, None])
    V = np.empty_like(A)
    V[:, :, 0] = v0
    V[:, 0, 1] = -v0[:, 1]
    V[:, 1, 1] = v0[:, 0]
    significant = np.abs(V) > ORIENT_EPS
    first = np.argmax(significant, axis=1)
    lead = np.take_along_axis(V, first[:, None, :], axis=1)[:, 0, :]
    flip = np.where(lead < 0.0, -1.0, 1.0)
    return values, V * flip[:, None, :]


def eigen_symmetric(A) -> list[tuple[float, NDArray[np.float64]]]:
    """Full eigen-decomposition of a symmetric matrix, ascending eigenvalues.

    Returns a list of ``(eigenvalue, unit eigenvector)`` pairs. Asymmetry
    beyond 1e-9 is rejected; smaller asymmetry is averaged away.
    """
    M = _as_square(A, sym_tol=1e-9)
    values, vecs = eigh_many(M[None, :, :], vectors=True)
    assert vecs is not None
    return [(float(values[0, i]), vecs[0, :, i].copy()) for i in range(M.shape[0])]


def min_eigenpair(A) -> EigenResult:
    """Smallest eigenvalue and its canonically oriented unit eigenvector."""
    M = _as_square(A, sym_tol=1e-9)
    values, vecs = eigh_many(M[None, :, :], vectors=True)
    assert vecs is not None
    return EigenResult(lambda_min=float(values[0, 0]), vector=vecs[0, :, 0].copy())


def cholesky(A) -> NDArray[np.float64]:
    """Lower-triangular L with A = L L^T, for strictly positive definite A.

    Raises :class:`NotPositiveDefiniteError` carrying the pivot index when a
    pivot falls to 1e-12 or below.
    """
    M = _as_square(A, sym_tol=1e-9)
    k = M.shape[0]
    L = np.zeros_like(M)
    for j in range(k):
        pivot = M[j, j] - float(np.dot(L[j, :j], L[j, :j]))
        if pivot <= 1e-12:
            raise NotPositiveDefiniteError(j, float(pivot))
        L[j, j] = np.sqrt(pivot)
        if j + 1 < k:
            L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def is_psd(A, tol: float = 1e-10) -> bool:
    """True iff the smallest eigenvalue is >= -tol."""
    M = _as_square(A, sym_tol=1e-9)
    values, _ = eigh_many(M[None, :, :], vectors=False)
    return bool(values[0, 0] >= -tol)
