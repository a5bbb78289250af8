"""Dense linear-algebra primitives: Cholesky factors, triangular solves,
symmetric eigendecompositions and projection matrices.

All functions are pure and operate on plain numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, NotPositiveDefinite, RankDeficient

# Pivots below PIVOT_RTOL * max(diag(S)) are treated as zero: the matrix is
# numerically rank deficient even if the factorization itself succeeds.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class EigenPairs:
    """Top eigenvalues and unit-norm eigenvectors of a symmetric matrix.

    values : (d,) eigenvalues in the requested order.
    vectors : (p, d) matrix whose columns are the matching eigenvectors.
    """

    values: np.ndarray
    vectors: np.ndarray


def _check_square_symmetric(S):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix contains non-finite entries")
    scale = np.max(np.abs(S)) or 1.0
    if np.max(np.abs(S - S.T)) > 1e-8 * scale:
        raise ValueError("matrix is not symmetric")
    # Kill rounding-level asymmetry from accumulated BLAS products.
    return (S + S.T) / 2.0


def cholesky(S):
    """Lower-triangular Cholesky factor L of a symmetric positive definite S.

    Raises NotPositiveDefinite when a pivot falls at or below
    PIVOT_RTOL * max(diag(S)), e.g. for a rank-deficient sample covariance.
    """
    S = _check_square_symmetric(S)
    tol = PIVOT_RTOL * max(np.max(np.diag(S)), 0.0)
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"matrix is not positive definite: {exc}") from exc
    pivots = np.diag(L) ** 2
    k = int(np.argmin(pivots))
    if pivots[k] <= tol:
        raise NotPositiveDefinite(
            f"pivot {pivots[k]:.3e} at index {k} is below tolerance {tol:.3e}",
            pivot=float(pivots[k]),
            index=k,
        )
    return L


def _check_triangular(T, b, lower):
    T = np.asarray(T, dtype=float)
    b = np.asarray(b, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {T.shape}")
    if b.shape[0] != T.shape[0]:
        raise DimensionMismatch(
            f"right-hand side has length {b.shape[0]}, matrix is {T.shape[0]}x{T.shape[0]}"
        )
    off = np.triu(T, 1) if lower else np.tril(T, -1)
    if np.any(off != 0.0):
        kind = "lower" if lower else "upper"
        raise ValueError(f"matrix is not {kind} triangular")
    if np.any(np.diag(T) <= 0.0):
        raise ValueError("triangular factor has a non-positive diagonal entry")
    return T, b


def solve_lower(L, b):
    """Solve L x = b for lower-triangular L by forward substitution."""
    L, b = _check_triangular(L, b, lower=True)
    return scipy.linalg.solve_triangular(L, b, lower=True)


def solve_upper(U, b):
    """Solve U x = b for upper-triangular U by back substitution."""
    U, b = _check_triangular(U, b, lower=False)
    return scipy.linalg.solve_triangular(U, b, lower=False)


def top_eigenpairs(S, d, ordering="value"):
    """Leading d eigenpairs of a symmetric matrix.

    ordering selects how "leading" is ranked: "value" sorts by descending
    eigenvalue, "abs" by descending absolute eigenvalue (needed when the
    matrix is indefinite and the informative directions may have negative
    eigenvalues).

    Each eigenvector is flipped so that its largest-magnitude entry is
    positive, making the output deterministic up to the subspace itself.
    """
    S = _check_square_symmetric(S)
    p = S.shape[0]
    if not 1 <= d <= p:
        raise DimensionMismatch(f"requested {d} eigenpairs from a {p}x{p} matrix")
    if ordering not in ("value", "abs"):
        raise ValueError(f"unknown ordering {ordering!r}; use 'value' or 'abs'")
    w, V = np.linalg.eigh(S)
    key = -np.abs(w) if ordering == "abs" else -w
    idx = np.argsort(key, kind="stable")[:d]
    w = w[idx].copy()
    V = V[:, idx].copy()
    for j in range(d):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return EigenPairs(values=w, vectors=V)


def projection(B):
    """Orthogonal projection matrix onto the column space of B.

    B may be a vector or a p x d matrix with full column rank; collinear or
    zero columns raise RankDeficient.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.ndim != 2 or B.shape[1] > B.shape[0]:
        raise DimensionMismatch(f"expected a tall p x d matrix, got shape {B.shape}")
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= 1e-10 * s[0]:
        raise RankDeficient(
            f"columns are numerically dependent (singular values {s.min():.3e}..{s.max():.3e})"
        )
    P = U @ U.T
    return (P + P.T) / 2.0
