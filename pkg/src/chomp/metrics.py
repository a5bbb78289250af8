"""Evaluation measures for fitted subspaces.

Covers the Frobenius distance between projection matrices, false
positive/negative selection rates in both the per-coefficient and the
projection-diagonal conventions, and the sample distance correlation
between the fitted sufficient predictors and the response.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch

MODES = ("per-coefficient", "projection-diagonal")

# diagonal entries of a projection matrix below this count as zero; fitted
# coefficients are hard zeros so anything tiny works
DIAG_THRESHOLD = 1e-10


@dataclass(frozen=True)
class EvalReport:
    """Error and selection summary for one fitted basis against the truth."""

    error: float
    fpr: float
    fnr: float
    support_hat: tuple
    support_true: tuple


def _as_basis(B):
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.ndim != 2 or B.shape[1] > B.shape[0]:
        raise DimensionMismatch(f"expected a tall p x d matrix, got shape {B.shape}")
    return B


def _orthonormal_range(B):
    # zero or collinear columns are dropped here rather than raising, so a
    # degenerate fit still gets scored against the true subspace
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    return U[:, s > 1e-10 * s[0]]


def projection_error(B_hat, B_true):
    """Frobenius norm of the difference of the two projection matrices.

    A zero or collinear column contributes nothing to the projection; an
    estimate that is identically zero scores the norm of the true
    projection, which is the worst case, and emits a warning.
    """
    B_hat = _as_basis(B_hat)
    B_true = _as_basis(B_true)
    if B_hat.shape[0] != B_true.shape[0]:
        raise DimensionMismatch(
            f"bases live in different dimensions: {B_hat.shape[0]} vs {B_true.shape[0]}")
    Uh = _orthonormal_range(B_hat)
    Ut = _orthonormal_range(B_true)
    if Uh.shape[1] == 0:
        warnings.warn("estimate is identically zero; scoring the worst-case distance",
                      RuntimeWarning, stacklevel=2)
    diff = Uh @ Uh.T - Ut @ Ut.T
    return float(np.linalg.norm(diff))


def _selected_rows(B, mode):
    if mode == "per-coefficient":
        return np.any(B != 0.0, axis=1)
    U = _orthonormal_range(B)
    # diagonal of U U^T without forming the projection
    diag = np.einsum("ij,ij->i", U, U)
    return diag > DIAG_THRESHOLD


def selection_rates(B_hat, B_true, mode="per-coefficient"):
    """False positive and false negative rates of variable selection.

    Per-coefficient counts a variable as selected when any entry of its row
    is non-zero; projection-diagonal instead inspects the diagonal of the
    projection matrix, which is the convention for multiple-index fits where
    coefficients can cancel. A rate whose denominator is empty is NaN.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; use one of {MODES}")
    B_hat = _as_basis(B_hat)
    B_true = _as_basis(B_true)
    if B_hat.shape[0] != B_true.shape[0]:
        raise DimensionMismatch(
            f"bases live in different dimensions: {B_hat.shape[0]} vs {B_true.shape[0]}")
    sel = _selected_rows(B_hat, mode)
    tru = _selected_rows(B_true, mode)
    n_null = int(np.sum(~tru))
    n_true = int(np.sum(tru))
    fpr = float(np.sum(sel & ~tru)) / n_null if n_null else float("nan")
    fnr = float(np.sum(~sel & tru)) / n_true if n_true else float("nan")
    return fpr, fnr


def evaluate(B_hat, B_true, mode=None):
    """Full report for one fit: projection error, rates, and supports.

    When mode is not given, single-index truths are scored per coefficient
    and multiple-index truths by the projection diagonal.
    """
    B_hat = _as_basis(B_hat)
    B_true = _as_basis(B_true)
    if mode is None:
        mode = "per-coefficient" if B_true.shape[1] == 1 else "projection-diagonal"
    error = projection_error(B_hat, B_true)
    fpr, fnr = selection_rates(B_hat, B_true, mode=mode)
    return EvalReport(error=error, fpr=fpr, fnr=fnr,
                      support_hat=tuple(np.flatnonzero(np.any(B_hat != 0.0, axis=1))),
                      support_true=tuple(np.flatnonzero(np.any(B_true != 0.0, axis=1))))


def _centered_distances(D):
    row = D.mean(axis=0, keepdims=True)
    col = D.mean(axis=1, keepdims=True)
    return D - row - col + D.mean()


def distance_correlation(U, y):
    """Sample distance correlation between predictor rows and the response.

    Uses the biased n^-2 estimator: Euclidean distance matrices for both
    arguments are double-centered and dCor is the ratio of the centered
    cross moment to the geometric mean of the centered self moments. Zero
    by convention when either argument has zero distance variance.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    y = np.asarray(y, dtype=float).reshape(-1)
    n = U.shape[0]
    if n != y.shape[0]:
        raise DimensionMismatch(f"{n} predictor rows but {y.shape[0]} responses")
    if n < 2:
        raise ValueError(f"need at least two observations, got {n}")
    diff = U[:, None, :] - U[None, :, :]
    A = _centered_distances(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)))
    B = _centered_distances(np.abs(y[:, None] - y[None, :]))
    dcov2 = float(np.mean(A * B))
    dvar_u = float(np.mean(A * A))
    dvar_y = float(np.mean(B * B))
    if dvar_u <= 0.0 or dvar_y <= 0.0:
        return 0.0
    r2 = dcov2 / np.sqrt(dvar_u * dvar_y)
    return float(np.sqrt(min(max(r2, 0.0), 1.0)))
