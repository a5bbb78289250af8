"""Data preparation and kernel-matrix estimation for SIR, SAVE and pHd.

The kernel matrix of each method is the population object whose top
eigenvectors span the image of the central subspace under the predictor
covariance; its sample version is built from slice-wise moments of the
centered data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    EmptySlice,
    InvalidSliceCount,
    NonFiniteInput,
    NonPositiveEigenvalue,
    SliceTooSmall,
    ZeroVarianceColumn,
)
from .linalg import EigenPairs, top_eigenpairs

SIR = "sir"
SAVE = "save"
PHD = "phd"

METHODS = (SIR, SAVE, PHD)


@dataclass(frozen=True)
class Dataset:
    """Centered (optionally standardized) predictors with their response.

    X : (n, p) predictor matrix, column means zero.
    y : (n,) response values.
    """

    X: np.ndarray
    y: np.ndarray
    centered: bool = True
    standardized: bool = False

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class SliceAssignment:
    """Partition of observations into H slices by ascending response.

    membership : (n,) slice index of each observation, in 0..H-1.
    sizes : (H,) observation count per slice.
    """

    H: int
    membership: np.ndarray
    sizes: np.ndarray

    def indices(self, h):
        return np.flatnonzero(self.membership == h)


@dataclass(frozen=True)
class KernelEstimate:
    """Sample kernel matrix of one method with its leading eigenpairs."""

    method: str
    Q: np.ndarray
    eigen: EigenPairs
    H: int | None = None


@dataclass(frozen=True)
class PseudoResponse:
    """Slice-constant working response for the Lasso formulation of SIR."""

    values: np.ndarray
    dimension: int
    eigenvalue: float


def prepare(X, y, standardize=False):
    """Center columns of X (and scale to unit sample variance if requested).

    The sample variance divisor is n - 1. Raises ZeroVarianceColumn when a
    constant column is standardized, NonFiniteInput on NaN or infinity.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-dimensional, got shape {X.shape}")
    n, p = X.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({n},)")
    if n < 2 or p < 1:
        raise DimensionMismatch(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("data contains NaN or infinite entries")
    Xc = X - X.mean(axis=0)
    if standardize:
        sd = Xc.std(axis=0, ddof=1)
        dead = np.flatnonzero(sd == 0.0)
        if dead.size:
            raise ZeroVarianceColumn(int(dead[0]))
        Xc = Xc / sd
    return Dataset(X=Xc, y=y, centered=True, standardized=bool(standardize))


def sample_covariance(dataset):
    """Sample covariance of the centered predictors with divisor n."""
    X = dataset.X
    S = X.T @ X / X.shape[0]
    return (S + S.T) / 2.0


def assign_slices(y, H):
    """Split observations into H contiguous slices of the sorted response.

    Sizes are floor(n/H) or ceil(n/H) with the larger slices first; ties in
    y keep their original order (stable sort), so the assignment is
    deterministic.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if not 1 <= H <= n:
        raise InvalidSliceCount(f"need 1 <= H <= n, got H={H} with n={n}")
    base, extra = divmod(n, H)
    sizes = np.full(H, base, dtype=int)
    sizes[:extra] += 1
    order = np.argsort(y, kind="stable")
    membership = np.empty(n, dtype=int)
    start = 0
    for h in range(H):
        membership[order[start : start + sizes[h]]] = h
        start += sizes[h]
    return SliceAssignment(H=H, membership=membership, sizes=sizes)


def _check_centered(dataset):
    if not dataset.centered:
        raise ValueError("dataset must be centered")


def _slice_means(dataset, slices):
    means = np.empty((slices.H, dataset.p))
    for h in range(slices.H):
        idx = slices.indices(h)
        if idx.size == 0:
            raise EmptySlice(f"slice {h} is empty")
        means[h] = dataset.X[idx].mean(axis=0)
    return means


def kernel_sir(dataset, slices, d=None):
    """SIR kernel: average outer product of within-slice predictor means."""
    _check_centered(dataset)
    means = _slice_means(dataset, slices)
    Q = means.T @ means / slices.H
    Q = (Q + Q.T) / 2.0
    eigen = top_eigenpairs(Q, d) if d else None
    return KernelEstimate(method=SIR, Q=Q, eigen=eigen, H=slices.H)


def kernel_save(dataset, slices, d=None):
    """SAVE kernel: average squared deviation of within-slice covariances
    from the overall covariance. Each slice needs at least 2 observations."""
    _check_centered(dataset)
    if np.min(slices.sizes) < 2:
        raise SliceTooSmall(f"smallest slice has {int(np.min(slices.sizes))} observations, need >= 2")
    Sigma = sample_covariance(dataset)
    Q = np.zeros_like(Sigma)
    for h in range(slices.H):
        idx = slices.indices(h)
        Z = dataset.X[idx]
        Z = Z - Z.mean(axis=0)
        V = Z.T @ Z / idx.size
        Dh = Sigma - V
        Q += Dh @ Dh
    Q /= slices.H
    Q = (Q + Q.T) / 2.0
    eigen = top_eigenpairs(Q, d) if d else None
    return KernelEstimate(method=SAVE, Q=Q, eigen=eigen, H=slices.H)


def kernel_phd(dataset, d=None):
    """pHd kernel: response-weighted average of predictor outer products.

    Indefinite in general, so eigenpairs are ranked by absolute eigenvalue.
    """
    _check_centered(dataset)
    w = dataset.y - dataset.y.mean()
    Q = (dataset.X * w[:, None]).T @ dataset.X / dataset.n
    Q = (Q + Q.T) / 2.0
    eigen = top_eigenpairs(Q, d, ordering="abs") if d else None
    return KernelEstimate(method=PHD, Q=Q, eigen=eigen, H=None)


def eigen_ordering(method):
    return "abs" if method == PHD else "value"


def pseudo_response(dataset, slices, eta_j, lambda_j, dimension=0):
    """Working response whose lasso regression on X reproduces the SIR
    estimating equation.

    Every observation in slice h receives the slice average of x' eta_j,
    scaled by 1/lambda_j, so the result is constant within slices. With
    equal slice sizes, regressing it on X/n recovers eta_j exactly whenever
    (lambda_j, eta_j) is an exact eigenpair of the SIR kernel.
    """
    _check_centered(dataset)
    eta_j = np.asarray(eta_j, dtype=float)
    if eta_j.shape != (dataset.p,):
        raise DimensionMismatch(f"eta has shape {eta_j.shape}, expected ({dataset.p},)")
    if lambda_j <= 0:
        raise NonPositiveEigenvalue(f"eigenvalue must be positive, got {lambda_j}")
    scores = dataset.X @ eta_j
    values = np.empty(dataset.n)
    for h in range(slices.H):
        idx = slices.indices(h)
        if idx.size == 0:
            raise EmptySlice(f"slice {h} is empty")
        values[idx] = scores[idx].mean()
    values /= lambda_j
    return PseudoResponse(values=values, dimension=dimension, eigenvalue=float(lambda_j))
