"""Banded Cholesky estimation for p comparable to or larger than n, plus
the sparse subspace fit built on that factor.

When the sample covariance is singular its Cholesky factor does not exist,
but a banded working structure stays estimable: each predictor is regressed
on the residuals of at most K preceding predictors, giving a unit
lower-triangular factor with bandwidth K and positive diagonal scales. The
subspace fit then swaps this factor into the penalized regression, with a
cross-validated initial estimate standing in for the unavailable dense one
as both the adaptive weight source and the tuning reference.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteInput
from .kernels import assign_slices, kernel_sir, pseudo_response
from .linalg import solve_lower
from .solvers import (
    SparseFit,
    SubspaceEstimate,
    adaptive_weights,
    gram_lasso,
    gram_lasso_path,
    penalty_thresholds,
)
from .tuning import TuningPolicy, cross_validate_lasso_sir, select_pic

DIAGONAL_FLOOR = 1e-12


@dataclass(frozen=True)
class BandedCholeskyEstimate:
    """Factorization Sigma ~ C diag(d) C^T with C unit lower triangular of
    bandwidth K. L = C diag(sqrt(d)) is the working Cholesky factor.
    degenerate lists columns whose regression was rank deficient or whose
    residual scale hit the positivity floor."""

    C: np.ndarray
    d: np.ndarray
    L: np.ndarray
    K: int
    degenerate: tuple = ()


def banded_cholesky(X, K):
    """Sequential-regression Cholesky factor under a bandwidth-K structure.

    Rows of X are observations, already centered. Column j is regressed on
    the residuals of columns max(0, j - K) .. j - 1; with K >= p - 1 this
    reproduces the exact factorization of X^T X / n. Works for p > n as
    long as K + 1 columns stay linearly independent; rank-deficient spots
    fall back to the minimum-norm coefficients and are flagged.
    """
    X = np.asarray(getattr(X, "X", X), dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be a matrix, got {X.ndim} axes")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("X contains non-finite entries")
    K = int(K)
    if K < 1:
        raise ValueError(f"bandwidth must be at least 1, got {K}")
    n, p = X.shape

    E = np.empty((n, p))
    C = np.eye(p)
    dvec = np.empty(p)
    degenerate = []
    E[:, 0] = X[:, 0]
    dvec[0] = float(E[:, 0] @ E[:, 0]) / n
    for j in range(1, p):
        lo = max(0, j - K)
        Z = E[:, lo:j]
        coef, _, rank, _ = np.linalg.lstsq(Z, X[:, j], rcond=None)
        if rank < Z.shape[1]:
            degenerate.append(j)
        e = X[:, j] - Z @ coef
        E[:, j] = e
        C[j, lo:j] = coef
        dvec[j] = float(e @ e) / n
    floored = dvec < DIAGONAL_FLOOR
    if np.any(floored):
        # keep the factor invertible even when a column is fitted exactly
        degenerate.extend(int(k) for k in np.flatnonzero(floored) if k not in degenerate)
        dvec = np.maximum(dvec, DIAGONAL_FLOOR)
    L = C * np.sqrt(dvec)[None, :]
    return BandedCholeskyEstimate(C=C, d=dvec, L=L, K=K,
                                  degenerate=tuple(sorted(degenerate)))


def chomp_highdim(dataset, estimator="adaptive-chomp", d=1, K=3, H=20, gamma=2.0,
                  tuning=None, initial=None, max_iter=10000, tol=1e-8, kkt_tol=1e-7):
    """Banded-factor subspace estimate for the sir kernel.

    The cross-validated Lasso formulation provides the initial estimate for
    each dimension; the adaptive variant turns it into penalty weights, and
    the projection criterion (complexity weight 2/p by default) scores the
    penalty grid against it. A precomputed initial (one fit or vector per
    dimension) skips the internal cross-validation, letting several banded
    estimators on the same data reuse a single initial fit.
    """
    if estimator not in ("chomp", "adaptive-chomp"):
        raise ValueError(
            f"banded fitting supports 'chomp' or 'adaptive-chomp', got {estimator!r}")
    policy = tuning if tuning is not None else TuningPolicy(kind="pic", tau_rule="2/p")
    if policy.kind not in ("pic", "fixed"):
        raise ValueError(f"tuning kind {policy.kind!r} is not available for banded fits")
    if initial is not None and len(initial) < d:
        raise ValueError(f"initial has {len(initial)} entries for {d} dimensions")

    slices = assign_slices(dataset.y, H)
    est = kernel_sir(dataset, slices, d=d)
    factor = banded_cholesky(dataset.X, K)
    L = factor.L
    G = L @ L.T
    p = dataset.p
    solver_kw = dict(max_iter=max_iter, tol=tol, kkt_tol=kkt_tol)

    fits, scores = [], []
    for j in range(d):
        eta = est.eigen.vectors[:, j]
        lam = float(est.eigen.values[j])
        init_beta = None
        if initial is not None:
            init_beta = np.asarray(getattr(initial[j], "beta", initial[j]), dtype=float)
        elif estimator == "adaptive-chomp" or policy.kind == "pic":
            ytilde = pseudo_response(dataset, slices, eta, lam, dimension=j)
            seed = np.random.SeedSequence(policy.seed, spawn_key=(j,))
            init, _ = cross_validate_lasso_sir(
                dataset, ytilde, folds=policy.folds, grid=policy.grid_values(),
                seed=seed, **solver_kw)
            init_beta = init.beta
        weights = None
        if estimator == "adaptive-chomp":
            weights = adaptive_weights(init_beta, gamma).omega

        kappa = solve_lower(L, eta)
        c = L @ kappa
        bb = float(kappa @ kappa)
        if policy.kind == "pic":
            # Anchor the relative grid to the smallest all-zero penalty so the
            # candidate path spans the full range whatever the scale of the
            # estimating equations or the adaptive weights.
            w = np.ones(p) if weights is None else weights
            thresholds = np.abs(c) / w
            scale = float(np.max(thresholds[np.isfinite(thresholds)]))
            fit, score = select_pic(
                lambda mus: gram_lasso_path(G, c, weights, mus, bb=bb, **solver_kw),
                init_beta, policy, grid=policy.grid_values() * scale)
        else:
            thr = penalty_thresholds(policy.mu, np.ones(p) if weights is None else weights)
            beta, kkt, it, conv, _ = gram_lasso(G, c, thr, bb=bb, **solver_kw)
            fit = SparseFit(beta=beta, mu=float(policy.mu), support=np.flatnonzero(beta),
                            kkt_residual=kkt, iterations=it, converged=conv)
            score = None
        fits.append(fit)
        scores.append(score)

    B = np.column_stack([f.beta for f in fits])
    return SubspaceEstimate(B=B, fits=fits, method="sir", estimator=estimator,
                            gamma=gamma if estimator == "adaptive-chomp" else None,
                            scores=scores, kernel=est)
