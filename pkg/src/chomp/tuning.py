"""Tuning-parameter selection: projection information criterion and
cross-validation.

The projection criterion scores a candidate fit by how far its projection
matrix sits from the projection of a reference consistent estimate, plus a
complexity charge per selected coefficient; the all-zero fit is assigned an
infinite score so it can never be selected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AllZeroFits, FoldTooSmall, ZeroReference
from .solvers import (SparseFit, _FactorCache, _PathWarmStart, gram_lasso,
                      penalty_thresholds)

TAU_RULES = ("log(p)/p", "2/p")


def default_grid():
    """0 plus 100 log-spaced penalty values in [1e-4, 1]."""
    return np.concatenate([[0.0], np.logspace(-4.0, 0.0, 100)])


@dataclass(frozen=True)
class TuningPolicy:
    """How to pick the penalty for one dimension.

    kind : "pic" (grid search on the projection criterion), "cv"
        (cross-validated prediction error, Lasso-SIR only), "fixed"
        (use mu as given) or "theory" (rate-based default).
    tau_rule : complexity weight for "pic"; "log(p)/p", "2/p" or a number.
    """

    kind: str = "pic"
    grid: tuple | None = None
    tau_rule: object = "log(p)/p"
    folds: int = 10
    mu: float = 0.0
    scale: float = 1.0
    seed: object = 0

    def __post_init__(self):
        if self.kind not in ("pic", "cv", "fixed", "theory"):
            raise ValueError(f"unknown tuning kind {self.kind!r}")
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            if g.size == 0:
                raise ValueError("tuning grid must be non-empty")
            if np.any(np.diff(g) < 0):
                raise ValueError("tuning grid must be sorted ascending")
            if g[0] < 0 or g[-1] > 1:
                raise ValueError("tuning grid values must lie in [0, 1]")
        if not (isinstance(self.tau_rule, (int, float)) or self.tau_rule in TAU_RULES):
            raise ValueError(f"unknown tau rule {self.tau_rule!r}")
        if self.folds < 2:
            raise ValueError("folds must be at least 2")

    def grid_values(self):
        return default_grid() if self.grid is None else np.asarray(self.grid, dtype=float)

    def tau(self, p):
        if self.tau_rule == "log(p)/p":
            return np.log(p) / p
        if self.tau_rule == "2/p":
            return 2.0 / p
        return float(self.tau_rule)


def resolve_policy(tuning, estimator):
    """Fill in the default policy for an estimator when none is given."""
    if tuning is not None:
        return tuning
    if estimator == "lasso-sir":
        return TuningPolicy(kind="cv")
    return TuningPolicy(kind="pic")


@dataclass(frozen=True)
class PicScore:
    mu: float
    loss: float
    complexity: float
    total: float


def pic(beta_hat, beta_bar, tau, mu=np.nan):
    """Projection criterion of one candidate against the reference estimate.

    Both arguments are single dimensions, so the projection distance
    reduces to 2 (1 - cos^2 angle) between the two directions.
    """
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_bar = np.asarray(beta_bar, dtype=float)
    nb = float(beta_bar @ beta_bar)
    if nb == 0.0:
        raise ZeroReference("reference estimate is the zero vector")
    nh = float(beta_hat @ beta_hat)
    if nh == 0.0:
        return PicScore(mu=float(mu), loss=np.inf, complexity=0.0, total=np.inf)
    cos2 = float(beta_hat @ beta_bar) ** 2 / (nh * nb)
    loss = max(2.0 - 2.0 * cos2, 0.0)
    complexity = float(tau) * int(np.count_nonzero(beta_hat))
    return PicScore(mu=float(mu), loss=loss, complexity=complexity,
                    total=loss + complexity)


def select_pic(fit_path, beta_bar, policy, grid=None):
    """Fit the whole penalty grid and keep the criterion minimizer.

    fit_path maps an ascending array of penalty values to a list of fits.
    Exact score ties are broken toward the larger penalty (sparser fit).
    Raises AllZeroFits when the entire path collapses to zero.
    """
    beta_bar = np.asarray(beta_bar, dtype=float)
    grid = policy.grid_values() if grid is None else np.asarray(grid, dtype=float)
    tau = policy.tau(beta_bar.shape[0])
    fits = fit_path(grid)
    scores = [pic(f.beta, beta_bar, tau, mu=f.mu) for f in fits]
    totals = np.array([s.total for s in scores])
    if not np.any(np.isfinite(totals)):
        raise AllZeroFits("every penalty on the grid produced the zero vector")
    best = totals.size - 1 - int(np.argmin(totals[::-1]))
    return fits[best], scores[best]


def theoretical_mu(n, p, lambda_j, scale=1.0):
    """Rate-based penalty sqrt(log(p) / (n lambda_j)), times a constant."""
    if lambda_j <= 0:
        raise ValueError(f"eigenvalue must be positive, got {lambda_j}")
    return float(scale) * np.sqrt(np.log(p) / (n * lambda_j))


def cross_validate_lasso_sir(dataset, ytilde, folds=10, grid=None, seed=0,
                             max_iter=10000, tol=1e-8, kkt_tol=1e-7):
    """Pick the penalty for the Lasso formulation of SIR by K-fold
    prediction error on the working response, then refit on all rows.

    Rows are partitioned by a seeded permutation; the error for one fold is
    the mean squared difference between its working-response values and the
    predictions of the model fitted on the remaining rows. Returns the
    selected fit and the per-penalty error curve.
    """
    n, p = dataset.X.shape
    if folds < 2 or n < folds:
        raise FoldTooSmall(f"need 2 <= folds <= n, got folds={folds} with n={n}")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    values = ytilde.values if hasattr(ytilde, "values") else np.asarray(ytilde, dtype=float)
    X = dataset.X

    Gn = X.T @ X
    cn = X.T @ values
    rng = np.random.default_rng(seed)
    assignment = np.array_split(rng.permutation(n), folds)

    curve = np.zeros(grid.size)
    ones = np.ones(p)
    for te in assignment:
        Xte = X[te]
        yte = values[te]
        ntr = n - te.size
        Gtr = (Gn - Xte.T @ Xte) / ntr
        ctr = (cn - Xte.T @ yte) / ntr
        cache = _FactorCache(Gtr)
        warm = _PathWarmStart(grid)
        rescue_after = 30
        for i in range(grid.size - 1, -1, -1):
            thr = penalty_thresholds(grid[i], ones)
            beta, _, it, _, _ = gram_lasso(Gtr, ctr, thr, beta0=warm.start(i),
                                           cache=cache, rescue_after=rescue_after,
                                           max_iter=max_iter, tol=tol, kkt_tol=kkt_tol)
            if it >= rescue_after:
                # once sweeping stalls on this fold, smaller penalties only
                # get harder; use the exact method for the rest of the grid
                rescue_after = 0
            warm.record(i, beta)
            resid = yte - Xte @ beta
            curve[i] += float(resid @ resid) / te.size
    curve /= folds

    best = curve.size - 1 - int(np.argmin(curve[::-1]))
    mu = float(grid[best])
    thr = penalty_thresholds(mu, np.ones(p))
    beta, kkt, it, conv, _ = gram_lasso(Gn / n, cn / n, thr,
                                        max_iter=max_iter, tol=tol, kkt_tol=kkt_tol)
    fit = SparseFit(beta=beta, mu=mu, support=np.flatnonzero(beta),
                    kkt_residual=kkt, iterations=it, converged=conv)
    return fit, curve
