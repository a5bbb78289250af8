"""Penalized per-dimension estimators built on one weighted-lasso core.

All four sparse estimators minimize the same shape of objective,

    0.5 * ||A beta - b||^2 + mu * sum_k w_k |beta_k|,

and differ only in the design/target pair: the Cholesky-factor regression
uses A = L', b = kappa with L kappa = eta; the Matrix Lasso uses A = Sigma,
b = eta; the Lasso formulation of SIR uses A = X/sqrt(n) with the
slice-constant working response. The solver is cyclic coordinate descent on
the Gram form with violation-screened active sets, warm starts along a
tuning path, and a subgradient (KKT) certificate at the solution. Badly
conditioned problems that defeat plain sweeps fall through to an exact
fixed-sign active-set method.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels
from .exceptions import (
    AllDimensionsZero,
    DimensionMismatch,
    NonFiniteInput,
)
from .kernels import Dataset, KernelEstimate, PseudoResponse
from .linalg import cholesky, solve_lower, solve_upper

ESTIMATORS = ("chomp", "adaptive-chomp", "matrix-lasso", "lasso-sir", "unpenalized")

# Converged coefficients smaller than this are snapped to exact zero so that
# support sets, selection rates and CSV output are unambiguous.
ZERO_SNAP = 1e-12


@dataclass(frozen=True)
class LassoProblem:
    """Weighted lasso instance. weights entries may be +inf, which forces
    the corresponding coefficient to exactly zero."""

    A: np.ndarray
    b: np.ndarray
    mu: float
    weights: np.ndarray | None = None

    def validated(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"incompatible shapes A{A.shape}, b{b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise NonFiniteInput("design or target contains non-finite entries")
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"mu must be finite and non-negative, got {self.mu}")
        if self.weights is None:
            w = np.ones(A.shape[1])
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (A.shape[1],):
                raise DimensionMismatch(f"weights shape {w.shape} does not match p={A.shape[1]}")
            if np.any(np.isnan(w)) or np.any(w < 0):
                raise ValueError("weights must be non-negative (inf allowed)")
        return A, b, float(self.mu), w


@dataclass(frozen=True)
class SparseFit:
    """One fitted coefficient vector with solver diagnostics."""

    beta: np.ndarray
    mu: float
    support: np.ndarray
    kkt_residual: float
    iterations: int
    converged: bool
    objective_path: tuple = ()


@dataclass(frozen=True)
class AdaptiveWeights:
    """Per-coefficient penalty weights |beta_bar_k|^(-gamma); exact zeros in
    the initial estimate map to +inf and exclude the coefficient."""

    omega: np.ndarray
    gamma: float
    source: str = "unpenalized"


@dataclass
class SubspaceEstimate:
    """Fitted basis of the central subspace, one column per dimension."""

    B: np.ndarray
    fits: list
    method: str
    estimator: str
    gamma: float | None = None
    scores: list = field(default_factory=list)
    kernel: KernelEstimate | None = None

    @property
    def selected_mu(self):
        return [f.mu for f in self.fits]

    @property
    def support(self):
        return np.flatnonzero(np.any(self.B != 0.0, axis=1))


def penalty_thresholds(mu, weights):
    """Per-coordinate soft thresholds mu * w_k, keeping +inf exclusions
    intact even at mu = 0."""
    out = np.full(weights.shape, np.inf)
    finite = np.isfinite(weights)
    out[finite] = mu * weights[finite]
    return out


def _kkt_residual(grad, beta, thr):
    finite = np.isfinite(thr)
    res = 0.0
    nz = finite & (beta != 0.0)
    if np.any(nz):
        res = float(np.max(np.abs(grad[nz] + thr[nz] * np.sign(beta[nz]))))
    z = finite & (beta == 0.0)
    if np.any(z):
        res = max(res, float(np.max(np.maximum(np.abs(grad[z]) - thr[z], 0.0))))
    return res


def _sweep(G, diag, grad, beta, thr, idx):
    """One pass of coordinate minimization over idx; returns the largest
    coefficient change. grad is kept equal to G beta - c in place."""
    maxd = 0.0
    for k in idx:
        gk = diag[k]
        bk = beta[k]
        r = gk * bk - grad[k]
        t = thr[k]
        if r > t:
            nb = (r - t) / gk
        elif r < -t:
            nb = (r + t) / gk
        else:
            nb = 0.0
        d = nb - bk
        if d != 0.0:
            beta[k] = nb
            grad += G[k] * d
            ad = abs(d)
            if ad > maxd:
                maxd = ad
    return maxd


def _gram_objective(G, c, bb, thr_pen, beta):
    # 0.5*||A beta - b||^2 + penalty, written on the Gram form
    val = 0.5 * (beta @ (G @ beta)) - c @ beta + 0.5 * bb
    nz = beta != 0.0
    if np.any(nz):
        val += np.sum(thr_pen[nz] * np.abs(beta[nz]))
    return float(val)


class _FactorCache:
    """Cholesky factor of G restricted to an ordered active set.

    Columns are appended with one triangular solve each and deleted with a
    pass of Givens rotations, so a warm-started path reuses almost all of
    its factor work between penalty values. Rank-deficient blocks get an
    escalating ridge so the factor stays usable; the final KKT certificate
    is what decides whether a fit converged, so a slightly regularized
    search direction only affects the route, not the reported answer.
    """

    def __init__(self, G):
        self.G = G
        self._buf = np.zeros(G.shape)
        self.order = np.empty(0, dtype=int)
        self._jitter = 0.0

    def _rebuild(self, coords):
        m = coords.size
        S = self.G[np.ix_(coords, coords)]
        jitter = self._jitter
        scale = max(float(np.trace(S)) / max(m, 1), 1.0)
        for _ in range(30):
            try:
                Lf = np.linalg.cholesky(S if jitter == 0.0 else S + jitter * np.eye(m))
                break
            except np.linalg.LinAlgError:
                jitter = 1e-12 * scale if jitter == 0.0 else jitter * 10.0
        self._buf[:m, :m] = Lf
        self.order = coords
        self._jitter = jitter

    def set_active(self, coords):
        coords = np.asarray(coords, dtype=int)
        cur = self.order
        # match coords against the current order: an order-preserving subset
        # plus trailing additions can be handled incrementally
        ci = 0
        to_delete = []
        for pos in range(cur.size):
            if ci < coords.size and coords[ci] == cur[pos]:
                ci += 1
            else:
                to_delete.append(pos)
        tail = coords[ci:]
        if tail.size:
            member = np.zeros(self.G.shape[0], dtype=bool)
            member[cur] = True
            if member[tail].any():
                self._rebuild(coords)
                return
        # rotations only beat a fresh factorization for one deletion near
        # the end of the order
        if len(to_delete) > 1 or (to_delete
                                  and cur.size - to_delete[0] > max(cur.size // 8, 64)):
            self._rebuild(coords)
            return
        for pos in reversed(to_delete):
            self._delete(pos)
        if tail.size == 1:
            self._append(int(tail[0]))
        elif tail.size:
            self._append_block(tail)

    def _delete(self, i):
        # drop row i, then rotate the staircase below it back to triangular
        m = self.order.size
        L = self._buf
        L[i : m - 1, :m] = L[i + 1 : m, :m]
        for j in range(i, m - 1):
            a, b = L[j, j], L[j, j + 1]
            r = np.hypot(a, b)
            cth, sth = (a / r, b / r) if r > 0.0 else (1.0, 0.0)
            col = L[j : m - 1, j].copy()
            col1 = L[j : m - 1, j + 1]
            new = cth * col + sth * col1
            L[j : m - 1, j + 1] = cth * col1 - sth * col
            L[j : m - 1, j] = -new if new[0] < 0 else new
        L[: m - 1, m - 1] = 0.0
        L[m - 1, :m] = 0.0
        self.order = np.delete(self.order, i)

    def _append(self, k):
        m = self.order.size
        L = self._buf[:m, :m]
        v = solve_triangular(L, self.G[self.order, k], lower=True,
                             check_finite=False) if m else np.empty(0)
        pivot = self.G[k, k] + self._jitter - v @ v
        if pivot <= 1e-12 * max(self.G[k, k], 1.0):
            self._jitter = 1e-10 * max(self.G[k, k], 1.0) if self._jitter == 0.0 \
                else self._jitter * 10.0
            self._rebuild(np.append(self.order, k))
            return
        self._buf[m, :m] = v
        self._buf[m, m] = np.sqrt(pivot)
        self.order = np.append(self.order, k)

    def _append_block(self, ks):
        # one triangular solve for the whole tail, then a small Cholesky of
        # its Schur complement; same factor as appending one at a time
        m = self.order.size
        t = ks.size
        diag_scale = max(float(np.max(self.G[ks, ks])), 1.0)
        if m:
            V = solve_triangular(self._buf[:m, :m], self.G[np.ix_(self.order, ks)],
                                 lower=True, check_finite=False)
            S = self.G[np.ix_(ks, ks)] - V.T @ V
        else:
            V = np.empty((0, t))
            S = self.G[np.ix_(ks, ks)].copy()
        if self._jitter:
            S[np.diag_indices(t)] += self._jitter
        try:
            Ls = np.linalg.cholesky(S)
            ok = float(np.min(np.diagonal(Ls))) ** 2 > 1e-12 * diag_scale
        except np.linalg.LinAlgError:
            ok = False
        if not ok:
            self._jitter = 1e-10 * diag_scale if self._jitter == 0.0 \
                else self._jitter * 10.0
            self._rebuild(np.concatenate([self.order, ks]))
            return
        self._buf[m:m + t, :m] = V.T
        self._buf[m:m + t, m:m + t] = Ls
        self.order = np.concatenate([self.order, ks])

    def solve(self, rhs):
        m = self.order.size
        L = self._buf[:m, :m]
        y = solve_triangular(L, rhs, lower=True, check_finite=False)
        return solve_triangular(L.T, y, lower=False, check_finite=False)


def _feature_sign(G, c, thr, beta, movable, kkt_tol, cache, max_rounds=None):
    """Exact minimization by fixed-sign quadratic solves.

    Repeats three moves until the subgradient certificate holds: solve the
    penalized quadratic on the active set under the current signs, line
    search through the zero crossings of that step when a sign flips, and
    activate the worst violating zero coordinate. Each move lowers the
    objective, so the sign patterns cannot cycle. Converges in a handful of
    rounds from a warm start regardless of the conditioning of G.
    """
    p = c.shape[0]
    if max_rounds is None:
        max_rounds = 4 * p + 100
    beta = beta.copy()
    theta = np.sign(beta)
    # seed the active set in the cache's existing order so a warm start from
    # the previous path point reuses its factor instead of rebuilding
    order = cache.order
    nonzero = beta[order] != 0.0
    base = order if np.all(nonzero) else order[nonzero]
    inorder = np.zeros(p, dtype=bool)
    inorder[order] = True
    extras = np.flatnonzero((beta != 0.0) & ~inorder)
    cache.set_active(np.concatenate([base, extras]) if extras.size else base)
    dfull = np.zeros(p)
    for _ in range(max_rounds):
        o = cache.order
        if o.size:
            bstar = cache.solve(c[o] - thr[o] * theta[o])
            bold = beta[o]
            if np.any(np.sign(bstar) != theta[o]):
                # a sign flipped: move only to the best point on the segment,
                # zeroing the coordinates that cross on the way
                d = bstar - bold
                with np.errstate(divide="ignore", invalid="ignore"):
                    tc = np.where(d != 0.0, -bold / d, np.inf)
                cand = np.sort(tc[(tc > 0.0) & (tc < 1.0)])
                cand = np.concatenate([cand, [1.0]])
                dfull[:] = 0.0
                dfull[o] = d
                a = 0.5 * float(d @ (G @ dfull)[o])
                b0 = float(d @ (G @ beta - c)[o])
                pen = np.sum(thr[o, None] * np.abs(bold[:, None] + cand[None, :] * d[:, None]),
                             axis=0)
                F = a * cand**2 + b0 * cand + pen
                tbest = float(cand[int(np.argmin(F))])
                bnew = bold + tbest * d
                bnew[tc == tbest] = 0.0
                beta[o] = bnew
                theta[o] = np.sign(bnew)
                if np.any(bnew == 0.0):
                    cache.set_active(o[bnew != 0.0])
                continue
            beta[o] = bstar
        grad = G @ beta - c
        viol = np.abs(grad) - thr
        viol[~movable] = -np.inf
        if o.size:
            viol[o] = -np.inf
        worst = float(viol[int(np.argmax(viol))])
        if worst <= kkt_tol:
            return beta
        # activate the strongest violators together; any overshoot is undone
        # by a later line-search removal
        batch = np.flatnonzero(viol >= max(kkt_tol, 0.3 * worst))
        if batch.size > 50:
            top = np.argsort(viol[batch], kind="stable")[-50:]
            batch = np.sort(batch[top])
        theta[batch] = -np.sign(grad[batch])
        cache.set_active(np.concatenate([o, batch]))
    return beta


def gram_lasso(G, c, thr, beta0=None, max_iter=10000, tol=1e-8, kkt_tol=1e-7,
               bb=0.0, record_objective=False, cache=None, rescue_after=30,
               inner_cap=10):
    """Coordinate descent on the Gram form with thresholds thr = mu * w.

    Sweeps run over screened active sets only; a fit that plain sweeping
    cannot certify within rescue_after of them is finished by the exact
    fixed-sign method instead. Passing a shared factor cache speeds that
    rescue up across the calls of a warm-started path.

    Returns (beta, kkt_residual, sweeps, converged, objective_path).
    """
    p = c.shape[0]
    diag = np.ascontiguousarray(np.diag(G)).copy()
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=float)
    movable = np.isfinite(thr) & (diag > 0.0)
    beta[~movable] = 0.0
    mov_idx = np.flatnonzero(movable)
    mov_thr = thr[mov_idx]
    path = []
    it = 0
    converged = False

    if mov_idx.size and np.all(mov_thr == 0.0):
        # no penalty on the movable block: solve it directly
        sub = G[np.ix_(mov_idx, mov_idx)]
        try:
            Lf = np.linalg.cholesky(sub)
            sol = solve_triangular(Lf.T, solve_triangular(Lf, c[mov_idx], lower=True,
                                                          check_finite=False),
                                   lower=False, check_finite=False)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(sub, c[mov_idx], rcond=None)
        beta[mov_idx] = sol
    else:
        work_tol = tol
        prev_kkt = np.inf
        grad = G @ beta - c
        while it < max_iter:
            # screening round on a fresh gradient: certify, or activate
            # every coordinate whose subgradient condition is violated
            kkt = _kkt_residual(grad, beta, thr)
            if kkt <= kkt_tol:
                converged = True
                break
            if it >= rescue_after:
                beta = _feature_sign(G, c, thr, beta, movable, kkt_tol,
                                     _FactorCache(G) if cache is None else cache)
                if record_objective:
                    path.append(_gram_objective(G, c, bb, thr, beta))
                break
            if kkt >= prev_kkt:
                # no progress since the last round; the inner tolerance is
                # too loose for this conditioning
                work_tol *= 0.1
                if work_tol < 1e-15:
                    break
            prev_kkt = kkt
            active = mov_idx[(beta[mov_idx] != 0.0) | (np.abs(grad[mov_idx]) > mov_thr)]
            if active.size == 0:
                break
            sweeps = 0
            while it < max_iter and sweeps < inner_cap:
                it += 1
                sweeps += 1
                maxd = _sweep(G, diag, grad, beta, thr, active)
                if record_objective:
                    path.append(_gram_objective(G, c, bb, thr, beta))
                if maxd < work_tol:
                    break
            grad = G @ beta - c  # drop accumulated update error before re-screening
    beta[np.abs(beta) < ZERO_SNAP] = 0.0
    grad = G @ beta - c
    kkt = _kkt_residual(grad, beta, thr)
    if not converged:
        converged = kkt <= kkt_tol
    if record_objective and not path:
        path.append(_gram_objective(G, c, bb, thr, beta))
    return beta, kkt, it, converged, tuple(path)


def solve_lasso(problem, max_iter=10000, tol=1e-8, kkt_tol=1e-7, beta0=None,
                record_objective=False):
    """Solve a weighted lasso problem and certify the result via its
    subgradient conditions. Never raises on slow convergence: the best
    iterate is returned with converged=False."""
    A, b, mu, w = problem.validated()
    G = A.T @ A
    c = A.T @ b
    thr = penalty_thresholds(mu, w)
    beta, kkt, it, conv, path = gram_lasso(
        G, c, thr, beta0=beta0, max_iter=max_iter, tol=tol, kkt_tol=kkt_tol,
        bb=float(b @ b), record_objective=record_objective,
    )
    return SparseFit(beta=beta, mu=mu, support=np.flatnonzero(beta),
                     kkt_residual=kkt, iterations=it, converged=conv,
                     objective_path=path)


class _PathWarmStart:
    """Warm starts for a path solved from the most penalized end down.

    Keeps the last two solutions; while the support and signs persist the
    solution is affine in the penalty, so the next start is an exact
    extrapolation that usually certifies without any further solving.
    """

    def __init__(self, mus):
        self.mus = np.asarray(mus, dtype=float)
        self._last = None
        self._older = None

    def start(self, i):
        if self._last is None:
            return None
        i1, b1 = self._last
        if self._older is None:
            return b1
        i2, b2 = self._older
        if not np.array_equal(np.sign(b1), np.sign(b2)):
            return b1
        m, m1, m2 = self.mus[i], self.mus[i1], self.mus[i2]
        out = b1 + (m - m1) / (m1 - m2) * (b1 - b2)
        # a flipped sign means the pattern is changing; start from the
        # neighbor instead
        if np.array_equal(np.sign(out), np.sign(b1)):
            return out
        return b1

    def record(self, i, beta):
        self._older = self._last
        self._last = (i, beta.copy())


def gram_lasso_path(G, c, weights, mus, max_iter=10000, tol=1e-8, kkt_tol=1e-7, bb=0.0):
    """Warm-started fits at every value of mus (given ascending), solved
    from the most penalized end down. Returns fits aligned with mus."""
    mus = np.asarray(mus, dtype=float)
    w = np.ones(c.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    fits = [None] * mus.size
    cache = _FactorCache(G)
    warm = _PathWarmStart(mus)
    rescue_after = 30
    for i in range(mus.size - 1, -1, -1):
        thr = penalty_thresholds(mus[i], w)
        beta, kkt, it, conv, _ = gram_lasso(
            G, c, thr, beta0=warm.start(i), max_iter=max_iter, tol=tol,
            kkt_tol=kkt_tol, bb=bb, cache=cache, rescue_after=rescue_after,
        )
        if it >= rescue_after:
            # sweeping stalled here, and smaller penalties only get harder;
            # go straight to the exact method for the rest of the path
            rescue_after = 0
        warm.record(i, beta)
        fits[i] = SparseFit(beta=beta.copy(), mu=float(mus[i]),
                            support=np.flatnonzero(beta), kkt_residual=kkt,
                            iterations=it, converged=conv)
    return fits


def unpenalized(Sigma_hat, eta_j):
    """Dense estimate solving Sigma_hat beta = eta_j through the Cholesky
    factor. Requires n > p so the sample covariance is positive definite."""
    L = cholesky(Sigma_hat)
    return solve_upper(L.T, solve_lower(L, np.asarray(eta_j, dtype=float)))


def adaptive_weights(beta_bar, gamma):
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    beta_bar = np.asarray(beta_bar, dtype=float)
    with np.errstate(divide="ignore"):
        omega = np.abs(beta_bar) ** (-float(gamma))
    omega[beta_bar == 0.0] = np.inf
    return AdaptiveWeights(omega=omega, gamma=float(gamma))


def _weights_array(weights, p):
    if weights is None:
        return None
    if isinstance(weights, AdaptiveWeights):
        return weights.omega
    w = np.asarray(weights, dtype=float)
    if w.shape != (p,):
        raise DimensionMismatch(f"weights shape {w.shape} does not match p={p}")
    return w


def chomp(L_hat, eta_j, mu, weights=None, **solver_options):
    """Sparse dimension estimate from the lasso regression of kappa on the
    transposed Cholesky factor, where L_hat kappa = eta_j. Uniform weights
    give the plain estimator, adaptive weights the weighted variant."""
    eta_j = np.asarray(eta_j, dtype=float)
    kappa = solve_lower(L_hat, eta_j)
    problem = LassoProblem(A=np.asarray(L_hat, dtype=float).T, b=kappa, mu=mu,
                           weights=_weights_array(weights, eta_j.shape[0]))
    return solve_lasso(problem, **solver_options)


def matrix_lasso(Sigma_hat, eta_j, mu, **solver_options):
    """Lasso with the sample covariance as design and the eigenvector as
    target. Unlike the Cholesky form, its useful tuning range grows with
    ||Sigma_hat eta_j||_inf rather than staying inside [0, 1]."""
    problem = LassoProblem(A=np.asarray(Sigma_hat, dtype=float),
                           b=np.asarray(eta_j, dtype=float), mu=mu)
    return solve_lasso(problem, **solver_options)


def lasso_sir(dataset, ytilde, mu, **solver_options):
    """Lasso of the slice-constant working response on the centered design,
    scaled so the objective carries the 1/n factor."""
    if not dataset.centered:
        raise ValueError("dataset must be centered")
    values = ytilde.values if isinstance(ytilde, PseudoResponse) else np.asarray(ytilde, dtype=float)
    root_n = np.sqrt(dataset.n)
    problem = LassoProblem(A=dataset.X / root_n, b=values / root_n, mu=mu)
    return solve_lasso(problem, **solver_options)


def _dense_fit(Sigma, eta_j):
    beta = unpenalized(Sigma, eta_j)
    resid = float(np.max(np.abs(Sigma @ beta - eta_j)))
    return SparseFit(beta=beta, mu=0.0, support=np.flatnonzero(beta),
                     kkt_residual=resid, iterations=0, converged=True)


def kernel_estimate(dataset, method, d, H):
    """Kernel matrix and top-d eigenpairs for one method, slicing by the
    response where the method requires it."""
    if method == kernels.SIR:
        slices = kernels.assign_slices(dataset.y, H)
        return kernels.kernel_sir(dataset, slices, d=d), slices
    if method == kernels.SAVE:
        slices = kernels.assign_slices(dataset.y, H)
        return kernels.kernel_save(dataset, slices, d=d), slices
    if method == kernels.PHD:
        return kernels.kernel_phd(dataset, d=d), None
    raise ValueError(f"unknown method {method!r}; use one of {kernels.METHODS}")


def fit_subspace(dataset, method, estimator, d, H=20, tuning=None, gamma=2.0,
                 max_iter=10000, tol=1e-8, kkt_tol=1e-7):
    """Estimate a p x d basis of the central subspace.

    Each dimension is fitted and tuned independently. The tuning policy
    defaults to the projection criterion for the penalized estimators and
    ten-fold cross-validation for the Lasso formulation of SIR.
    """
    from . import tuning as tuning_mod

    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; use one of {ESTIMATORS}")
    if estimator == "lasso-sir" and method != kernels.SIR:
        raise ValueError("the lasso-sir estimator is only defined for the sir method")

    est, slices = kernel_estimate(dataset, method, d, H)
    Sigma = kernels.sample_covariance(dataset)
    policy = tuning_mod.resolve_policy(tuning, estimator)
    solver_kw = dict(max_iter=max_iter, tol=tol, kkt_tol=kkt_tol)

    fits, scores = [], []
    n, p = dataset.n, dataset.p

    L = G = None
    if estimator in ("chomp", "adaptive-chomp"):
        L = cholesky(Sigma)
        G = L @ L.T
    elif estimator == "matrix-lasso":
        G = Sigma @ Sigma

    for j in range(d):
        eta = est.eigen.vectors[:, j]
        lam = float(est.eigen.values[j])

        if estimator == "unpenalized":
            fits.append(_dense_fit(Sigma, eta))
            scores.append(None)
            continue

        if estimator == "lasso-sir":
            ytilde = kernels.pseudo_response(dataset, slices, eta, lam, dimension=j)
            if policy.kind == "cv":
                seed = np.random.SeedSequence(policy.seed, spawn_key=(j,))
                fit, curve = tuning_mod.cross_validate_lasso_sir(
                    dataset, ytilde, folds=policy.folds, grid=policy.grid_values(),
                    seed=seed, **solver_kw)
                fits.append(fit)
                scores.append(curve)
                continue
            root_n = np.sqrt(n)
            A = dataset.X / root_n
            G_j, c_j, bb = A.T @ A, A.T @ (ytilde.values / root_n), float(ytilde.values @ ytilde.values / n)
            weights = None
        elif estimator in ("chomp", "adaptive-chomp"):
            kappa = solve_lower(L, eta)
            G_j, c_j, bb = G, L @ kappa, float(kappa @ kappa)
            weights = None
            if estimator == "adaptive-chomp":
                weights = adaptive_weights(solve_upper(L.T, kappa), gamma).omega
        else:  # matrix-lasso
            G_j, c_j, bb = G, Sigma @ eta, float(eta @ eta)
            weights = None

        if policy.kind == "pic":
            beta_bar = unpenalized(Sigma, eta)
            # Anchor the relative grid to the smallest penalty that zeroes
            # every coordinate, so the candidate path always spans the full
            # range from near-unpenalized to all-zero regardless of the
            # scale of the estimating equations or of the adaptive weights.
            w = np.ones(p) if weights is None else weights
            thresholds = np.abs(c_j) / w
            scale = float(np.max(thresholds[np.isfinite(thresholds)]))
            grid = policy.grid_values() * scale
            fit, score = tuning_mod.select_pic(
                lambda mus: gram_lasso_path(G_j, c_j, weights, mus, bb=bb, **solver_kw),
                beta_bar, policy, grid=grid)
            fits.append(fit)
            scores.append(score)
        elif policy.kind in ("fixed", "theory"):
            mu = policy.mu if policy.kind == "fixed" else tuning_mod.theoretical_mu(
                n, p, lam, scale=policy.scale)
            thr = penalty_thresholds(mu, np.ones(p) if weights is None else weights)
            beta, kkt, it, conv, _ = gram_lasso(G_j, c_j, thr, bb=bb, **solver_kw)
            fits.append(SparseFit(beta=beta, mu=float(mu), support=np.flatnonzero(beta),
                                  kkt_residual=kkt, iterations=it, converged=conv))
            scores.append(None)
        else:
            raise ValueError(f"tuning kind {policy.kind!r} is not available for {estimator}")

    B = np.column_stack([f.beta for f in fits])
    if not np.any(B != 0.0):
        raise AllDimensionsZero("every fitted dimension is the zero vector")
    return SubspaceEstimate(B=B, fits=fits, method=method, estimator=estimator,
                            gamma=gamma if estimator == "adaptive-chomp" else None,
                            scores=scores, kernel=est)
