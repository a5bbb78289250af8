"""Independent reference implementations used only by the test suite.

Everything here is deliberately brute-force and shares no code with the
package: small-p lasso problems are solved by enumerating subgradient sign
patterns, and statistics are recomputed with explicit double loops.
"""

import itertools

import numpy as np


def lasso_sign_enumeration(A, b, mu, weights=None, feas_tol=1e-9):
    """Exact weighted-lasso minimizer for p <= 5 via sign-pattern search.

    For each pattern s in {-1, 0, +1}^p, solve the stationarity system on
    the coordinates with s_k != 0, then keep the pattern whose solution is
    sign-consistent and satisfies the zero-coordinate subgradient bound.
    Returns the feasible candidate with the lowest objective.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    p = A.shape[1]
    if p > 5:
        raise ValueError("enumeration oracle is limited to p <= 5")
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    G = A.T @ A
    c = A.T @ b

    free = [k for k in range(p) if np.isfinite(w[k])]
    best_beta, best_obj = None, np.inf
    for pattern in itertools.product((-1, 0, 1), repeat=len(free)):
        s = np.zeros(p)
        for k, sk in zip(free, pattern):
            s[k] = sk
        act = np.flatnonzero(s != 0)
        beta = np.zeros(p)
        if act.size:
            rhs = c[act] - mu * w[act] * s[act]
            try:
                sol = np.linalg.solve(G[np.ix_(act, act)], rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(sol * s[act] <= 0):
                continue
            beta[act] = sol
        grad = G @ beta - c
        ok = True
        for k in free:
            if s[k] == 0 and abs(grad[k]) > mu * w[k] + feas_tol:
                ok = False
                break
        if not ok:
            continue
        resid = A @ beta - b
        nz = beta != 0
        obj = 0.5 * resid @ resid + mu * np.sum(w[nz] * np.abs(beta[nz]))
        if obj < best_obj:
            best_obj, best_beta = obj, beta
    return best_beta, best_obj


def lasso_objective(A, b, mu, beta, weights=None):
    w = np.ones(A.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    r = A @ beta - b
    nz = beta != 0
    return 0.5 * r @ r + mu * np.sum(w[nz] * np.abs(beta[nz]))


def distance_correlation_loops(U, y):
    """O(n^2) double-loop sample distance correlation."""
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    y = np.asarray(y, dtype=float)
    n = U.shape[0]
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            a[i, j] = np.sqrt(np.sum((U[i] - U[j]) ** 2))
            b[i, j] = abs(y[i] - y[j])

    def center(m):
        out = np.zeros_like(m)
        grand = m.mean()
        for i in range(n):
            for j in range(n):
                out[i, j] = m[i, j] - m[i].mean() - m[:, j].mean() + grand
        return out

    Ac, Bc = center(a), center(b)
    dcov2 = (Ac * Bc).mean()
    dvarx = (Ac * Ac).mean()
    dvary = (Bc * Bc).mean()
    if dvarx <= 0 or dvary <= 0:
        return 0.0
    return np.sqrt(max(dcov2, 0.0)) / (dvarx * dvary) ** 0.25


def banded_regressions_loops(X, K):
    """Sequential banded regressions, implemented with explicit per-column
    least squares and no shared code with the package."""
    n, p = X.shape
    C = np.eye(p)
    resid = np.zeros((n, p))
    dvals = np.zeros(p)
    resid[:, 0] = X[:, 0]
    dvals[0] = resid[:, 0] @ resid[:, 0] / n
    for j in range(1, p):
        lo = max(0, j - K)
        Z = resid[:, lo:j]
        if Z.shape[1] == 0:
            e = X[:, j]
        else:
            coef = np.linalg.pinv(Z) @ X[:, j]
            C[j, lo:j] = coef
            e = X[:, j] - Z @ coef
        resid[:, j] = e
        dvals[j] = e @ e / n
    return C, np.diag(dvals), resid
