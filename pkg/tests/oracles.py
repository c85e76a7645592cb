"""Independent reference computations for the estimator tests.

Everything here is written from the textbook formulas and avoids the
package's own linear algebra. Exact paths use ``fractions.Fraction``.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy import integrate


def to_frac(a):
    return [[Fraction(float(v)) for v in row] for row in np.atleast_2d(a)]


def frac_vec(v):
    return [Fraction(float(x)) for x in v]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def solve(A, b):
    """Gauss-Jordan elimination with exact pivots; A square, b a vector."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def inverse(A):
    n = len(A)
    M = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def ols_exact(X, y):
    """Coefficients, residuals, leverages and HC3 SEs, exactly (SEs via float sqrt at the end)."""
    Xf, yf = to_frac(X), frac_vec(y)
    Xt = transpose(Xf)
    XtX = matmul(Xt, Xf)
    Xty = [sum(a * b for a, b in zip(row, yf)) for row in Xt]
    beta = solve(XtX, Xty)
    resid = [yi - sum(a * b for a, b in zip(row, beta)) for row, yi in zip(Xf, yf)]
    inv = inverse(XtX)
    k = len(XtX)
    # a_i = (X'X)^-1 x_i; leverage h_i = x_i' a_i
    a = [[sum(inv[r][c] * row[c] for c in range(k)) for r in range(k)] for row in Xf]
    h = [sum(x * ai for x, ai in zip(row, arow)) for row, arow in zip(Xf, a)]
    w = [e * e / ((1 - hi) ** 2) for e, hi in zip(resid, h)]
    # HC3 variance of beta_j is sum_i w_i a_ij^2; every term is exact and non-negative
    se = [math.sqrt(math.fsum(float(wi * arow[j] ** 2) for wi, arow in zip(w, a))) for j in range(k)]
    return beta, resid, h, se


def ridge_exact(X, y, lam):
    """Ridge with standardized-scale penalty, solved on the raw scale.

    Penalizing lam * |b_std|^2 with b_std_j = sd_j * beta_j (population sd)
    gives (X'X + lam diag(0, var_1, ..., var_p)) beta = X'y once the
    intercept absorbs the centering.
    """
    Xf, yf = to_frac(X), frac_vec(y)
    n, k = len(Xf), len(Xf[0])
    Xt = transpose(Xf)
    A = matmul(Xt, Xf)
    for j in range(1, k):
        mean = sum(Xt[j]) / n
        var = sum((v - mean) ** 2 for v in Xt[j]) / n
        A[j][j] += Fraction(lam) * var
    rhs = [sum(a * b for a, b in zip(row, yf)) for row in Xt]
    return solve(A, rhs)


def standardized(X, y):
    Z = X[:, 1:]
    mu = Z.mean(axis=0)
    sd = np.sqrt(((Z - mu) ** 2).mean(axis=0))
    return (Z - mu) / sd, y - y.mean(), mu, sd


def lasso_enumerate(X, y, lam):
    """Lasso on the standardized scale by trying every active set and sign pattern."""
    Z, yc, _, _ = standardized(np.asarray(X, float), np.asarray(y, float))
    n, p = Z.shape
    G = Z.T @ Z / n
    c = Z.T @ yc / n
    best = None
    for size in range(p + 1):
        for S in itertools.combinations(range(p), size):
            for signs in itertools.product((-1.0, 1.0), repeat=size):
                b = np.zeros(p)
                if size:
                    S_ = list(S)
                    b[S_] = np.linalg.solve(G[np.ix_(S_, S_)], c[S_] - lam * np.array(signs))
                    if np.any(np.sign(b[S_]) != np.array(signs)):
                        continue
                g = c - G @ b
                off = [j for j in range(p) if j not in S]
                if off and np.max(np.abs(g[off])) > lam + 1e-12:
                    continue
                obj = lasso_objective(Z, yc, b, lam)
                if best is None or obj < best[0]:
                    best = (obj, b)
    return best[1]


def lasso_objective(Z, yc, b, lam):
    r = yc - Z @ b
    return float(r @ r / (2 * len(yc)) + lam * np.abs(b).sum())


def loo_refit(X, y, lam):
    """Literal leave-one-out: standardize, solve and predict once per held-out row."""
    X, y = np.asarray(X, float), np.asarray(y, float)
    n = len(y)
    out = np.empty(n)
    for i in range(n):
        keep = np.array([j != i for j in range(n)])
        Xk, yk = X[keep], y[keep]
        Z, yc, mu, sd = standardized(Xk, yk)
        b = np.linalg.solve(Z.T @ Z + lam * np.eye(Z.shape[1]), Z.T @ yc)
        out[i] = yk.mean() + ((X[i, 1:] - mu) / sd) @ b
    return out


def t_pvalue_quadrature(t, df):
    """Two-sided Student-t p-value by integrating the density."""
    logc = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    dens = lambda x: math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))  # noqa: E731
    tail, _ = integrate.quad(dens, abs(t), np.inf, epsabs=1e-14, epsrel=1e-12)
    return 2 * tail


def random_design(rng, n, k, grid=2**-10):
    """Intercept plus k-1 Gaussian regressors and a linear target, on a dyadic grid."""
    Z = rng.normal(size=(n, k - 1)) * rng.uniform(0.5, 5.0, size=k - 1) + rng.normal(size=k - 1)
    X = np.column_stack([np.ones(n), Z])
    beta = rng.normal(scale=2.0, size=k)
    y = X @ beta + rng.normal(scale=rng.uniform(0.2, 3.0), size=n) * (1 + np.abs(Z[:, 0]) if k > 1 else 1)
    X[:, 1:] = np.round(X[:, 1:] / grid) * grid
    y = np.round(y / grid) * grid
    return X, y
