"""Linear estimators for the statement-window regression.

OLS with HC3 sandwich covariance, ridge and lasso on standardized
regressors, and leave-one-out ridge evaluation. Every design carries an
intercept in column 0; penalized fits never shrink it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, special

from .errors import InsufficientData, LeverageOne, NoConvergence, SingularDesign, ZeroVariance

OLS_HC3 = "OLS-HC3"
RIDGE = "Ridge"
LASSO = "Lasso"
RIDGE_LOO = "RidgeLOO"
ESTIMATORS = (OLS_HC3, RIDGE, LASSO, RIDGE_LOO)

COND_LIMIT = 1e10
LEVERAGE_EPS = 1e-10
DEFAULT_RIDGE_GRID = tuple(float(x) for x in np.logspace(-3, 3, 13))


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    y: np.ndarray
    column_names: tuple

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: X{X.shape}, y{y.shape}")
        n, k = X.shape
        names = tuple(self.column_names)
        if len(names) != k:
            raise ValueError(f"{len(names)} column names for {k} columns")
        if n <= k:
            raise ValueError(f"need n > k, got n={n}, k={k}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("design contains non-finite values")
        if k == 0 or not np.all(X[:, 0] == 1.0):
            raise ValueError("column 0 must be an intercept of ones")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "column_names", names)

    @classmethod
    def from_columns(cls, y, columns: dict, intercept: str = "const") -> "DesignMatrix":
        y = np.asarray(y, dtype=float)
        cols = [np.ones_like(y)] + [np.asarray(v, dtype=float) for v in columns.values()]
        return cls(np.column_stack(cols), y, (intercept,) + tuple(columns))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]


@dataclass
class FitResult:
    estimator_tag: str
    column_names: tuple
    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    r2: float
    rmse: float
    sign_accuracy: float
    hc3_se: Optional[np.ndarray] = None
    t_stats: Optional[np.ndarray] = None
    p_values: Optional[np.ndarray] = None
    cov: Optional[np.ndarray] = None
    lam: Optional[float] = None
    sweeps: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.residuals)

    @property
    def k(self) -> int:
        return len(self.coefficients)

    @property
    def df_resid(self) -> int:
        return self.n - self.k

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.column_names.index(name)])

    def conf_int(self, level: float = 0.95):
        """t-based interval from the HC3 standard errors (OLS only)."""
        if self.hc3_se is None:
            raise ValueError(f"{self.estimator_tag} fit has no standard errors")
        q = t_quantile(0.5 + level / 2.0, self.df_resid)
        return self.coefficients - q * self.hc3_se, self.coefficients + q * self.hc3_se


# -- distribution helpers -----------------------------------------------------

def t_two_sided_pvalue(t, df):
    """P(|T| >= |t|) for Student-t with ``df`` degrees of freedom.

    Uses the identity P = I_x(df/2, 1/2) with x = df / (df + t^2).
    """
    t = np.asarray(t, dtype=float)
    x = df / (df + t * t)
    return special.betainc(0.5 * df, 0.5, x)


def t_quantile(p, df):
    return special.stdtrit(df, p)


# -- fit statistics -----------------------------------------------------------

def metrics(y, yhat) -> tuple[float, float, float]:
    """R^2, RMSE and sign accuracy (percent).

    Sign accuracy counts exact sign agreement, with sign(0) = 0, so a zero
    prediction only matches a zero outcome.
    """
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.shape != yhat.shape or y.ndim != 1:
        raise ValueError("y and yhat must be 1-d arrays of equal length")
    if len(y) < 2:
        raise InsufficientData("metrics need at least 2 observations")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise ZeroVariance("target has zero variance; R^2 is undefined")
    sse = float(np.sum((y - yhat) ** 2))
    r2 = 1.0 - sse / sst
    rmse = float(np.sqrt(sse / len(y)))
    sign_acc = 100.0 * float(np.mean(np.sign(yhat) == np.sign(y)))
    return r2, rmse, sign_acc


# -- OLS ----------------------------------------------------------------------

def _check_conditioning(M, limit, what):
    with np.errstate(all="ignore"):
        c = np.linalg.cond(M)
    if not np.isfinite(c) or c > limit:
        raise SingularDesign(f"{what} is singular or ill-conditioned (cond={c:.3g})")


def hat_diagonal(X) -> np.ndarray:
    Q, _ = np.linalg.qr(np.asarray(X, dtype=float), mode="reduced")
    return np.einsum("ij,ij->i", Q, Q)


def sandwich_cov(X, resid, kind: str = "HC3", leverage=None) -> np.ndarray:
    """Heteroskedasticity-consistent covariance (HC0 to HC3)."""
    X = np.asarray(X, dtype=float)
    e = np.asarray(resid, dtype=float)
    n, k = X.shape
    if leverage is None and kind in ("HC2", "HC3"):
        leverage = hat_diagonal(X)
    if kind == "HC0":
        w = e**2
    elif kind == "HC1":
        w = e**2 * n / (n - k)
    elif kind == "HC2":
        w = e**2 / (1.0 - leverage)
    elif kind == "HC3":
        w = e**2 / (1.0 - leverage) ** 2
    else:
        raise ValueError(f"unknown covariance type {kind!r}")
    bread = np.linalg.inv(X.T @ X)
    meat = (X * w[:, None]).T @ X
    return bread @ meat @ bread


def fit_ols(D: DesignMatrix, cond_limit: float = COND_LIMIT) -> FitResult:
    X, y = D.X, D.y
    XtX = X.T @ X
    _check_conditioning(XtX, cond_limit, "X'X")
    Q, R = np.linalg.qr(X, mode="reduced")
    beta = linalg.solve_triangular(R, Q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    h = np.einsum("ij,ij->i", Q, Q)
    if np.any(h >= 1.0 - LEVERAGE_EPS):
        i = int(np.argmax(h))
        raise LeverageOne(f"observation {i} has leverage {h[i]:.12g}")
    Rinv = linalg.solve_triangular(R, np.eye(D.k))
    bread = Rinv @ Rinv.T
    w = resid**2 / (1.0 - h) ** 2
    cov = bread @ ((X * w[:, None]).T @ X) @ bread
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = beta / se
    pvals = t_two_sided_pvalue(tstat, D.n - D.k)
    r2, rmse, sacc = metrics(y, fitted)
    return FitResult(
        estimator_tag=OLS_HC3,
        column_names=D.column_names,
        coefficients=beta,
        fitted=fitted,
        residuals=resid,
        r2=r2,
        rmse=rmse,
        sign_accuracy=sacc,
        hc3_se=se,
        t_stats=tstat,
        p_values=pvals,
        cov=cov,
        extra={"leverage": h},
    )


# -- penalized fits -------------------------------------------------------------

def _standardize(X):
    """Center and scale non-intercept columns with the population (1/n) sd."""
    Xn = X[:, 1:]
    mu = Xn.mean(axis=0)
    sd = Xn.std(axis=0)
    if np.any(sd == 0.0):
        bad = [int(j) + 1 for j in np.flatnonzero(sd == 0.0)]
        raise SingularDesign(f"constant regressor column(s) {bad} cannot be standardized")
    return (Xn - mu) / sd, mu, sd


def _unstandardize(b, mu, sd, ybar):
    beta = b / sd
    return np.concatenate(([ybar - mu @ beta], beta))


def _ridge_coefficients(X, y, lam, cond_limit=COND_LIMIT):
    Z, mu, sd = _standardize(X)
    ybar = y.mean()
    A = Z.T @ Z + lam * np.eye(Z.shape[1])
    if lam == 0.0:
        _check_conditioning(A, cond_limit, "Z'Z")
    b = np.linalg.solve(A, Z.T @ (y - ybar))
    return _unstandardize(b, mu, sd, ybar)


def _penalized_result(tag, D, beta, lam, **kw):
    fitted = D.X @ beta
    r2, rmse, sacc = metrics(D.y, fitted)
    return FitResult(
        estimator_tag=tag,
        column_names=D.column_names,
        coefficients=beta,
        fitted=fitted,
        residuals=D.y - fitted,
        r2=r2,
        rmse=rmse,
        sign_accuracy=sacc,
        lam=float(lam),
        **kw,
    )


def fit_ridge(D: DesignMatrix, lam: float = 1.0) -> FitResult:
    """Ridge on standardized regressors, coefficients on the original scale.

    Solves (Z'Z + lam I) b = Z'(y - ybar); the intercept is unpenalized.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    beta = _ridge_coefficients(D.X, D.y, float(lam))
    return _penalized_result(RIDGE, D, beta, lam)


def soft_threshold(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def lasso_null_lambda(D: DesignMatrix) -> float:
    """Smallest lambda at which every slope is zero."""
    Z, _, _ = _standardize(D.X)
    return float(np.max(np.abs(Z.T @ (D.y - D.y.mean()))) / D.n)


def lasso_kkt_violation(G, c, b, lam) -> float:
    """Largest stationarity violation of (1/2n)|yc - Zb|^2 + lam |b|_1."""
    g = c - G @ b
    active = b != 0.0
    viol = np.where(active, np.abs(g - lam * np.sign(b)), np.maximum(np.abs(g) - lam, 0.0))
    return float(viol.max()) if viol.size else 0.0


def fit_lasso(
    D: DesignMatrix,
    lam: float = 1.0,
    tol: float = 1e-8,
    max_sweeps: int = 100_000,
    kkt_tol: float = 1e-6,
) -> FitResult:
    """Cyclic coordinate descent with soft-thresholding.

    Objective on the standardized scale: (1/2n)|y - ybar - Zb|^2 + lam |b|_1.
    With unit (1/n) column variance each coordinate update is a plain
    soft-threshold of the partial gradient.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    Z, mu, sd = _standardize(D.X)
    n, p = Z.shape
    ybar = D.y.mean()
    G = Z.T @ Z / n
    c = Z.T @ (D.y - ybar) / n
    b = np.zeros(p)
    g = c.copy()  # c - G b
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            rho = g[j] + G[j, j] * b[j]
            new = float(soft_threshold(rho, lam) / G[j, j])
            delta = new - b[j]
            if delta != 0.0:
                g -= G[:, j] * delta
                b[j] = new
                max_delta = max(max_delta, abs(delta))
        if max_delta < tol:
            break
    viol = lasso_kkt_violation(G, c, b, lam)
    if viol > kkt_tol:
        raise NoConvergence(
            f"lasso stopped after {sweeps} sweeps with KKT violation {viol:.3g}",
            sweeps=sweeps,
            max_violation=viol,
        )
    beta = _unstandardize(b, mu, sd, ybar)
    return _penalized_result(
        LASSO, D, beta, lam, sweeps=sweeps, extra={"kkt_violation": viol, "standardized": b}
    )


# -- leave-one-out ridge --------------------------------------------------------

def loo_ridge_predictions(D: DesignMatrix, lam: float = 1.0) -> np.ndarray:
    """Out-of-fold predictions from n literal ridge refits.

    Standardization is recomputed inside every fold.
    """
    if D.n < 3:
        raise InsufficientData("leave-one-out needs n >= 3")
    preds = np.empty(D.n)
    idx = np.arange(D.n)
    for i in range(D.n):
        keep = idx != i
        beta = _ridge_coefficients(D.X[keep], D.y[keep], float(lam))
        preds[i] = D.X[i] @ beta
    return preds


def loo_ridge(D: DesignMatrix, lam: float = 1.0) -> FitResult:
    """Leave-one-out evaluation of ridge at a fixed lambda.

    Coefficients are the full-sample ridge fit; fitted values, residuals and
    metrics are out of fold. R^2 is taken about the full-sample mean and can
    be negative.
    """
    preds = loo_ridge_predictions(D, lam)
    beta = _ridge_coefficients(D.X, D.y, float(lam))
    r2, rmse, sacc = metrics(D.y, preds)
    return FitResult(
        estimator_tag=RIDGE_LOO,
        column_names=D.column_names,
        coefficients=beta,
        fitted=preds,
        residuals=D.y - preds,
        r2=r2,
        rmse=rmse,
        sign_accuracy=sacc,
        lam=float(lam),
    )


def select_ridge_lambda(D: DesignMatrix, grid: Sequence[float] = DEFAULT_RIDGE_GRID) -> float:
    """Grid lambda with the lowest LOO RMSE; ties go to the larger lambda."""
    best = None
    for lam in sorted(grid):
        preds = loo_ridge_predictions(D, lam)
        rmse = float(np.sqrt(np.mean((D.y - preds) ** 2)))
        if best is None or rmse <= best[1]:
            best = (lam, rmse)
    if best is None:
        raise ValueError("empty lambda grid")
    return float(best[0])
