"""Linear regression with classic, Newey-West, and within-entity inference.

Solving goes through QR with column pivoting, with rank decided at a
relative tolerance of 1e-10, so near-collinear macro controls fail loudly
instead of silently exploding. Newey-West uses Bartlett weights
1 - l/(L+1) and no small-sample degrees-of-freedom correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import stats

from .errors import EstimationError
from .panel import RegressionFrame

RANK_RTOL = 1e-10


@dataclass
class RegressionResult:
    names: list[str]
    beta: np.ndarray
    cov: np.ndarray
    r_squared: float
    n_obs: int
    estimator: str
    residuals: np.ndarray
    df_resid: int
    extras: dict = field(default_factory=dict)

    @property
    def tstats(self) -> np.ndarray:
        se = np.sqrt(np.diag(self.cov))
        return self.beta / se

    @property
    def pvalues(self) -> np.ndarray:
        return 2.0 * stats.t.sf(np.abs(self.tstats), self.df_resid)

    def coef(self, name: str) -> float:
        return float(self.beta[self.names.index(name)])

    def tstat(self, name: str) -> float:
        return float(self.tstats[self.names.index(name)])


def _qr_solve(X: np.ndarray, y: np.ndarray, names: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Least squares via pivoted QR; raises naming the dependent columns."""
    n, k = X.shape
    q, r, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = RANK_RTOL * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < k:
        dependent = [names[j] for j in piv[rank:]]
        raise EstimationError(
            f"design matrix is rank deficient (rank {rank} of {k}); "
            f"dependent column set: {dependent}"
        )
    qty = q.T @ y
    beta_piv = scipy.linalg.solve_triangular(r, qty)
    beta = np.empty(k)
    beta[piv] = beta_piv
    # (X'X)^-1 = P R^-1 R^-T P'
    rinv = scipy.linalg.solve_triangular(r, np.eye(k))
    xtx_inv_piv = rinv @ rinv.T
    xtx_inv = np.empty((k, k))
    xtx_inv[np.ix_(piv, piv)] = xtx_inv_piv
    return beta, xtx_inv


def ols(frame: RegressionFrame, intercept: bool = True) -> RegressionResult:
    """OLS with classic covariance s^2 (X'X)^-1, s^2 = RSS / (n - k).

    R-squared is measured against the intercept-only baseline when an
    intercept is included, against zero otherwise.
    """
    y = np.asarray(frame.y, dtype=float)
    X = np.asarray(frame.X, dtype=float)
    names = list(frame.columns)
    if intercept:
        X = np.column_stack([np.ones(len(y)), X])
        names = ["const"] + names
    n, k = X.shape
    if n < k + 1:
        raise EstimationError(f"need at least {k + 1} observations for {k} parameters, have {n}")
    beta, xtx_inv = _qr_solve(X, y, names)
    resid = y - X @ beta
    rss = float(resid @ resid)
    df = n - k
    s2 = rss / df
    cov = s2 * xtx_inv
    baseline = y - y.mean() if intercept else y
    tss = float(baseline @ baseline)
    r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0 else 0.0)
    return RegressionResult(
        names=names,
        beta=beta,
        cov=cov,
        r_squared=r2,
        n_obs=n,
        estimator="ols_classic",
        residuals=resid,
        df_resid=df,
        extras={"intercept": intercept, "xtx_inv": xtx_inv, "X": X},
    )


def sandwich_cov(X: np.ndarray, residuals: np.ndarray) -> np.ndarray:
    """Heteroskedasticity-robust (HC0) covariance (X'X)^-1 meat (X'X)^-1."""
    X = np.asarray(X, dtype=float)
    e = np.asarray(residuals, dtype=float)
    xtx_inv = np.linalg.inv(X.T @ X)
    xe = X * e[:, None]
    meat = xe.T @ xe
    return xtx_inv @ meat @ xtx_inv


def newey_west_cov(X: np.ndarray, residuals: np.ndarray, lags: int) -> np.ndarray:
    """HAC covariance with Bartlett weights w_l = 1 - l/(L+1).

    Rows must be in time order. No degrees-of-freedom correction is applied.
    """
    X = np.asarray(X, dtype=float)
    e = np.asarray(residuals, dtype=float)
    n = len(e)
    if lags < 0:
        raise EstimationError(f"lag count must be >= 0, got {lags}")
    if lags >= n:
        raise EstimationError(f"lag count {lags} must be smaller than the sample size {n}")
    xtx_inv = np.linalg.inv(X.T @ X)
    xe = X * e[:, None]
    meat = xe.T @ xe
    for lag in range(1, lags + 1):
        w = 1.0 - lag / (lags + 1.0)
        gamma = xe[lag:].T @ xe[:-lag]
        meat = meat + w * (gamma + gamma.T)
    return xtx_inv @ meat @ xtx_inv


def default_nw_lags(n: int) -> int:
    """Common automatic bandwidth floor(4 * (n/100)^(2/9))."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def ols_nw(frame: RegressionFrame, lags: "int | None" = None, intercept: bool = True) -> RegressionResult:
    """OLS point estimates with Newey-West standard errors."""
    result = ols(frame, intercept=intercept)
    L = default_nw_lags(result.n_obs) if lags is None else lags
    X = result.extras["X"]
    cov = newey_west_cov(X, result.residuals, L)
    return RegressionResult(
        names=result.names,
        beta=result.beta,
        cov=cov,
        r_squared=result.r_squared,
        n_obs=result.n_obs,
        estimator=f"nw_hac({L})",
        residuals=result.residuals,
        df_resid=result.df_resid,
        extras={**result.extras, "nw_lags": L},
    )


def cluster_cov(X: np.ndarray, residuals: np.ndarray, groups: list) -> np.ndarray:
    """One-way cluster-robust covariance (no small-sample correction)."""
    X = np.asarray(X, dtype=float)
    e = np.asarray(residuals, dtype=float)
    xtx_inv = np.linalg.inv(X.T @ X)
    k = X.shape[1]
    meat = np.zeros((k, k))
    by_group: dict = {}
    for i, g in enumerate(groups):
        by_group.setdefault(g, []).append(i)
    for idx in by_group.values():
        s = X[idx].T @ e[idx]
        meat += np.outer(s, s)
    return xtx_inv @ meat @ xtx_inv


def fe_within(frame: RegressionFrame, cluster: bool = False) -> RegressionResult:
    """Entity-demeaned (within) estimator.

    y and X are demeaned within each entity, then fit without an intercept;
    R-squared is measured on the demeaned variation. Entities with a single
    observation drop out. With `cluster`, the covariance is clustered by
    entity instead of the classic s^2 (X'X)^-1 of the demeaned regression.
    """
    entities = np.asarray(frame.entities)
    counts: dict = {}
    for g in entities:
        counts[g] = counts.get(g, 0) + 1
    keep = np.array([counts[g] >= 2 for g in entities])
    if not keep.any():
        raise EstimationError("all entities are singletons; within variation is empty")
    y = np.asarray(frame.y, dtype=float)[keep]
    X = np.asarray(frame.X, dtype=float)[keep]
    groups = entities[keep]
    yd = y.copy()
    Xd = X.copy()
    for g in dict.fromkeys(groups.tolist()):
        m = groups == g
        yd[m] -= y[m].mean()
        Xd[m] -= X[m].mean(axis=0)
    names = list(frame.columns)
    n, k = Xd.shape
    if n < k + 1:
        raise EstimationError(f"need at least {k + 1} observations for {k} parameters, have {n}")
    beta, xtx_inv = _qr_solve(Xd, yd, names)
    resid = yd - Xd @ beta
    rss = float(resid @ resid)
    df = n - k
    cov = cluster_cov(Xd, resid, groups.tolist()) if cluster else (rss / df) * xtx_inv
    tss = float(yd @ yd)
    r2 = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0 else 0.0)
    return RegressionResult(
        names=names,
        beta=beta,
        cov=cov,
        r_squared=r2,
        n_obs=n,
        estimator="fe_within",
        residuals=resid,
        df_resid=df,
        extras={"n_entities": len(set(groups.tolist())), "cluster": cluster, "X": Xd},
    )


def economic_significance(coef: float, sd_of_regressor: float) -> float:
    """Effect of a one-SD regressor move, in percentage points."""
    return coef * sd_of_regressor * 100.0


def regress(
    frame: RegressionFrame,
    estimator: str = "nw",
    intercept: bool = True,
    nw_lags: "int | None" = None,
    cluster: bool = False,
) -> RegressionResult:
    if estimator == "ols":
        return ols(frame, intercept=intercept)
    if estimator == "nw":
        return ols_nw(frame, lags=nw_lags, intercept=intercept)
    if estimator == "fe":
        return fe_within(frame, cluster=cluster)
    raise EstimationError(f"unknown estimator {estimator!r} (expected ols|nw|fe)")


def _stars(p: float, thresholds: tuple = (0.10, 0.05, 0.01)) -> str:
    ten, five, one = thresholds
    if p < one:
        return "***"
    if p < five:
        return "**"
    if p < ten:
        return "*"
    return ""


def format_table(
    results: list[RegressionResult],
    star_thresholds: tuple = (0.10, 0.05, 0.01),
    headers: "list[str] | None" = None,
) -> list[list[str]]:
    """Table-style grid: coefficients with t-stats in parentheses and stars.

    One column per result; rows ordered by first appearance of each
    coefficient; R-squared and observation counts at the bottom.
    """
    order: list[str] = []
    for res in results:
        for name in res.names:
            if not name:
                raise EstimationError("empty coefficient name")
            if name not in order:
                order.append(name)
    headers = headers or [f"({i + 1})" for i in range(len(results))]
    grid: list[list[str]] = [[""] + list(headers)]
    for name in order:
        coef_row = [name]
        t_row = [""]
        for res in results:
            if name in res.names:
                j = res.names.index(name)
                p = float(res.pvalues[j])
                coef_row.append(f"{res.beta[j]:.4g}{_stars(p, star_thresholds)}")
                t_row.append(f"({res.tstats[j]:.2f})")
            else:
                coef_row.append("")
                t_row.append("")
        grid.append(coef_row)
        grid.append(t_row)
    grid.append(["R-squared"] + [f"{res.r_squared:.3f}" for res in results])
    grid.append(["Observations"] + [str(res.n_obs) for res in results])
    return grid


def render_markdown(grid: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in grid) for i in range(len(grid[0]))]
    lines = []
    for r, row in enumerate(grid):
        lines.append("| " + " | ".join(cell.ljust(w) for cell, w in zip(row, widths)) + " |")
        if r == 0:
            lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    return "\n".join(lines) + "\n"


def render_csv(grid: list[list[str]]) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerows(grid)
    return buf.getvalue()
