"""Recursive VAR estimation, orthogonalized impulse responses, bootstrap bands.

The benchmark system has eight endogenous variables in a fixed listing
order; shocks are one-standard-deviation Cholesky impulses in that order,
and growth-rate variables report accumulated (cumulative-sum) responses.
Confidence bands come from a residual-based recursive bootstrap with
per-replication RNG streams derived from (seed, replication index), so
results never depend on execution order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import DataError, EstimationError

DEFAULT_VARIABLES = (
    "consumption_growth",
    "investment_growth",
    "gdp_growth",
    "inflation",
    "ai_economy_score",
    "excess_market_return",
    "treasury_10y",
    "fed_funds_rate",
)

# Growth-rate variables whose impulse responses are accumulated into levels.
DEFAULT_ACCUMULATED = frozenset(
    {"consumption_growth", "investment_growth", "gdp_growth", "excess_market_return"}
)

_RANK_RTOL = 1e-10


@dataclass
class VarSpec:
    variables: tuple = DEFAULT_VARIABLES
    lags: int = 2
    horizon: int = 20
    accumulate: "tuple | None" = None  # bool per variable; None -> name-based default

    def __post_init__(self):
        if self.lags < 1:
            raise DataError(f"lag order must be >= 1, got {self.lags}")
        if self.horizon < 1:
            raise DataError(f"horizon must be >= 1, got {self.horizon}")
        if self.accumulate is None:
            self.accumulate = tuple(v in DEFAULT_ACCUMULATED for v in self.variables)
        elif len(self.accumulate) != len(self.variables):
            raise DataError("accumulate flags must match the variable list")

    @property
    def k(self) -> int:
        return len(self.variables)

    def shock_index(self, shock: "str | int") -> int:
        if isinstance(shock, int):
            if not 0 <= shock < self.k:
                raise DataError(f"shock index {shock} out of range")
            return shock
        try:
            return self.variables.index(shock)
        except ValueError:
            raise DataError(f"shock variable {shock!r} not in {self.variables}") from None


@dataclass
class VarModel:
    variables: tuple
    intercept: np.ndarray  # (k,)
    coefs: np.ndarray  # (p, k, k); coefs[i] multiplies y_{t-1-i}
    sigma: np.ndarray  # (k, k)
    chol: "np.ndarray | None" = None  # lower Cholesky factor of sigma
    n_used: int = 0
    residuals: "np.ndarray | None" = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def lags(self) -> int:
        return self.coefs.shape[0]

    @classmethod
    def build(cls, variables, intercept, coefs, sigma) -> "VarModel":
        coefs = np.asarray(coefs, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            chol = None
        return cls(
            variables=tuple(variables),
            intercept=np.asarray(intercept, dtype=float),
            coefs=coefs,
            sigma=sigma,
            chol=chol,
        )

    def companion(self) -> np.ndarray:
        k, p = self.k, self.lags
        F = np.zeros((k * p, k * p))
        F[:k, :] = np.concatenate([self.coefs[i] for i in range(p)], axis=1)
        if p > 1:
            F[k:, :-k] = np.eye(k * (p - 1))
        return F


@dataclass
class IrfResult:
    shock: str
    variables: tuple
    responses: np.ndarray  # (horizon+1, k), accumulation already applied
    lower: "np.ndarray | None" = None
    upper: "np.ndarray | None" = None
    replications: int = 0
    coverage: "float | None" = None
    seed: "int | None" = None
    meta: dict = field(default_factory=dict)

    def to_csv(self, path: "str | Path") -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["horizon", "variable", "response", "lower", "upper"])
            H = self.responses.shape[0]
            for h in range(H):
                for j, name in enumerate(self.variables):
                    lo = repr(float(self.lower[h, j])) if self.lower is not None else ""
                    hi = repr(float(self.upper[h, j])) if self.upper is not None else ""
                    writer.writerow([h, name, repr(float(self.responses[h, j])), lo, hi])


def _design(data: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack (Y, Z) for Y = Z C with Z rows [1, y_{t-1}, ..., y_{t-p}]."""
    T, k = data.shape
    Y = data[p:]
    blocks = [np.ones((T - p, 1))]
    for i in range(1, p + 1):
        blocks.append(data[p - i : T - i])
    Z = np.concatenate(blocks, axis=1)
    return Y, Z


def estimate_var(data, spec: VarSpec) -> VarModel:
    """Per-equation OLS with intercept; sigma divides by the rows used (T - p)."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != spec.k:
        raise DataError(f"data must be T x {spec.k}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError("data contains non-finite values")
    T, k = arr.shape
    p = spec.lags
    # T - p usable rows must exceed the k*p + 1 per-equation parameters.
    if T - p <= k * p + 1:
        raise EstimationError(
            f"too few observations for k={k}, p={p}: have {T}, need at least {k * p + p + 2}"
        )
    Y, Z = _design(arr, p)
    q, r, piv = scipy.linalg.qr(Z, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = _RANK_RTOL * (diag[0] if diag.size else 0.0)
    rank = int(np.sum(diag > tol))
    if rank < Z.shape[1]:
        raise EstimationError(
            f"VAR regressors are collinear (rank {rank} of {Z.shape[1]}); "
            "check for constant or duplicated variables"
        )
    C_piv = scipy.linalg.solve_triangular(r, q.T @ Y)
    C = np.empty_like(C_piv)
    C[piv] = C_piv
    E = Y - Z @ C
    n_used = T - p
    sigma = E.T @ E / n_used
    coefs = np.stack([C[1 + i * k : 1 + (i + 1) * k, :].T for i in range(p)])
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        chol = None
    return VarModel(
        variables=tuple(spec.variables),
        intercept=C[0, :].copy(),
        coefs=coefs,
        sigma=sigma,
        chol=chol,
        n_used=n_used,
        residuals=E,
    )


def _se_matrix(model: VarModel, data) -> np.ndarray:
    """Classic per-equation OLS standard errors for [intercept | A_1 ... A_p]."""
    arr = np.asarray(data, dtype=float)
    Y, Z = _design(arr, model.lags)
    E = Y - Z @ np.concatenate(
        [model.intercept[None, :]] + [model.coefs[i].T for i in range(model.lags)], axis=0
    )
    n, m = Z.shape
    dof = n - m
    xtx_inv = np.linalg.inv(Z.T @ Z)
    s2 = (E * E).sum(axis=0) / dof  # per equation
    return np.sqrt(np.outer(np.diag(xtx_inv), s2))  # (m, k)


def _accumulate(responses: np.ndarray, flags) -> np.ndarray:
    out = responses.copy()
    for j, flag in enumerate(flags):
        if flag:
            out[:, j] = np.cumsum(responses[:, j])
    return out


def orthogonal_irf(
    model: VarModel,
    shock: "str | int",
    spec: "VarSpec | None" = None,
    horizon: "int | None" = None,
) -> IrfResult:
    """Point responses to a one-SD Cholesky-orthogonalized shock.

    Responses follow companion-form powers; variables flagged for
    accumulation report cumulative sums over the horizon.
    """
    spec = spec or VarSpec(variables=model.variables, lags=model.lags)
    H = horizon if horizon is not None else spec.horizon
    j = spec.shock_index(shock)
    if model.chol is None:
        raise EstimationError(
            "residual covariance is singular; drop or ridge collinear variables "
            "before requesting orthogonalized responses"
        )
    k = model.k
    impulse = model.chol[:, j]
    F = model.companion()
    raw = np.empty((H + 1, k))
    state = np.zeros(k * model.lags)
    state[:k] = impulse
    raw[0] = impulse
    for h in range(1, H + 1):
        state = F @ state
        raw[h] = state[:k]
    responses = _accumulate(raw, spec.accumulate)
    return IrfResult(
        shock=model.variables[j],
        variables=model.variables,
        responses=responses,
        meta={"raw": raw},
    )


def _batched_irfs(
    sims: np.ndarray, p: int, H: int, shock_j: int, accumulate
) -> tuple[np.ndarray, np.ndarray]:
    """Re-estimate a VAR on each simulated path and compute accumulated IRFs.

    Returns (irfs, ok_mask); failed replications have ok_mask False.
    """
    R, T, k = sims.shape
    n = T - p
    blocks = [np.ones((R, n, 1))]
    for i in range(1, p + 1):
        blocks.append(sims[:, p - i : T - i, :])
    Z = np.concatenate(blocks, axis=2)  # (R, n, 1+k*p)
    Y = sims[:, p:, :]
    G = np.einsum("rti,rtj->rij", Z, Z)
    ZtY = np.einsum("rti,rtk->rik", Z, Y)
    m = Z.shape[2]
    ok = np.isfinite(G).all(axis=(1, 2))
    cond = np.full(R, np.inf)
    if ok.any():
        cond[ok] = np.linalg.cond(G[ok])
    ok &= np.isfinite(cond) & (cond < 1e12)
    C = np.zeros((R, m, k))
    if ok.any():
        C[ok] = np.linalg.solve(G[ok], ZtY[ok])
    E = Y - np.matmul(Z, C)
    sigma = np.einsum("rti,rtj->rij", E, E) / n
    eig_ok = np.zeros(R, dtype=bool)
    if ok.any():
        eigs = np.linalg.eigvalsh(sigma[ok])
        eig_ok[np.flatnonzero(ok)] = eigs[:, 0] > 0
    ok &= eig_ok
    P = np.zeros((R, k, k))
    if ok.any():
        P[ok] = np.linalg.cholesky(sigma[ok])

    # companion matrices
    F = np.zeros((R, k * p, k * p))
    for i in range(p):
        F[:, :k, i * k : (i + 1) * k] = np.transpose(C[:, 1 + i * k : 1 + (i + 1) * k, :], (0, 2, 1))
    if p > 1:
        F[:, k:, :-k] = np.eye(k * (p - 1))

    irfs = np.zeros((R, H + 1, k))
    state = np.zeros((R, k * p))
    state[:, :k] = P[:, :, shock_j]
    irfs[:, 0, :] = state[:, :k]
    for h in range(1, H + 1):
        state = np.einsum("rij,rj->ri", F, state)
        irfs[:, h, :] = state[:, :k]
    for j, flag in enumerate(accumulate):
        if flag:
            irfs[:, :, j] = np.cumsum(irfs[:, :, j], axis=1)
    ok &= np.isfinite(irfs).all(axis=(1, 2))
    return irfs, ok


def _simulate(
    data0: np.ndarray, model: VarModel, shocks: np.ndarray
) -> np.ndarray:
    """Regenerate series from the first p observations and resampled residuals.

    `shocks` is (R, n, k); the result is (R, T, k) with T = n + p.
    """
    R, n, k = shocks.shape
    p = model.lags
    sims = np.empty((R, n + p, k))
    sims[:, :p, :] = data0[None, :p, :]
    c = model.intercept
    A = model.coefs
    for t in range(p, n + p):
        acc = c + shocks[:, t - p, :]
        for i in range(p):
            acc = acc + sims[:, t - 1 - i, :] @ A[i].T
        sims[:, t, :] = acc
    return sims


def bootstrap_irf(
    data,
    spec: VarSpec,
    shock: "str | int",
    replications: int = 2000,
    coverage: float = 0.95,
    seed: int = 0,
) -> IrfResult:
    """Residual-based recursive bootstrap percentile bands around the point IRF.

    Centered residual rows are resampled i.i.d. with replacement, the series
    is regenerated from its first p observations, and the VAR is re-estimated
    per replication. Failed replications are redrawn, with a cap of
    10 * replications total attempts. Deterministic given `seed`.
    """
    if replications < 1:
        raise DataError(f"replications must be >= 1, got {replications}")
    if not 0 < coverage < 1:
        raise DataError(f"coverage must be in (0, 1), got {coverage}")
    arr = np.asarray(data, dtype=float)
    model = estimate_var(arr, spec)
    point = orthogonal_irf(model, shock, spec)
    shock_j = spec.shock_index(shock)
    Ec = model.residuals - model.residuals.mean(axis=0, keepdims=True)
    n = Ec.shape[0]
    p = spec.lags
    H = spec.horizon

    def draw(rep: int, attempt: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence((seed, rep, attempt)))
        return rng.integers(0, n, size=n)

    R = replications
    idx = np.stack([draw(r, 0) for r in range(R)])
    attempts = R
    shocks = Ec[idx]  # (R, n, k)
    sims = _simulate(arr, model, shocks)
    irfs, ok = _batched_irfs(sims, p, H, shock_j, spec.accumulate)
    attempt_no = np.zeros(R, dtype=int)
    while not ok.all():
        bad = np.flatnonzero(~ok)
        for r in bad:
            attempt_no[r] += 1
            attempts += 1
            if attempts > 10 * R:
                raise EstimationError(
                    f"bootstrap exceeded {10 * R} total attempts; data too fragile to resample"
                )
            shocks_r = Ec[draw(int(r), int(attempt_no[r]))][None]
            sims_r = _simulate(arr, model, shocks_r)
            irf_r, ok_r = _batched_irfs(sims_r, p, H, shock_j, spec.accumulate)
            if ok_r[0]:
                irfs[r] = irf_r[0]
                ok[r] = True

    alpha = (1.0 - coverage) / 2.0
    lower = np.quantile(irfs, alpha, axis=0)
    upper = np.quantile(irfs, 1.0 - alpha, axis=0)
    return IrfResult(
        shock=point.shock,
        variables=model.variables,
        responses=point.responses,
        lower=lower,
        upper=upper,
        replications=R,
        coverage=coverage,
        seed=seed,
        meta={"attempts": attempts},
    )
