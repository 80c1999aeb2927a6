"""Expanding-window composite score: sales-regression weights, no look-ahead.

For each quarter t, firm sales growth is regressed on the previous quarter's
14 firm-level scores using only observations dated t-1 or earlier; the
estimated loadings then weight the national (or industry) score vectors at
t. Windows expand, never roll, so the training row set at t is a superset
of the one at t-1.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from math import log
from pathlib import Path

import numpy as np

from .errors import DataError, EstimationError
from .panel import NATIONAL_ENTITY, ScorePanel
from .quarters import Quarter
from .regression import _qr_solve
from .scoring import QUESTIONS, FirmQuarterScore

logger = logging.getLogger(__name__)

ALL_QUESTION_IDS = tuple(QUESTIONS)


@dataclass(frozen=True)
class SalesPanelRow:
    firm_id: str
    quarter: Quarter  # the quarter s the sales growth is measured at
    sales_growth: float  # ln(S_s / S_{s-2})
    scores: "dict[str, float]"  # question_id -> firm score at s-1


@dataclass
class WeightVector:
    quarter: Quarter  # the quarter t the weights are stamped with
    weights: "dict[str, float]"
    window: "tuple[Quarter, Quarter]"  # first/last training quarter (s range)
    n_obs: int


@dataclass
class CompositeScoreSeries:
    level: str  # national | industry
    values: "dict[tuple[str, Quarter], float]" = field(default_factory=dict)


def build_sales_panel(
    firm_scores: list[FirmQuarterScore],
    sales_levels: "dict[tuple[str, Quarter], float]",
    question_ids: tuple = ALL_QUESTION_IDS,
) -> list[SalesPanelRow]:
    """Assemble complete-case rows (sales growth at s, the scores at s-1).

    Rows missing any of the listed question scores or either sales level are
    dropped; sales levels must be positive where used.
    """
    by_key: dict[tuple[str, Quarter, str], float] = {}
    for s in firm_scores:
        by_key[(s.firm_id, s.calendar_quarter, s.question_id)] = s.score
    firms = sorted({f for f, _ in sales_levels})
    quarters = sorted({q for _, q in sales_levels}, key=lambda q: q.index)
    rows: list[SalesPanelRow] = []
    for firm in firms:
        for s in quarters:
            lvl_now = sales_levels.get((firm, s))
            lvl_base = sales_levels.get((firm, s - 2))
            if lvl_now is None or lvl_base is None:
                continue
            if lvl_now <= 0 or lvl_base <= 0:
                raise DataError(f"nonpositive sales level for firm {firm} around {s}")
            scores: dict[str, float] = {}
            complete = True
            for qid in question_ids:
                value = by_key.get((firm, s - 1, qid))
                if value is None:
                    complete = False
                    break
                scores[qid] = value
            if not complete:
                continue
            rows.append(
                SalesPanelRow(
                    firm_id=firm,
                    quarter=s,
                    sales_growth=log(lvl_now / lvl_base),
                    scores=scores,
                )
            )
    rows.sort(key=lambda r: (r.quarter.index, r.firm_id))
    return rows


def estimate_weights(
    rows: list[SalesPanelRow],
    as_of: Quarter,
    min_window: int = 8,
    question_ids: tuple = ALL_QUESTION_IDS,
    intercept: bool = False,
) -> WeightVector:
    """Pooled OLS of sales growth on lagged scores over all history through t-1.

    Requires at least 15 training rows spanning at least `min_window` distinct
    quarters, and a full-rank score matrix. The displayed specification has no
    intercept; pass `intercept=True` to add one (its coefficient is not part
    of the weight vector).
    """
    training = [r for r in rows if r.quarter <= as_of - 1]
    if not training:
        raise EstimationError(f"no training rows before {as_of}")
    window_quarters = sorted({r.quarter for r in training}, key=lambda q: q.index)
    if len(window_quarters) < min_window:
        raise EstimationError(
            f"training window has {len(window_quarters)} quarters before {as_of}, "
            f"need at least {min_window}"
        )
    if len(training) < 15:
        raise EstimationError(f"need at least 15 training rows before {as_of}, have {len(training)}")
    names = list(question_ids)
    X = np.array([[r.scores[qid] for qid in names] for r in training], dtype=float)
    y = np.array([r.sales_growth for r in training], dtype=float)
    if intercept:
        X = np.column_stack([np.ones(len(y)), X])
        names = ["const"] + names
    try:
        beta, _ = _qr_solve(X, y, names)
    except EstimationError as exc:
        raise EstimationError(f"weight regression as of {as_of}: {exc}") from exc
    offset = 1 if intercept else 0
    weights = {qid: float(beta[offset + i]) for i, qid in enumerate(question_ids)}
    return WeightVector(
        quarter=as_of,
        weights=weights,
        window=(window_quarters[0], window_quarters[-1]),
        n_obs=len(training),
    )


def weight_series(
    rows: list[SalesPanelRow],
    quarters: list[Quarter],
    min_window: int = 8,
    question_ids: tuple = ALL_QUESTION_IDS,
    intercept: bool = False,
) -> list[WeightVector]:
    """Weight vectors for every requested quarter with a feasible window."""
    out: list[WeightVector] = []
    for t in sorted(quarters, key=lambda q: q.index):
        try:
            out.append(
                estimate_weights(rows, t, min_window=min_window, question_ids=question_ids,
                                 intercept=intercept)
            )
        except EstimationError as exc:
            logger.info("no weights at %s: %s", t, exc)
    return out


def weighted_score(scores: "dict[str, float]", weights: WeightVector) -> float:
    """Inner product of a full score vector with the quarter's weights."""
    if set(scores) != set(weights.weights):
        missing = sorted(set(weights.weights) - set(scores))
        extra = sorted(set(scores) - set(weights.weights))
        raise DataError(f"score/weight name mismatch (missing {missing}, extra {extra})")
    total = 0.0
    for qid in sorted(weights.weights):
        total += weights.weights[qid] * scores[qid]
    return total


def compose(
    panels: "dict[str, ScorePanel]",
    weight_vectors: list[WeightVector],
    level: str = "national",
) -> CompositeScoreSeries:
    """Apply each quarter's weights to that quarter's score vectors.

    A cell missing any of the weighted questions is skipped with a logged
    reason rather than imputed.
    """
    series = CompositeScoreSeries(level=level)
    entities = set()
    for panel in panels.values():
        entities.update(panel.entities())
    if level == "national":
        entities = {NATIONAL_ENTITY} & entities or {NATIONAL_ENTITY}
    for wv in sorted(weight_vectors, key=lambda w: w.quarter.index):
        for entity in sorted(entities):
            scores: dict[str, float] = {}
            missing = None
            for qid in wv.weights:
                panel = panels.get(qid)
                value = panel.score(entity, wv.quarter) if panel is not None else None
                if value is None:
                    missing = qid
                    break
                scores[qid] = value
            if missing is not None:
                logger.info(
                    "composite cell (%s, %s) skipped: no %s score", entity, wv.quarter, missing
                )
                continue
            series.values[(entity, wv.quarter)] = weighted_score(scores, wv)
    return series


def weight_history_stats(weight_vectors: list[WeightVector], nw_lags: int = 2) -> "dict[str, tuple[float, float]]":
    """Time-series mean and Newey-West t-stat (constant-only regression) per score."""
    if len(weight_vectors) < 3:
        raise EstimationError(f"need at least 3 quarters of weights, have {len(weight_vectors)}")
    ordered = sorted(weight_vectors, key=lambda w: w.quarter.index)
    qids = sorted(ordered[0].weights)
    out: dict[str, tuple[float, float]] = {}
    for qid in qids:
        series = np.array([wv.weights[qid] for wv in ordered], dtype=float)
        T = len(series)
        mean = float(series.mean())
        e = series - mean
        s = float(e @ e)
        for lag in range(1, min(nw_lags, T - 1) + 1):
            w = 1.0 - lag / (nw_lags + 1.0)
            s += 2.0 * w * float(e[lag:] @ e[:-lag])
        variance = s / (T * T)
        if variance <= 0:
            raise EstimationError(f"degenerate weight series for {qid}: zero long-run variance")
        out[qid] = (mean, mean / variance**0.5)
    return out


def write_weights_csv(weight_vectors: list[WeightVector], path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["quarter", "question_id", "beta", "n_obs"])
        for wv in sorted(weight_vectors, key=lambda w: w.quarter.index):
            for qid in sorted(wv.weights):
                writer.writerow([str(wv.quarter), qid, repr(wv.weights[qid]), wv.n_obs])


def write_composite_csv(series: CompositeScoreSeries, path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["entity", "quarter", "value"])
        for (entity, quarter) in sorted(series.values, key=lambda k: (k[0], k[1].index)):
            writer.writerow([entity, str(quarter), repr(series.values[(entity, quarter)])])
