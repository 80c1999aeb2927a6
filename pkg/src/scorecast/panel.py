"""Score aggregation and regression-ready dataset assembly.

Scores aggregate to firm/industry/national panels by equal-weighted means
over the firms present in each period (no zero-filling). Dependent variables
are log growths ln(X[t+n] / X[t-1]); controls enter at t, together with the
L most recent one-quarter log growths of the target.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from math import log
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError
from .quarters import Quarter, parse_period
from .scoring import FirmQuarterScore
from .sectors import SECTOR_IDS

logger = logging.getLogger(__name__)

NATIONAL_ENTITY = "US"

Period = "Quarter | int"  # quarterly panels use Quarter, annual ones plain years


@dataclass
class ScorePanel:
    level: str  # national | industry | firm
    frequency: str  # quarterly | annual
    question_id: str
    cells: "dict[tuple[str, Quarter | int], tuple[float, int]]" = field(default_factory=dict)

    def entities(self) -> list[str]:
        return sorted({e for e, _ in self.cells})

    def periods(self) -> list:
        return sorted({p for _, p in self.cells}, key=_period_key)

    def score(self, entity: str, period) -> "float | None":
        cell = self.cells.get((entity, period))
        return None if cell is None else cell[0]


def _period_key(p) -> int:
    return p.index if isinstance(p, Quarter) else int(p)


def _period_str(p) -> str:
    return str(p)


def aggregate_scores(
    scores: list[FirmQuarterScore],
    level: str,
    question_id: str,
    firm_sectors: "dict[str, str] | None" = None,
) -> ScorePanel:
    """Equal-weighted mean of firm scores per (entity, quarter).

    Firms with no call in a quarter are simply absent (never zero-filled).
    A firm appearing more than once in a quarter is averaged to one firm-level
    value first, so every firm carries equal weight.
    """
    if level not in ("national", "industry", "firm"):
        raise DataError(f"unknown aggregation level {level!r}")
    relevant = [s for s in scores if s.question_id == question_id]
    if level == "industry" and firm_sectors is None:
        raise DataError("industry aggregation needs a firm_id -> sector mapping")

    by_firm_quarter: dict[tuple[str, Quarter], list[float]] = {}
    for s in relevant:
        by_firm_quarter.setdefault((s.firm_id, s.calendar_quarter), []).append(s.score)
    firm_values = {key: sum(vals) / len(vals) for key, vals in by_firm_quarter.items()}

    def entity_of(firm_id: str) -> str:
        if level == "national":
            return NATIONAL_ENTITY
        if level == "firm":
            return firm_id
        sector = firm_sectors.get(firm_id)
        if sector is None:
            raise DataError(f"no sector known for firm {firm_id!r}")
        if sector not in SECTOR_IDS:
            raise DataError(f"firm {firm_id!r} carries unknown sector {sector!r}")
        return sector

    groups: dict[tuple[str, Quarter], list[tuple[str, float]]] = {}
    for (firm_id, quarter), value in firm_values.items():
        groups.setdefault((entity_of(firm_id), quarter), []).append((firm_id, value))

    panel = ScorePanel(level=level, frequency="quarterly", question_id=question_id)
    for (entity, quarter), members in groups.items():
        members.sort(key=lambda kv: kv[0])
        total = 0.0
        for _, value in members:
            total += value
        panel.cells[(entity, quarter)] = (total / len(members), len(members))
    return panel


def annualize(panel: ScorePanel) -> ScorePanel:
    """Mean of available quarterly scores per year.

    The annual n_firms is the sum of the quarterly firm counts (the number of
    firm-quarter observations underlying the year).
    """
    if panel.frequency != "quarterly":
        raise DataError("annualize expects a quarterly panel")
    groups: dict[tuple[str, int], list[tuple[Quarter, float, int]]] = {}
    for (entity, quarter), (score, n_firms) in panel.cells.items():
        groups.setdefault((entity, quarter.year), []).append((quarter, score, n_firms))
    annual = ScorePanel(level=panel.level, frequency="annual", question_id=panel.question_id)
    for (entity, year), members in groups.items():
        members.sort(key=lambda m: m[0].index)
        total = 0.0
        for _, score, _ in members:
            total += score
        annual.cells[(entity, year)] = (total / len(members), sum(n for _, _, n in members))
    return annual


def log_growth(series: dict, to_offset: int, from_offset: int = -1) -> dict:
    """ln(X[t+to_offset] / X[t+from_offset]) for every t where both levels exist."""
    out: dict = {}
    for t in series:
        hi = t + to_offset
        lo = t + from_offset
        if hi in series and lo in series:
            for p in (lo, hi):
                if series[p] <= 0:
                    raise DataError(f"nonpositive level at period {p}: {series[p]}")
            out[t] = log(series[hi] / series[lo])
    return out


def quarterly_average(monthly: "dict[tuple[int, int], float]") -> "dict[Quarter, float]":
    """Quarterly mean of monthly values; every quarter needs its 3 months."""
    quarters: dict[Quarter, list[float]] = {}
    for (year, month), value in monthly.items():
        if not 1 <= month <= 12:
            raise DataError(f"month must be 1..12, got {month}")
        quarters.setdefault(Quarter(year, (month - 1) // 3 + 1), []).append(value)
    out: dict[Quarter, float] = {}
    for quarter in sorted(quarters, key=lambda q: q.index):
        values = quarters[quarter]
        if len(values) != 3:
            raise DataError(f"quarter {quarter} has {len(values)} monthly values, expected 3")
        out[quarter] = sum(values) / 3.0
    return out


def annual_average(monthly: "dict[tuple[int, int], float]") -> "dict[int, float]":
    """Annual mean of monthly values (12 months required per year)."""
    years: dict[int, list[float]] = {}
    for (year, _), value in sorted(monthly.items()):
        years.setdefault(year, []).append(value)
    out: dict[int, float] = {}
    for year, values in years.items():
        if len(values) != 12:
            raise DataError(f"year {year} has {len(values)} monthly values, expected 12")
        out[year] = sum(values) / 12.0
    return out


def spf_growth(median_forecast: float, realized_lag: float) -> float:
    """Arithmetic growth of the survey forecast over the last realized level."""
    if realized_lag <= 0:
        raise DataError(f"realized level must be positive, got {realized_lag}")
    return (median_forecast - realized_lag) / realized_lag


@dataclass
class MacroSeries:
    """Named period-indexed columns; per-entity columns key on (entity, period)."""

    columns: "dict[str, dict]" = field(default_factory=dict)

    @classmethod
    def from_csv(cls, path: "str | Path") -> "MacroSeries":
        df = pd.read_csv(path)
        if "period" not in df.columns:
            raise DataError(f"{path}: macro CSV needs a 'period' column")
        has_entity = "entity" in df.columns
        value_cols = [c for c in df.columns if c not in ("period", "entity")]
        series = cls()
        for col in value_cols:
            series.columns[col] = {}
        for _, row in df.iterrows():
            period = parse_period(str(row["period"]))
            for col in value_cols:
                value = row[col]
                if pd.isna(value):
                    continue
                key = (str(row["entity"]), period) if has_entity else period
                series.columns[col][key] = float(value)
        series.validate_contiguous()
        return series

    def validate_contiguous(self) -> None:
        for name, cells in self.columns.items():
            spans: dict[str, list] = {}
            for key in cells:
                entity, period = key if isinstance(key, tuple) else (NATIONAL_ENTITY, key)
                spans.setdefault(entity, []).append(period)
            for entity, periods in spans.items():
                idx = sorted(_period_key(p) for p in periods)
                if idx and idx[-1] - idx[0] + 1 != len(idx):
                    raise DataError(f"column {name!r} ({entity}) has gaps in its period index")

    def column(self, name: str) -> dict:
        if name not in self.columns:
            raise DataError(f"macro column {name!r} not found (have: {sorted(self.columns)})")
        return self.columns[name]

    def value(self, name: str, entity: str, period) -> "float | None":
        col = self.columns.get(name)
        if col is None:
            return None
        if (entity, period) in col:
            return col[(entity, period)]
        return col.get(period)


@dataclass
class RegressionFrame:
    """Aligned dependent/regressor arrays with per-row period and entity labels."""

    dep_name: str
    columns: list[str]
    y: np.ndarray
    X: np.ndarray
    periods: list
    entities: list[str]
    meta: dict = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(self.y)

    def to_csv(self, path: "str | Path") -> None:
        import json

        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["entity", "period", self.dep_name] + self.columns)
            for i in range(self.n_rows):
                writer.writerow(
                    [self.entities[i], _period_str(self.periods[i]), repr(float(self.y[i]))]
                    + [repr(float(v)) for v in self.X[i]]
                )
        meta = dict(self.meta)
        meta.update({"dep_name": self.dep_name, "columns": self.columns})
        Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_csv(cls, path: "str | Path") -> "RegressionFrame":
        import json

        path = Path(path)
        meta_path = Path(str(path) + ".meta.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        with path.open("r", encoding="utf-8", newline="") as fp:
            reader = csv.reader(fp)
            header = next(reader)
            dep_name = header[2]
            columns = header[3:]
            entities, periods, ys, xs = [], [], [], []
            for row in reader:
                entities.append(row[0])
                periods.append(parse_period(row[1]))
                ys.append(float(row[2]))
                xs.append([float(v) for v in row[3:]])
        meta.pop("dep_name", None)
        meta.pop("columns", None)
        return cls(
            dep_name=dep_name,
            columns=columns,
            y=np.asarray(ys, dtype=float),
            X=np.asarray(xs, dtype=float) if xs else np.empty((0, len(columns))),
            periods=periods,
            entities=entities,
            meta=meta,
        )


def score_column_name(panel: ScorePanel) -> str:
    base = f"score_{panel.question_id}"
    return base if panel.level == "national" else f"{base}_{panel.level}"


def build_frame(
    target: str,
    horizon: int,
    score_panels: list[ScorePanel],
    macro: MacroSeries,
    controls: "list[str] | None" = None,
    lags: int = 4,
    level: str = "national",
) -> RegressionFrame:
    """Assemble the forecasting dataset for one target and horizon.

    Dependent: ln(target[t+horizon] / target[t-1]). Regressors: one column per
    score panel, the named controls at t, and the `lags` most recent
    one-quarter log growths of the target, lag j = ln(X[t-j+1] / X[t-j]).
    Rows with any missing value are dropped.
    """
    if horizon < 1:
        raise DataError(f"horizon must be >= 1, got {horizon}")
    if lags < 0:
        raise DataError(f"lag count must be >= 0, got {lags}")
    controls = list(controls or [])
    target_col = macro.column(target)

    per_entity_target = any(isinstance(k, tuple) for k in target_col)
    if level == "national":
        entities = [NATIONAL_ENTITY]
    else:
        ents = {k[0] for k in target_col if isinstance(k, tuple)}
        for p in score_panels:
            if p.level == level:
                ents &= set(p.entities())
        entities = sorted(ents)
        if not entities:
            raise DataError(f"no entities shared by target {target!r} and {level} score panels")

    def target_level(entity: str, period) -> "float | None":
        if per_entity_target:
            return target_col.get((entity, period))
        return target_col.get(period)

    def coverage(entity: str) -> "dict[str, list]":
        spans: dict[str, list] = {}
        spans[target] = sorted(
            (p for k in target_col for p in [k[1] if isinstance(k, tuple) else k]
             if not per_entity_target or (isinstance(k, tuple) and k[0] == entity)),
            key=_period_key,
        )
        for c in controls:
            col = macro.column(c)
            spans[c] = sorted((k for k in col if not isinstance(k, tuple)), key=_period_key)
        for p in score_panels:
            ent = NATIONAL_ENTITY if p.level == "national" else entity
            spans[score_column_name(p)] = sorted(
                (per for (e, per) in p.cells if e == ent), key=_period_key
            )
        return spans

    column_names = [score_column_name(p) for p in score_panels] + controls + [
        f"{target}_growth_lag{j}" for j in range(1, lags + 1)
    ]

    rows_y: list[float] = []
    rows_x: list[list[float]] = []
    rows_period: list = []
    rows_entity: list[str] = []
    dropped = 0

    for entity in entities:
        spans = coverage(entity)
        empty = [name for name, ps in spans.items() if not ps]
        if empty:
            if level == "national":
                raise DataError(f"column {empty[0]!r} has no observations")
            logger.info("entity %s skipped: column %r empty", entity, empty[0])
            continue
        # Overlap = intersection of the columns' period spans.
        start_col = max(spans, key=lambda name: _period_key(spans[name][0]))
        end_col = min(spans, key=lambda name: _period_key(spans[name][-1]))
        overlap = (
            _period_key(spans[end_col][-1]) - _period_key(spans[start_col][0]) + 1
        )
        if overlap < lags + horizon + 2:
            limiting = start_col if start_col != target else end_col
            msg = (
                f"insufficient overlap for entity {entity}: columns share {max(overlap, 0)} "
                f"periods, need at least {lags + horizon + 2} (limiting column {limiting!r})"
            )
            if level == "national":
                raise DataError(msg)
            logger.info("%s", msg)
            continue

        candidate = spans[target]
        for t in candidate:
            x_hi = target_level(entity, t + horizon)
            x_lo = target_level(entity, t - 1)
            if x_hi is None or x_lo is None:
                continue
            row: list[float] = []
            ok = True
            for p in score_panels:
                ent = NATIONAL_ENTITY if p.level == "national" else entity
                value = p.score(ent, t)
                if value is None:
                    ok = False
                    break
                row.append(value)
            if ok:
                for c in controls:
                    value = macro.value(c, entity, t)
                    if value is None:
                        ok = False
                        break
                    row.append(value)
            if ok:
                for j in range(1, lags + 1):
                    a = target_level(entity, t - j + 1)
                    b = target_level(entity, t - j)
                    if a is None or b is None:
                        ok = False
                        break
                    if a <= 0 or b <= 0:
                        raise DataError(f"nonpositive level for {target!r} at {t - j}")
                    row.append(log(a / b))
            if not ok:
                dropped += 1
                continue
            if x_hi <= 0 or x_lo <= 0:
                raise DataError(f"nonpositive level for {target!r} around period {t}")
            rows_y.append(log(x_hi / x_lo))
            rows_x.append(row)
            rows_period.append(t)
            rows_entity.append(entity)

    frame = RegressionFrame(
        dep_name=f"{target}_loggrowth_h{horizon}",
        columns=column_names,
        y=np.asarray(rows_y, dtype=float),
        X=np.asarray(rows_x, dtype=float) if rows_x else np.empty((0, len(column_names))),
        periods=rows_period,
        entities=rows_entity,
        meta={"target": target, "horizon": horizon, "lags": lags, "level": level,
              "n_rows": len(rows_y), "n_dropped": dropped},
    )
    logger.info(
        "frame %s: %d rows (%d dropped), %d columns",
        frame.dep_name, frame.n_rows, dropped, len(column_names),
    )
    return frame


def write_panel_csv(panel: ScorePanel, path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["entity", "period", "score", "n_firms"])
        for (entity, period) in sorted(panel.cells, key=lambda k: (k[0], _period_key(k[1]))):
            score, n_firms = panel.cells[(entity, period)]
            writer.writerow([entity, _period_str(period), repr(score), n_firms])


def read_panel_csv(path: "str | Path", level: str, frequency: str, question_id: str) -> ScorePanel:
    panel = ScorePanel(level=level, frequency=frequency, question_id=question_id)
    with Path(path).open("r", encoding="utf-8", newline="") as fp:
        for row in csv.DictReader(fp):
            panel.cells[(row["entity"], parse_period(row["period"]))] = (
                float(row["score"]),
                int(row["n_firms"]),
            )
    return panel
