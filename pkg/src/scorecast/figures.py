"""Plot-ready CSV emitters (the toolkit never renders images).

score_vs_growth pairs the quarterly national score with the t-3 to t+1 log
growth of a level series; score_by_industry emits the yearly industry
heat-map data; irf re-emits impulse-response paths with their bands.
"""

from __future__ import annotations

import csv
from math import log
from pathlib import Path

from .errors import DataError
from .panel import MacroSeries, NATIONAL_ENTITY, ScorePanel, annualize
from .quarters import Quarter
from .var import IrfResult


def score_vs_growth_rows(
    panel: ScorePanel, macro: MacroSeries, target: str = "real_gdp"
) -> list[tuple[Quarter, float, float]]:
    """(quarter, score, ln(X[t+1]/X[t-3])) rows over the score quarters.

    Edge quarters without a computable growth are trimmed; an interior gap is
    an error naming the missing quarters.
    """
    levels = macro.column(target)
    rows = []
    missing: list[str] = []
    quarters = sorted((q for e, q in panel.cells if e == NATIONAL_ENTITY), key=lambda q: q.index)
    if not quarters:
        raise DataError("score panel has no national cells")
    for q in quarters:
        hi = levels.get(q + 1)
        lo = levels.get(q - 3)
        if hi is None or lo is None:
            missing.append(str(q))
            continue
        if hi <= 0 or lo <= 0:
            raise DataError(f"nonpositive {target!r} level around {q}")
        rows.append((q, panel.cells[(NATIONAL_ENTITY, q)][0], log(hi / lo)))
    if rows:
        first, last = rows[0][0], rows[-1][0]
        interior = [m for m in missing if first < Quarter.parse(m) < last]
        if interior:
            raise DataError(f"growth series has gaps at quarters: {', '.join(interior)}")
        if len(rows) != last - first + 1:
            holes = sorted(
                {str(Quarter.from_index(i)) for i in range(first.index, last.index + 1)}
                - {str(r[0]) for r in rows}
            )
            raise DataError(f"score/growth alignment has gaps at quarters: {', '.join(holes)}")
    return rows


def write_score_vs_growth(panel: ScorePanel, macro: MacroSeries, path: "str | Path",
                          target: str = "real_gdp") -> None:
    rows = score_vs_growth_rows(panel, macro, target)
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["quarter", "score", f"{target}_loggrowth_tp1_tm3"])
        for q, score, growth in rows:
            writer.writerow([str(q), repr(score), repr(growth)])


def write_score_by_industry(panel: ScorePanel, path: "str | Path") -> None:
    """Yearly industry panel in long format (sector, year, score, n_firms)."""
    if panel.level != "industry":
        raise DataError(f"expected an industry panel, got level {panel.level!r}")
    annual = annualize(panel) if panel.frequency == "quarterly" else panel
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["sector", "year", "score", "n_firms"])
        for (entity, year) in sorted(annual.cells, key=lambda k: (k[0], k[1])):
            score, n_firms = annual.cells[(entity, year)]
            writer.writerow([entity, year, repr(score), n_firms])


def write_irf_figure(result: IrfResult, path: "str | Path") -> None:
    result.to_csv(path)


def emit_figure_data(kind: str, path: "str | Path", **inputs) -> None:
    """Dispatch on figure kind: score_vs_growth | score_by_industry | irf."""
    if kind == "score_vs_growth":
        write_score_vs_growth(inputs["panel"], inputs["macro"], path,
                              target=inputs.get("target", "real_gdp"))
    elif kind == "score_by_industry":
        write_score_by_industry(inputs["panel"], path)
    elif kind == "irf":
        write_irf_figure(inputs["irf"], path)
    else:
        raise DataError(f"unknown figure kind {kind!r}")
