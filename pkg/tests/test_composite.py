import numpy as np
import pytest

from scorecast.composite import (
    ALL_QUESTION_IDS,
    CompositeScoreSeries,
    WeightVector,
    build_sales_panel,
    compose,
    estimate_weights,
    weight_history_stats,
    weight_series,
    weighted_score,
    write_weights_csv,
)
from scorecast.errors import DataError, EstimationError
from scorecast.panel import NATIONAL_ENTITY, ScorePanel
from scorecast.quarters import Quarter, quarter_range
from scorecast.scoring import FirmQuarterScore

Q0 = Quarter(2010, 1)

# Table-9-style fixture: per-question means of the quarterly weights as
# printed in the paper's Panel C.
PANEL_C_MEANS = {
    "earnings": 0.0225,
    "revenue": 0.110,
    "wages": 0.0870,
    "demand": 0.00239,
    "economy_us": 0.0366,
    "economy_global": 0.0664,
    "firm_prospects": 0.0320,
    "industry_prospects": 0.0272,
    "production": 0.0640,
    "product_price": 0.0392,
    "input_price": 0.0453,
    "cost_of_capital": -0.00493,
    "capx": 0.0384,
    "employees": 0.0572,
}


def firm_scores(n_firms, n_quarters, seed=0, question_ids=ALL_QUESTION_IDS):
    rng = np.random.default_rng(seed)
    scores = []
    for f in range(n_firms):
        for i in range(n_quarters):
            for qid in question_ids:
                scores.append(
                    FirmQuarterScore(
                        firm_id=f"f{f}",
                        calendar_quarter=Q0 + i,
                        question_id=qid,
                        score=float(rng.choice([-1, -0.5, 0, 0.5, 1]) * rng.uniform(0.2, 1.0)),
                        n_chunks=3,
                        n_malformed=0,
                    )
                )
    return scores


def sales_from_weights(scores, weights, n_firms, n_quarters, noise=0.0, seed=1):
    """Sales levels engineered so ln(S_s/S_{s-2}) = w . scores_{s-1} + noise."""
    rng = np.random.default_rng(seed)
    by_key = {}
    for s in scores:
        by_key[(s.firm_id, s.calendar_quarter, s.question_id)] = s.score
    levels = {}
    for f in range(n_firms):
        firm = f"f{f}"
        log_levels = {0: 0.0, 1: 0.05}
        for i in range(2, n_quarters):
            target = sum(
                weights.get(qid, 0.0) * by_key[(firm, Q0 + (i - 1), qid)]
                for qid in ALL_QUESTION_IDS
            )
            if noise:
                target += rng.normal(0.0, noise)
            log_levels[i] = log_levels[i - 2] + target
        for i, ll in log_levels.items():
            levels[(firm, Q0 + i)] = float(np.exp(ll))
    return levels


class TestSalesPanel:
    def test_rows_are_complete_case(self):
        scores = firm_scores(2, 6)
        # remove one question for f0 at quarter index 2
        scores = [
            s
            for s in scores
            if not (s.firm_id == "f0" and s.calendar_quarter == Q0 + 2 and s.question_id == "revenue")
        ]
        levels = {(f"f{f}", Q0 + i): 100.0 for f in range(2) for i in range(6)}
        rows = build_sales_panel(scores, levels)
        # quarter s = Q0+3 for f0 needs scores at Q0+2 -> dropped
        assert not any(r.firm_id == "f0" and r.quarter == Q0 + 3 for r in rows)
        assert any(r.firm_id == "f1" and r.quarter == Q0 + 3 for r in rows)

    def test_growth_is_two_quarter_log_ratio(self):
        scores = firm_scores(1, 4)
        levels = {("f0", Q0 + i): 100.0 * (1.1 ** i) for i in range(4)}
        rows = build_sales_panel(scores, levels)
        for r in rows:
            assert r.sales_growth == pytest.approx(2 * np.log(1.1), abs=1e-12)

    def test_nonpositive_sales_rejected(self):
        scores = firm_scores(1, 4)
        levels = {("f0", Q0 + i): 100.0 for i in range(4)}
        levels[("f0", Q0 + 1)] = -5.0
        with pytest.raises(DataError):
            build_sales_panel(scores, levels)


class TestEstimateWeights:
    def test_exact_recovery_of_planted_weights(self):
        n_firms, n_quarters = 6, 14
        scores = firm_scores(n_firms, n_quarters, seed=3)
        true = {qid: 0.0 for qid in ALL_QUESTION_IDS}
        true["economy_us"] = 1.0
        levels = sales_from_weights(scores, true, n_firms, n_quarters)
        rows = build_sales_panel(scores, levels)
        wv = estimate_weights(rows, as_of=Q0 + n_quarters, min_window=8)
        for qid in ALL_QUESTION_IDS:
            assert wv.weights[qid] == pytest.approx(true[qid], abs=1e-10)

    def test_matches_pooled_normal_equations_oracle(self):
        n_firms, n_quarters = 5, 16
        scores = firm_scores(n_firms, n_quarters, seed=4)
        levels = sales_from_weights(scores, {"revenue": 0.4, "demand": -0.2}, n_firms,
                                    n_quarters, noise=0.05, seed=5)
        rows = build_sales_panel(scores, levels)
        t = Q0 + n_quarters
        wv = estimate_weights(rows, as_of=t, min_window=8)
        training = [r for r in rows if r.quarter <= t - 1]
        X = np.array([[r.scores[qid] for qid in ALL_QUESTION_IDS] for r in training])
        y = np.array([r.sales_growth for r in training])
        oracle = np.linalg.solve(X.T @ X, X.T @ y)
        got = np.array([wv.weights[qid] for qid in ALL_QUESTION_IDS])
        assert np.allclose(got, oracle, rtol=1e-10, atol=1e-12)
        assert wv.n_obs == len(training)

    def test_causality_bit_identical_after_future_mutation(self):
        n_firms, n_quarters = 4, 12
        scores = firm_scores(n_firms, n_quarters, seed=6)
        levels = sales_from_weights(scores, {"earnings": 0.3}, n_firms, n_quarters, noise=0.02)
        rows = build_sales_panel(scores, levels)
        t = Q0 + 10
        base = estimate_weights(rows, as_of=t, min_window=4)
        # wreck everything dated >= t
        mutated_scores = [
            s if s.calendar_quarter < t
            else FirmQuarterScore(s.firm_id, s.calendar_quarter, s.question_id, 0.77, 1, 0)
            for s in scores
        ]
        mutated_levels = {
            k: (v if k[1] < t else v * 17.5) for k, v in levels.items()
        }
        mutated_rows = build_sales_panel(mutated_scores, mutated_levels)
        redo = estimate_weights(mutated_rows, as_of=t, min_window=4)
        assert redo.weights == base.weights  # bit-identical floats
        assert redo.window == base.window and redo.n_obs == base.n_obs

    def test_windows_are_nested_supersets(self):
        n_firms, n_quarters = 4, 14
        scores = firm_scores(n_firms, n_quarters, seed=7)
        levels = sales_from_weights(scores, {"capx": 0.2}, n_firms, n_quarters, noise=0.01)
        rows = build_sales_panel(scores, levels)
        quarters = quarter_range(Q0 + 8, Q0 + 13)
        series = weight_series(rows, quarters, min_window=4)
        assert len(series) == len(quarters)
        prev = None
        for wv in series:
            training = {(r.firm_id, r.quarter) for r in rows if r.quarter <= wv.quarter - 1}
            if prev is not None:
                assert prev <= training
            prev = training

    def test_insufficient_rows_or_window_errors(self):
        scores = firm_scores(1, 6)
        levels = {("f0", Q0 + i): 100.0 for i in range(6)}
        rows = build_sales_panel(scores, levels)
        with pytest.raises(EstimationError, match="window"):
            estimate_weights(rows, as_of=Q0 + 5, min_window=8)
        with pytest.raises(EstimationError, match="15"):
            estimate_weights(rows, as_of=Q0 + 5, min_window=1)

    def test_constant_zero_score_rank_error_names_question(self):
        n_firms, n_quarters = 5, 12
        scores = firm_scores(n_firms, n_quarters, seed=8)
        scores = [
            FirmQuarterScore(s.firm_id, s.calendar_quarter, s.question_id,
                             0.0 if s.question_id == "wages" else s.score, 1, 0)
            for s in scores
        ]
        levels = sales_from_weights(scores, {"revenue": 0.1}, n_firms, n_quarters, noise=0.01)
        rows = build_sales_panel(scores, levels)
        with pytest.raises(EstimationError, match="wages"):
            estimate_weights(rows, as_of=Q0 + n_quarters, min_window=4)


class TestWeightedScore:
    def _weights(self, mapping):
        return WeightVector(quarter=Q0 + 8, weights=dict(mapping), window=(Q0, Q0 + 7), n_obs=100)

    def test_zero_weights_give_zero(self):
        wv = self._weights({qid: 0.0 for qid in ALL_QUESTION_IDS})
        scores = {qid: 0.5 for qid in ALL_QUESTION_IDS}
        assert weighted_score(scores, wv) == 0.0

    def test_selector_weight_picks_single_score(self):
        for k, target in enumerate(ALL_QUESTION_IDS):
            wv = self._weights({qid: (1.0 if qid == target else 0.0) for qid in ALL_QUESTION_IDS})
            scores = {qid: 0.01 * i for i, qid in enumerate(ALL_QUESTION_IDS)}
            assert weighted_score(scores, wv) == pytest.approx(0.01 * k, abs=1e-15)

    def test_panel_c_means_dot_unit_vector(self):
        wv = self._weights(PANEL_C_MEANS)
        scores = {qid: 1.0 for qid in ALL_QUESTION_IDS}
        total = weighted_score(scores, wv)
        assert total == pytest.approx(sum(PANEL_C_MEANS.values()), abs=1e-12)
        assert total == pytest.approx(0.624, abs=2e-3)

    def test_name_mismatch_rejected(self):
        wv = self._weights({qid: 0.1 for qid in ALL_QUESTION_IDS})
        scores = {qid: 0.5 for qid in ALL_QUESTION_IDS[:-1]}
        with pytest.raises(DataError, match="mismatch"):
            weighted_score(scores, wv)

    def test_linear_in_weights_and_scores(self):
        rng = np.random.default_rng(9)
        w1 = {qid: float(rng.normal()) for qid in ALL_QUESTION_IDS}
        w2 = {qid: float(rng.normal()) for qid in ALL_QUESTION_IDS}
        s = {qid: float(rng.normal()) for qid in ALL_QUESTION_IDS}
        a = weighted_score(s, self._weights(w1))
        b = weighted_score(s, self._weights(w2))
        both = weighted_score(s, self._weights({q: w1[q] + w2[q] for q in w1}))
        assert both == pytest.approx(a + b, abs=1e-12)
        s2 = {q: 2.0 * v for q, v in s.items()}
        assert weighted_score(s2, self._weights(w1)) == pytest.approx(2.0 * a, abs=1e-12)


class TestCompose:
    def _panels(self, value=0.1, n_quarters=12, skip=None):
        panels = {}
        for qid in ALL_QUESTION_IDS:
            p = ScorePanel(level="national", frequency="quarterly", question_id=qid)
            for i in range(n_quarters):
                if skip and (qid, i) in skip:
                    continue
                p.cells[(NATIONAL_ENTITY, Q0 + i)] = (value, 5)
            panels[qid] = p
        return panels

    def test_single_question_reduces_to_scaled_score(self):
        wv = WeightVector(
            quarter=Q0 + 9,
            weights={qid: (0.7 if qid == "economy_us" else 0.0) for qid in ALL_QUESTION_IDS},
            window=(Q0, Q0 + 8),
            n_obs=40,
        )
        series = compose(self._panels(value=0.5), [wv], level="national")
        assert series.values[(NATIONAL_ENTITY, Q0 + 9)] == pytest.approx(0.35, abs=1e-12)

    def test_missing_score_skips_cell(self, caplog):
        wv = WeightVector(
            quarter=Q0 + 9,
            weights={qid: 0.1 for qid in ALL_QUESTION_IDS},
            window=(Q0, Q0 + 8),
            n_obs=40,
        )
        panels = self._panels(skip={("revenue", 9)})
        series = compose(panels, [wv], level="national")
        assert (NATIONAL_ENTITY, Q0 + 9) not in series.values


class TestWeightHistoryStats:
    def _vectors(self, per_qid_series):
        T = len(next(iter(per_qid_series.values())))
        out = []
        for i in range(T):
            out.append(
                WeightVector(
                    quarter=Q0 + 8 + i,
                    weights={qid: series[i] for qid, series in per_qid_series.items()},
                    window=(Q0, Q0 + 7 + i),
                    n_obs=50,
                )
            )
        return out

    def test_constant_series_is_degenerate(self):
        vectors = self._vectors({"economy_us": [0.3] * 6})
        with pytest.raises(EstimationError, match="degenerate"):
            weight_history_stats(vectors)

    def test_alternating_series_mean_zero(self):
        vectors = self._vectors({"economy_us": [0.2, -0.2] * 4})
        stats = weight_history_stats(vectors)
        mean, t = stats["economy_us"]
        assert mean == pytest.approx(0.0, abs=1e-15)

    def test_requires_three_quarters(self):
        vectors = self._vectors({"economy_us": [0.1, 0.2]})
        with pytest.raises(EstimationError, match="3 quarters"):
            weight_history_stats(vectors)

    def test_matches_brute_force_nw_on_ar1_series(self):
        rng = np.random.default_rng(10)
        w = [0.1]
        for _ in range(39):
            w.append(0.05 + 0.6 * w[-1] + rng.normal(0, 0.02))
        vectors = self._vectors({"economy_us": w})
        mean, t = weight_history_stats(vectors, nw_lags=2)["economy_us"]
        # brute-force NW on a constant regressor
        e = np.array(w) - np.mean(w)
        T = len(w)
        s = float(e @ e)
        for lag in (1, 2):
            weight = 1.0 - lag / 3.0
            acc = 0.0
            for i in range(lag, T):
                acc += e[i] * e[i - lag]
            s += 2.0 * weight * acc
        expected_t = np.mean(w) / np.sqrt(s / T**2)
        assert mean == pytest.approx(float(np.mean(w)), abs=1e-12)
        assert t == pytest.approx(float(expected_t), rel=1e-9)

    def test_weights_csv(self, tmp_path):
        vectors = self._vectors({"economy_us": [0.1, 0.2, 0.3]})
        path = tmp_path / "weights.csv"
        write_weights_csv(vectors, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "quarter,question_id,beta,n_obs"
        assert len(lines) == 4
