import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scorecast.backends import MockBackend
from scorecast.corpus import Chunk, chunk_transcript
from scorecast.errors import DataError
from scorecast.scoring import (
    CHOICE_TEXT,
    QUESTIONS,
    ResponseCache,
    answer_from_raw,
    build_prompt,
    parse_response,
    run_scoring,
    score_call,
    score_choice,
    write_scores_csv,
)
from tests.conftest import make_transcript


def chunk(text="Demand was strong this quarter.", call_id="c1", index=0):
    return Chunk(call_id=call_id, index=index, text=text, word_count=len(text.split()))


class TestPrompt:
    def test_economy_us_prompt_sentence_exact(self):
        prompt = build_prompt(QUESTIONS["economy_us"], chunk())
        assert (
            "Over the next quarter, how does the firm anticipate a change in optimism "
            "about the US economy?" in prompt
        )
        assert '"choice - explanation."' in prompt
        assert '"no information is provided."' in prompt
        assert prompt.endswith("Demand was strong this quarter.")

    def test_employees_prompt_clause(self):
        prompt = build_prompt(QUESTIONS["employees"], chunk())
        assert "change in number of employees?" in prompt

    def test_empty_chunk_rejected(self):
        with pytest.raises(DataError):
            build_prompt(QUESTIONS["economy_us"], chunk(text="   "))

    def test_exactly_fourteen_questions(self):
        assert len(QUESTIONS) == 14


class TestScoreChoice:
    @pytest.mark.parametrize(
        "choice,value",
        [
            ("dec_subst", -1.0),
            ("dec", -0.5),
            ("no_change", 0.0),
            ("inc", 0.5),
            ("inc_subst", 1.0),
            ("no_info", 0.0),
        ],
    )
    def test_mapping(self, choice, value):
        assert score_choice(choice) == value

    def test_odd_under_reversal(self):
        reverse = {"dec_subst": "inc_subst", "dec": "inc", "no_change": "no_change",
                   "inc": "dec", "inc_subst": "dec_subst"}
        for c, r in reverse.items():
            assert score_choice(r) == -score_choice(c)


class TestParse:
    def test_plain_increase(self):
        assert parse_response("Increase - strong demand cited") == ("inc", "strong demand cited", "ok")

    def test_no_information_phrase(self):
        assert parse_response("no information is provided") == ("no_info", "", "no_info")

    def test_malformed_keeps_raw_and_scores_zero(self):
        choice, explanation, status = parse_response("maybe better?")
        assert status == "malformed"
        assert score_choice(choice) == 0.0
        a = answer_from_raw("c1", 0, "economy_us", "maybe better?")
        assert a.raw == "maybe better?"

    @pytest.mark.parametrize("phrase", list(CHOICE_TEXT.values()))
    @pytest.mark.parametrize("case", ["lower", "upper", "mixed"])
    @pytest.mark.parametrize("period", ["", "."])
    def test_case_and_period_variants(self, phrase, case, period):
        text = {"lower": phrase.lower(), "upper": phrase.upper(), "mixed": phrase.title()}[case]
        choice, _, status = parse_response(text + period)
        assert status == "ok"
        assert CHOICE_TEXT[choice].lower() == phrase.lower()

    def test_roundtrip_with_explanations(self):
        for key, phrase in CHOICE_TEXT.items():
            got = parse_response(f"{phrase} - margins and pricing held up")
            assert got == (key, "margins and pricing held up", "ok")

    def test_explanation_with_dashes_splits_once(self):
        choice, explanation, _ = parse_response("Decrease - demand - especially abroad - weakened")
        assert choice == "dec"
        assert explanation == "demand - especially abroad - weakened"

    @given(st.text(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_never_crashes(self, raw):
        choice, explanation, status = parse_response(raw)
        assert status in ("ok", "no_info", "malformed")
        assert choice in ("dec_subst", "dec", "no_change", "inc", "inc_subst", "no_info")


class TestScoreCall:
    def _answers(self, choices, call_id="c1", question_id="economy_us"):
        return [
            answer_from_raw(call_id, i, question_id, f"{CHOICE_TEXT.get(c, c)} - x")
            for i, c in enumerate(choices)
        ]

    def test_mean_of_three(self):
        score, n, _ = score_call(self._answers(["inc", "no_change", "inc_subst"]))
        assert score == 0.5 and n == 3

    def test_all_no_info_is_zero(self):
        answers = [
            answer_from_raw("c1", i, "economy_us", "no information is provided") for i in range(2)
        ]
        assert score_call(answers)[0] == 0.0

    def test_symmetric_pair_cancels(self):
        assert score_call(self._answers(["dec", "inc"]))[0] == 0.0

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            score_call([])

    def test_mixed_calls_rejected(self):
        answers = self._answers(["inc"]) + self._answers(["dec"], call_id="c2")
        with pytest.raises(DataError):
            score_call(answers)

    def test_exhaustive_multisets_match_fraction_mean(self):
        from fractions import Fraction

        values = {
            "dec_subst": Fraction(-1),
            "dec": Fraction(-1, 2),
            "no_change": Fraction(0),
            "inc": Fraction(1, 2),
            "inc_subst": Fraction(1),
            "no_info": Fraction(0),
        }
        raw_for = {**CHOICE_TEXT, "no_info": "no information is provided"}
        for size in range(1, 5):
            for combo in itertools.combinations_with_replacement(values, size):
                answers = [
                    answer_from_raw("c1", i, "economy_us", raw_for[c]) for i, c in enumerate(combo)
                ]
                score, n, _ = score_call(answers)
                expected = sum((values[c] for c in combo), Fraction(0)) / size
                assert score == float(expected)
                assert n == size


class TestRunScoring:
    def test_cardinality_and_cache(self, tmp_path):
        text = "Margins held. " * 30
        transcripts = [make_transcript(text, call_id="a", firm_id="f1")]
        questions = list(QUESTIONS.values())
        backend = MockBackend(seed=7)
        cache = ResponseCache(tmp_path / "cache")
        scores, answers = run_scoring(transcripts, questions, backend, cache, max_inflight=3)
        assert len(answers) == 14  # 1 chunk x 14 questions
        assert len(scores) == 14
        first_calls = backend.calls
        assert first_calls == 14

        scores2, answers2 = run_scoring(transcripts, questions, backend, cache, max_inflight=3)
        assert backend.calls == first_calls  # warm cache: zero new backend calls
        assert scores2 == scores
        assert answers2 == answers

    def test_three_chunks_times_14_questions(self, tmp_path):
        sentence = "Revenue and margins improved again across all our segments today. "
        transcripts = [make_transcript(sentence * 750, call_id="big", firm_id="f2")]
        assert len(chunk_transcript(transcripts[0])) == 3
        backend = MockBackend(seed=1)
        scores, answers = run_scoring(transcripts, list(QUESTIONS.values()), backend, None)
        assert len(answers) == 42
        assert {s.n_chunks for s in scores} == {3}

    def test_dispatch_order_invariance(self, tmp_path):
        transcripts = [
            make_transcript("Output rose. " * 40, call_id=f"c{i}", firm_id=f"f{i}") for i in range(4)
        ]
        questions = list(QUESTIONS.values())[:3]
        serial, _ = run_scoring(transcripts, questions, MockBackend(seed=3), None, max_inflight=1)
        threaded, _ = run_scoring(transcripts, questions, MockBackend(seed=3), None, max_inflight=8)
        assert serial == threaded

    def test_score_file_deterministic(self, tmp_path):
        transcripts = [make_transcript("Costs fell. " * 25, call_id="x", firm_id="f")]
        questions = list(QUESTIONS.values())
        out1 = tmp_path / "s1.csv"
        out2 = tmp_path / "s2.csv"
        scores1, _ = run_scoring(transcripts, questions, MockBackend(seed=5), None)
        write_scores_csv(scores1, out1)
        scores2, _ = run_scoring(transcripts, questions, MockBackend(seed=5), None)
        write_scores_csv(scores2, out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_scores_within_bounds_on_random_mock(self):
        rng = random.Random(0)
        transcripts = [
            make_transcript(
                " ".join(rng.choice(["demand", "supply", "margin", "cost"]) for _ in range(60)),
                call_id=f"c{i}",
                firm_id=f"f{i % 3}",
                quarter=(i % 4) + 1,
            )
            for i in range(12)
        ]
        scores, _ = run_scoring(transcripts, list(QUESTIONS.values()), MockBackend(seed=9), None)
        assert all(-1.0 <= s.score <= 1.0 for s in scores)
