import random

import pytest

from scorecast.errors import DataError
from scorecast.scoring import answer_from_raw
from scorecast.textval import (
    NgramTable,
    RuleLemmatizer,
    bucket_of_choice,
    default_stopwords,
    default_wordlist,
    explanations_from_answers,
    normalize_tokens,
    proper_nouns,
    top_ngrams,
)


class TestNormalize:
    def test_reference_sentence(self):
        assert normalize_tokens("The markets were challenging") == ["market", "challenging"]

    def test_all_stopwords_empty(self):
        assert normalize_tokens("the and of was were") == []

    def test_empty_string(self):
        assert normalize_tokens("") == []

    def test_non_alpha_stripped(self):
        tokens = normalize_tokens("Revenue grew 14% in 2020; margins—held.")
        assert "14" not in tokens and "2020" not in tokens
        assert "revenue" in tokens

    def test_out_of_dictionary_dropped(self):
        assert normalize_tokens("the frobnicator market") == ["market"]

    def test_stopwords_loaded(self):
        sw = default_stopwords()
        assert {"the", "and", "were", "of"} <= sw

    def test_wordlist_loaded(self):
        wl = default_wordlist()
        assert {"market", "markets", "challenging", "growth"} <= wl


class TestLemmatizer:
    def test_rules(self):
        lem = RuleLemmatizer()
        assert lem("markets") == "market"
        assert lem("challenging") == "challenging"  # stem not in dictionary: kept
        assert lem("improved") == "improve"  # restored final e (only for -ed)
        assert lem("improving") == "improving"  # -ing has no e-repair, stem kept
        assert lem("growing") == "grow"
        assert lem("conditions") == "condition"
        assert lem("stopped") == "stop"  # doubled consonant repaired
        assert lem("business") == "business"  # -ss plural guard
        assert lem("companies") == "company"  # -ies -> y

    def test_short_tokens_untouched(self):
        lem = RuleLemmatizer()
        assert lem("gas") == "gas"
        assert lem("was") == "was"


class TestProperNouns:
    def test_mid_sentence_capitals_detected(self):
        nouns = proper_nouns("We spoke with Acme about pricing. Acme agreed.")
        assert "acme" in nouns

    def test_sentence_initial_not_detected(self):
        nouns = proper_nouns("Market conditions improved. Demand also improved.")
        assert nouns == set()


class TestTopNgrams:
    def test_window_count_single_explanation(self):
        # five surviving tokens -> three 3-gram windows
        text = "strong demand growth improved margins"
        table = top_ngrams([("high", text)], n=3, k=10, bucket="high")
        assert sum(c for _, c in table.entries) == 3

    def test_duplicates_double_counts(self):
        text = "strong demand growth improved margins"
        once = top_ngrams([("high", text)], n=3, bucket="high")
        twice = top_ngrams([("high", text), ("high", text)], n=3, bucket="high")
        assert {p: 2 * c for p, c in once.entries} == dict(twice.entries)

    def test_windows_do_not_cross_explanations(self):
        a = "strong demand growth"
        b = "weak pricing pressure"
        table = top_ngrams([("low", a), ("low", b)], n=3, bucket="low")
        phrases = [p for p, _ in table.entries]
        assert all(" ".join(sorted(set(p.split()))) != "demand growth weak" for p in phrases)
        assert len(table.entries) == 2

    def test_order_invariance(self):
        texts = [("low", "challenging market conditions persist today"),
                 ("low", "weak demand conditions challenge margins"),
                 ("low", "challenging market conditions persist again")]
        fwd = top_ngrams(texts, n=3, bucket="low")
        rev = top_ngrams(list(reversed(texts)), n=3, bucket="low")
        assert fwd.entries == rev.entries

    def test_matches_brute_force_oracle(self):
        explanations = [
            ("low", "challenging economic environment persists this quarter"),
            ("low", "weak demand across key markets continues"),
            ("low", "challenging economic environment and weak pricing"),
            ("high", "strong revenue growth across segments"),
            ("high", "improving market conditions support strong growth"),
            ("high", "strong revenue growth and strong demand"),
        ]
        for bucket in ("low", "high"):
            for n in (3, 4):
                table = top_ngrams(explanations, n=n, k=50, bucket=bucket)
                counts = {}
                for b, text in explanations:
                    if b != bucket:
                        continue
                    toks = normalize_tokens(text, exclude=proper_nouns(text))
                    for i in range(len(toks) - n + 1):
                        phrase = " ".join(toks[i : i + n])
                        counts[phrase] = counts.get(phrase, 0) + 1
                expected = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
                assert table.entries == expected

    def test_total_trigram_count_formula(self):
        rng = random.Random(4)
        vocab = ["strong", "weak", "demand", "growth", "margin", "market", "price", "cost"]
        explanations = [
            ("high", " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 8))))
            for _ in range(40)
        ]
        table = top_ngrams(explanations, n=3, k=10_000, bucket="high")
        total = sum(c for _, c in table.entries)
        expected = 0
        for _, text in explanations:
            toks = normalize_tokens(text, exclude=proper_nouns(text))
            expected += max(len(toks) - 2, 0)
        assert total == expected

    def test_tie_break_phrase_ascending(self):
        table = top_ngrams(
            [("low", "weak demand growth"), ("low", "challenging market conditions")],
            n=3,
            bucket="low",
        )
        assert table.entries == sorted(table.entries, key=lambda kv: (-kv[1], kv[0]))

    def test_invalid_args(self):
        with pytest.raises(DataError):
            top_ngrams([], n=2, bucket="low")
        with pytest.raises(DataError):
            top_ngrams([], n=3, k=0, bucket="low")

    def test_bucket_mapping_and_extraction(self):
        assert bucket_of_choice("dec") == "low"
        assert bucket_of_choice("dec_subst") == "low"
        assert bucket_of_choice("inc") == "high"
        assert bucket_of_choice("inc_subst") == "high"
        assert bucket_of_choice("no_change") is None
        answers = [
            answer_from_raw("c", 0, "economy_us", "Increase - strong demand growth"),
            answer_from_raw("c", 1, "economy_us", "No change - stable trends"),
            answer_from_raw("c", 2, "economy_us", "Decrease substantially - weak pricing"),
        ]
        pairs = explanations_from_answers(answers)
        assert [b for b, _ in pairs] == ["high", "low"]

    def test_table_shape_matches_two_by_two_by_topk(self, tmp_path):
        explanations = [
            ("low", "challenging market conditions persist across regions today"),
            ("high", "strong revenue growth across segments this quarter"),
        ] * 3
        tables = [
            top_ngrams(explanations, n=n, k=10, bucket=b)
            for b in ("low", "high")
            for n in (3, 4)
        ]
        assert len(tables) == 4
        for t in tables:
            assert isinstance(t, NgramTable)
            assert len(t.entries) <= 10
            for phrase, count in t.entries:
                assert len(phrase.split()) == t.n
                assert count >= 1
        tables[0].to_csv(tmp_path / "t.csv")
        assert (tmp_path / "t.csv").read_text().startswith("phrase,count")
