"""Explanation-text validation: normalization and frequent n-gram tables.

Explanations attached to low (decrease-side) and high (increase-side)
choices are normalized (lowercase, alphabetic tokens, stopword and
dictionary filters, rule-based lemmatizer) and counted as sliding-window
3-grams and 4-grams. The stopword list and English wordlist are bundled,
versioned data files.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .errors import DataError
from .scoring import ChunkAnswer

_ALPHA_RE = re.compile(r"[a-z]+")
_RAW_WORD_RE = re.compile(r"[A-Za-z][A-Za-z'\-]*")

LOW_CHOICES = frozenset({"dec", "dec_subst"})
HIGH_CHOICES = frozenset({"inc", "inc_subst"})


def _load_wordfile(name: str) -> frozenset:
    text = resources.files("scorecast").joinpath(f"data/{name}").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset:
    return _load_wordfile("stopwords.txt")


@lru_cache(maxsize=None)
def default_wordlist() -> frozenset:
    return _load_wordfile("english_words.txt")


class RuleLemmatizer:
    """Suffix stripper: plural -s/-es/-ies, -ing, and -ed with doubling repair.

    A suffix is stripped only when the resulting stem is in the wordlist
    (directly, after undoubling a doubled final consonant, or for -ed with a
    restored final "e"); otherwise the token is kept as-is.
    """

    def __init__(self, wordlist: "frozenset | None" = None):
        self.wordlist = default_wordlist() if wordlist is None else wordlist

    def __call__(self, token: str) -> str:
        w = self.wordlist
        if len(token) > 4 and token.endswith("ies"):
            stem = token[:-3] + "y"
            if stem in w:
                return stem
        if len(token) > 3 and token.endswith("es"):
            stem = token[:-2]
            if stem in w:
                return stem
        if len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
            stem = token[:-1]
            if stem in w:
                return stem
        if len(token) > 4 and token.endswith("ing"):
            stem = token[:-3]
            if stem in w:
                return stem
            if len(stem) > 1 and stem[-1] == stem[-2] and stem[:-1] in w:
                return stem[:-1]
            return token
        if len(token) > 4 and token.endswith("ed"):
            stem = token[:-2]
            if stem in w:
                return stem
            if len(stem) > 1 and stem[-1] == stem[-2] and stem[:-1] in w:
                return stem[:-1]
            if stem + "e" in w:
                return stem + "e"
            return token
        return token


def normalize_tokens(
    text: str,
    stopwords: "frozenset | None" = None,
    lemmatizer: "Callable[[str], str] | None" = None,
    wordlist: "frozenset | None" = None,
    exclude: "set | None" = None,
) -> list[str]:
    """Lowercase alphabetic tokens, minus stopwords and out-of-dictionary words,
    each passed through the lemmatizer.

    `exclude` drops raw lowercase tokens (e.g. detected proper nouns) before
    lemmatization.
    """
    stopwords = default_stopwords() if stopwords is None else stopwords
    wordlist = default_wordlist() if wordlist is None else wordlist
    lemmatizer = lemmatizer or RuleLemmatizer(wordlist)
    out: list[str] = []
    for token in _ALPHA_RE.findall(text.lower()):
        if token in stopwords or token not in wordlist:
            continue
        if exclude and token in exclude:
            continue
        out.append(lemmatizer(token))
    return out


def proper_nouns(text: str) -> set:
    """Lowercased words that appear capitalized mid-sentence in the raw text."""
    nouns: set = set()
    prev_end = None
    for m in _RAW_WORD_RE.finditer(text):
        word = m.group(0)
        at_start = prev_end is None or bool(
            re.search(r"[.?!]\s*$", text[prev_end : m.start()])
        )
        prev_end = m.end()
        if not at_start and word[0].isupper():
            nouns.update(_ALPHA_RE.findall(word.lower()))
    return nouns


@dataclass
class NgramTable:
    bucket: str  # low | high
    n: int
    entries: list  # (phrase, count), count desc then phrase asc

    def to_csv(self, path: "str | Path") -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["phrase", "count"])
            for phrase, count in self.entries:
                writer.writerow([phrase, count])


def bucket_of_choice(choice: str) -> "str | None":
    if choice in LOW_CHOICES:
        return "low"
    if choice in HIGH_CHOICES:
        return "high"
    return None


def explanations_from_answers(answers: Iterable[ChunkAnswer]) -> list[tuple[str, str]]:
    """(bucket, explanation) pairs for answers on the decrease or increase side."""
    out: list[tuple[str, str]] = []
    for a in answers:
        bucket = bucket_of_choice(a.choice)
        if bucket is not None and a.explanation:
            out.append((bucket, a.explanation))
    return out


def top_ngrams(
    explanations: list[tuple[str, str]],
    n: int,
    k: int = 10,
    bucket: str = "low",
    stopwords: "frozenset | None" = None,
    lemmatizer: "Callable[[str], str] | None" = None,
    wordlist: "frozenset | None" = None,
    drop_proper_nouns: bool = True,
) -> NgramTable:
    """Most frequent n-grams over the normalized explanations of one bucket.

    Windows never cross explanation boundaries. Ties break on the phrase
    (ascending) after the count (descending).
    """
    if n not in (3, 4):
        raise DataError(f"n must be 3 or 4, got {n}")
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    counts: dict[str, int] = {}
    for b, text in explanations:
        if b != bucket:
            continue
        tokens = normalize_tokens(
            text,
            stopwords=stopwords,
            lemmatizer=lemmatizer,
            wordlist=wordlist,
            exclude=proper_nouns(text) if drop_proper_nouns else None,
        )
        for i in range(len(tokens) - n + 1):
            phrase = " ".join(tokens[i : i + n])
            counts[phrase] = counts.get(phrase, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return NgramTable(bucket=bucket, n=n, entries=ranked[:k])
