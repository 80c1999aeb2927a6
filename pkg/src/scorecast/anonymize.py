"""Masked-identity transcript variants: dates and named entities become "###".

Date masking is rule-based (years 1900-2099 and month names with their
common abbreviations). Entity masking goes through a pluggable tagger so an
external NER service can replace the bundled capitalization heuristic.
Replacement is one "###" per word, which keeps word counts stable for
downstream chunking.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .corpus import Transcript
from .errors import DataError, TaggerError

MASK_TOKEN = "###"

MONTH_NAMES = (
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
)
MONTH_ABBREVIATIONS = (
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sept", "sep", "oct", "nov", "dec",
)

# Standalone 4-digit tokens in 1900..2099; \b keeps "19995" and "ABC2008" untouched.
YEAR_RE = re.compile(r"\b(19\d{2}|20\d{2})\b")
MONTH_RE = re.compile(
    r"\b(" + "|".join(MONTH_NAMES + MONTH_ABBREVIATIONS) + r")\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class Replacement:
    start: int  # offsets into the masked text
    end: int
    category: str  # year | month | person | organization | product


@dataclass
class MaskReport:
    call_id: str
    masked_text: str
    replacements: list[Replacement] = field(default_factory=list)


@dataclass(frozen=True)
class EntitySpan:
    start: int  # offsets into the input text
    end: int
    category: str  # person | organization | product


class EntityTagger(Protocol):
    """Anything that maps text to non-overlapping person/org/product spans."""

    implementation_id: str

    def tag(self, text: str) -> list[EntitySpan]: ...


_WS_SPLIT = re.compile(r"^(\s*)(.*?)(\s*)$", re.S)


def _apply_spans(text: str, spans: list[tuple[int, int, str]]) -> tuple[str, list[Replacement]]:
    """Replace each span's words by MASK_TOKEN (one per word), left to right.

    Spans must be sorted and non-overlapping; offsets in the returned
    replacements refer to the masked text.
    """
    out: list[str] = []
    length = 0
    replacements: list[Replacement] = []
    cursor = 0
    for start, end, category in spans:
        out.append(text[cursor:start])
        length += start - cursor
        lead, core, trail = _WS_SPLIT.match(text[start:end]).groups()
        masked = " ".join(MASK_TOKEN for _ in core.split())
        out.append(lead + masked + trail)
        replacements.append(
            Replacement(start=length + len(lead), end=length + len(lead) + len(masked), category=category)
        )
        length += len(lead) + len(masked) + len(trail)
        cursor = end
    out.append(text[cursor:])
    return "".join(out), replacements


def _date_spans(text: str) -> list[tuple[int, int, str]]:
    spans = [(m.start(), m.end(), "year") for m in YEAR_RE.finditer(text)]
    spans += [(m.start(), m.end(), "month") for m in MONTH_RE.finditer(text)]
    spans.sort()
    return spans


def mask_dates(text: str) -> tuple[str, list[Replacement]]:
    """Replace years in 1900-2099 and month names/abbreviations by "###"."""
    return _apply_spans(text, _date_spans(text))


def _validated_entity_spans(text: str, tagger: EntityTagger) -> list[EntitySpan]:
    try:
        spans = tagger.tag(text)
    except Exception as exc:
        raise TaggerError(f"tagger {tagger.implementation_id!r} failed: {exc}") from exc
    ordered = sorted(spans, key=lambda s: (s.start, s.end))
    last_end = -1
    for s in ordered:
        if s.category not in ("person", "organization", "product"):
            raise TaggerError(
                f"tagger {tagger.implementation_id!r} returned category {s.category!r} "
                f"at offset {s.start}"
            )
        if s.start < last_end:
            raise TaggerError(
                f"tagger {tagger.implementation_id!r} returned overlapping spans at offset {s.start}"
            )
        last_end = s.end
    return ordered


def mask_entities(text: str, tagger: EntityTagger) -> tuple[str, list[Replacement]]:
    """Replace each tagged entity span's words by "###" (one per word)."""
    spans = _validated_entity_spans(text, tagger)
    return _apply_spans(text, [(s.start, s.end, s.category) for s in spans])


def mask_transcript(transcript: Transcript, tagger: "EntityTagger | None" = None) -> MaskReport:
    """Mask dates and (when a tagger is given) entities in a single pass.

    Entity spans take precedence; a date token inside an entity span is
    masked as part of that span rather than recorded twice.
    """
    text = transcript.text
    spans: list[tuple[int, int, str]] = []
    if tagger is not None:
        spans = [(s.start, s.end, s.category) for s in _validated_entity_spans(text, tagger)]
    covered = spans[:]
    for start, end, category in _date_spans(text):
        if any(start < e and end > s for s, e, _ in covered):
            continue
        spans.append((start, end, category))
    spans.sort()
    masked, replacements = _apply_spans(text, spans)
    return MaskReport(call_id=transcript.call_id, masked_text=masked, replacements=replacements)


class HeuristicTagger:
    """Capitalized-run tagger with an optional gazetteer.

    A run of capitalized words not at a sentence start is tagged as an
    organization; gazetteer entries (phrase -> category) are matched on word
    boundaries and take precedence over the heuristic.
    """

    implementation_id = "heuristic"

    _cap_word = re.compile(r"\b[A-Z][A-Za-z&.\-]*")
    _run_continuation = re.compile(r"\s+[A-Z][A-Za-z&.\-]*")

    def __init__(self, gazetteer: "dict[str, str] | None" = None):
        self.gazetteer = dict(gazetteer or {})

    @staticmethod
    def _at_sentence_start(text: str, pos: int) -> bool:
        i = pos - 1
        while i >= 0 and text[i] in "\"'(":
            i -= 1
        while i >= 0 and text[i].isspace():
            i -= 1
        return i < 0 or text[i] in ".?!"

    def tag(self, text: str) -> list[EntitySpan]:
        candidates: list[EntitySpan] = []
        for phrase, category in self.gazetteer.items():
            for m in re.finditer(r"\b" + re.escape(phrase) + r"\b", text):
                candidates.append(EntitySpan(m.start(), m.end(), category))
        # Prefer longer gazetteer matches when they overlap.
        candidates.sort(key=lambda s: (s.start, s.start - s.end))
        spans: list[EntitySpan] = []
        for s in candidates:
            if not any(s.start < t.end and s.end > t.start for t in spans):
                spans.append(s)

        def overlaps(a: int, b: int) -> bool:
            return any(a < s.end and b > s.start for s in spans)

        i = 0
        while True:
            m = self._cap_word.search(text, i)
            if m is None:
                break
            run_start, run_end = m.start(), m.end()
            while True:
                m2 = self._run_continuation.match(text, run_end)
                if m2 is None:
                    break
                run_end = m2.end()
            i = run_end
            if self._at_sentence_start(text, run_start):
                continue
            if overlaps(run_start, run_end):
                continue
            spans.append(EntitySpan(run_start, run_end, "organization"))
        spans.sort(key=lambda s: (s.start, s.end))
        return spans


def sample_corpus(transcripts: list[Transcript], fraction: float, seed: int) -> list[Transcript]:
    """Deterministic floor(fraction*N)-sized subsample, in stable corpus order."""
    if not 0 < fraction <= 1:
        raise DataError(f"fraction must be in (0, 1], got {fraction}")
    n = len(transcripts)
    size = int(np.floor(fraction * n))
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(n, size=size, replace=False).tolist()) if n else []
    return [transcripts[i] for i in chosen]
