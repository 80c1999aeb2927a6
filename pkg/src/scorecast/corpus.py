"""Transcript ingestion and word-bounded chunking.

Corpus files are JSON Lines, one transcript per line, with keys
call_id, firm_id, naics_sector, year, quarter, call_date, text.
"""

from __future__ import annotations

import datetime as _dt
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError, DataError
from .quarters import Quarter
from .sectors import normalize_sector

# A word is a maximal run of non-whitespace characters.
_WORD_RE = re.compile(r"\S+")
# Sentence boundary: ./?/! followed by whitespace and an uppercase letter.
_SENTENCE_RE = re.compile(r"(?<=[.?!])\s+(?=[A-Z])")

REQUIRED_FIELDS = ("call_id", "firm_id", "naics_sector", "year", "quarter", "call_date", "text")


@dataclass(frozen=True)
class Transcript:
    call_id: str
    firm_id: str
    naics_sector: str
    calendar_quarter: Quarter
    call_date: _dt.date
    text: str


@dataclass(frozen=True)
class Chunk:
    call_id: str
    index: int
    text: str
    word_count: int


def _parse_record(obj: dict, lineno: int) -> Transcript:
    missing = [k for k in REQUIRED_FIELDS if k not in obj]
    if missing:
        raise CorpusError(f"line {lineno}: record missing field(s) {', '.join(missing)}")
    try:
        quarter = Quarter(int(obj["year"]), int(obj["quarter"]))
        call_date = _dt.date.fromisoformat(str(obj["call_date"]))
    except (ValueError, TypeError, DataError) as exc:
        raise CorpusError(f"line {lineno}: {exc}") from exc
    if Quarter.of_date(call_date) != quarter:
        raise CorpusError(
            f"line {lineno}: call_date {call_date} falls in {Quarter.of_date(call_date)}, "
            f"not the declared quarter {quarter}"
        )
    try:
        sector = normalize_sector(obj["naics_sector"])
    except CorpusError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from exc
    return Transcript(
        call_id=str(obj["call_id"]),
        firm_id=str(obj["firm_id"]),
        naics_sector=sector,
        calendar_quarter=quarter,
        call_date=call_date,
        text=str(obj["text"]),
    )


def ingest_corpus(path: str | Path, format: str = "jsonl") -> list[Transcript]:
    """Read, validate, and sort a transcript corpus.

    Records are sorted by (firm_id, calendar_quarter). Duplicate call_ids,
    malformed lines, unknown sectors, and quarter/date mismatches raise
    CorpusError with the offending line number(s).
    """
    if format != "jsonl":
        raise CorpusError(f"unsupported corpus format {format!r}")
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    transcripts: list[Transcript] = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"line {lineno}: expected a JSON object")
            rec = _parse_record(obj, lineno)
            if rec.call_id in seen:
                raise CorpusError(
                    f"duplicate call_id {rec.call_id!r} at lines {seen[rec.call_id]} and {lineno}"
                )
            seen[rec.call_id] = lineno
            transcripts.append(rec)
    transcripts.sort(key=lambda t: (t.firm_id, t.calendar_quarter.index, t.call_id))
    return transcripts


def write_corpus(transcripts: list[Transcript], path: str | Path) -> None:
    """Write transcripts back out in the JSON Lines corpus schema."""
    with Path(path).open("w", encoding="utf-8") as fp:
        for t in transcripts:
            fp.write(
                json.dumps(
                    {
                        "call_id": t.call_id,
                        "firm_id": t.firm_id,
                        "naics_sector": t.naics_sector,
                        "year": t.calendar_quarter.year,
                        "quarter": t.calendar_quarter.quarter,
                        "call_date": t.call_date.isoformat(),
                        "text": t.text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def split_sentences(text: str) -> list[str]:
    """Split on sentence boundaries (./?/! + whitespace + uppercase)."""
    return [s for s in _SENTENCE_RE.split(text) if s.strip()]


def chunk_transcript(transcript: Transcript, max_words: int = 2500) -> list[Chunk]:
    """Segment a call into chunks of at most `max_words` words.

    Sentences are packed greedily; a sentence that would overflow the current
    chunk starts a new one, and a single sentence longer than `max_words` is
    hard-split at the word limit. Empty text yields an empty list.
    """
    if max_words < 1:
        raise CorpusError(f"max_words must be >= 1, got {max_words}")
    pieces: list[list[str]] = []  # word lists per chunk
    current: list[str] = []
    for sentence in split_sentences(transcript.text):
        words = _WORD_RE.findall(sentence)
        if not words:
            continue
        if current and len(current) + len(words) > max_words:
            pieces.append(current)
            current = []
        if len(words) > max_words:
            # Single sentence over the limit: hard-split at the word limit.
            for i in range(0, len(words), max_words):
                part = words[i : i + max_words]
                if len(part) == max_words:
                    pieces.append(part)
                else:
                    current = part
        else:
            current.extend(words)
    if current:
        pieces.append(current)
    return [
        Chunk(call_id=transcript.call_id, index=i, text=" ".join(words), word_count=len(words))
        for i, words in enumerate(pieces)
    ]


def word_count(text: str) -> int:
    return len(_WORD_RE.findall(text))
