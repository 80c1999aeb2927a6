"""Prompt construction, response parsing, and call-level score assembly.

Each of the 14 expectation questions is sent once per transcript chunk.
Responses follow the "choice - explanation" convention; the five choices map
to scores {-1, -0.5, 0, 0.5, 1}, a declared lack of information maps to 0,
and anything unparseable is flagged malformed and also scored 0.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .backends import ModelBackend
from .corpus import Chunk, Transcript, chunk_transcript
from .errors import BackendError, DataError
from .quarters import Quarter

log = logging.getLogger(__name__)

PROMPT_TEMPLATE = (
    "The following text is an excerpt from a company's earnings call transcripts. "
    "You are a finance expert. Based on this text only, please answer the following "
    "question. Over the next quarter, how does the firm anticipate a change in "
    "{clause} There are five choices: Increase substantially, increase, no change, "
    "decrease, and decrease substantially. Please select one of the above five "
    "choices for each question and provide a one-sentence explanation of your choice "
    'for each question. The format for the answer to each question should be '
    '"choice - explanation." If no relevant information is provided related to the '
    'question, answer "no information is provided."'
    "\n\n{chunk}"
)


@dataclass(frozen=True)
class Question:
    question_id: str
    clause: str  # completes "... anticipate a change in ..."


QUESTIONS: dict[str, Question] = {
    q.question_id: q
    for q in (
        Question("economy_us", "optimism about the US economy?"),
        Question("economy_global", "optimism about the global economy?"),
        Question("firm_prospects", "their firm's financial prospects?"),
        Question("industry_prospects", "their industry's financial prospects?"),
        Question("earnings", "earnings?"),
        Question("revenue", "revenue?"),
        Question("capx", "investments?"),
        Question("wages", "wages and salaries expenses?"),
        Question("employees", "number of employees?"),
        Question("demand", "demand for their products or services?"),
        Question("production", "production quantity of its products?"),
        Question("product_price", "product or service prices?"),
        Question("input_price", "input or commodity prices?"),
        Question("cost_of_capital", "the cost of capital?"),
    )
}

CHOICES = ("dec_subst", "dec", "no_change", "inc", "inc_subst", "no_info")

CHOICE_SCORES = {
    "dec_subst": -1.0,
    "dec": -0.5,
    "no_change": 0.0,
    "inc": 0.5,
    "inc_subst": 1.0,
    "no_info": 0.0,
}

# Canonical display phrase per choice (the prompt's wording).
CHOICE_TEXT = {
    "dec_subst": "Decrease substantially",
    "dec": "Decrease",
    "no_change": "No change",
    "inc": "Increase",
    "inc_subst": "Increase substantially",
}

# Accepted spellings of each choice, after lowercasing / whitespace collapse.
_CHOICE_SYNONYMS = {
    "decrease substantially": "dec_subst",
    "substantially decrease": "dec_subst",
    "substantial decrease": "dec_subst",
    "significantly decrease": "dec_subst",
    "significant decrease": "dec_subst",
    "decrease": "dec",
    "no change": "no_change",
    "increase": "inc",
    "increase substantially": "inc_subst",
    "substantially increase": "inc_subst",
    "substantial increase": "inc_subst",
    "significantly increase": "inc_subst",
    "significant increase": "inc_subst",
}

_NO_INFO_RE = re.compile(r"^no (relevant )?information\b")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class ChunkAnswer:
    call_id: str
    chunk_index: int
    question_id: str
    choice: str
    explanation: str
    raw: str
    parse_status: str  # ok | no_info | malformed


@dataclass(frozen=True)
class FirmQuarterScore:
    firm_id: str
    calendar_quarter: Quarter
    question_id: str
    score: float
    n_chunks: int
    n_malformed: int


def build_prompt(question: Question, chunk: Chunk) -> str:
    if not chunk.text.strip():
        raise DataError(f"chunk {chunk.call_id}/{chunk.index} is empty")
    return PROMPT_TEMPLATE.format(clause=question.clause, chunk=chunk.text)


def score_choice(choice: str) -> float:
    return CHOICE_SCORES[choice]


def _normalize_phrase(text: str) -> str:
    return _WS_RE.sub(" ", text.strip().strip(".").strip()).lower()


def parse_response(raw: str) -> tuple[str, str, str]:
    """Parse a model reply into (choice, explanation, parse_status).

    The leading phrase before the first "-" is matched case-insensitively
    against the five choices and the no-information fallback; anything else
    is malformed and scores 0 (choice treated as "no_change").
    """
    head, _, tail = raw.partition("-")
    candidate = _normalize_phrase(head)
    explanation = tail.strip()
    if _NO_INFO_RE.match(candidate):
        return "no_info", explanation, "no_info"
    choice = _CHOICE_SYNONYMS.get(candidate)
    if choice is None:
        return "no_change", "", "malformed"
    return choice, explanation, "ok"


def answer_from_raw(call_id: str, chunk_index: int, question_id: str, raw: str) -> ChunkAnswer:
    choice, explanation, status = parse_response(raw)
    return ChunkAnswer(
        call_id=call_id,
        chunk_index=chunk_index,
        question_id=question_id,
        choice=choice,
        explanation=explanation,
        raw=raw,
        parse_status=status,
    )


def score_call(answers: list[ChunkAnswer]) -> tuple[float, int, int]:
    """Average per-chunk scores for one (call, question).

    Returns (score, n_chunks, n_malformed). All answers must share call_id
    and question_id.
    """
    if not answers:
        raise DataError("score_call needs at least one answer")
    call_ids = {a.call_id for a in answers}
    question_ids = {a.question_id for a in answers}
    if len(call_ids) != 1 or len(question_ids) != 1:
        raise DataError(f"mixed call/question ids in score_call: {call_ids} x {question_ids}")
    ordered = sorted(answers, key=lambda a: a.chunk_index)
    total = 0.0
    for a in ordered:
        total += score_choice(a.choice)
    n_malformed = sum(1 for a in ordered if a.parse_status == "malformed")
    return total / len(ordered), len(ordered), n_malformed


class ResponseCache:
    """Content-addressed response store: one JSON file per (chunk, question, model).

    Inserts go through a temp file + rename so concurrent writers can never
    leave a torn entry.
    """

    def __init__(self, root: "str | Path"):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(chunk_text: str, question_id: str, model_name: str) -> str:
        chunk_sha = hashlib.sha256(chunk_text.encode("utf-8")).hexdigest()
        return hashlib.sha256(f"{chunk_sha}|{question_id}|{model_name}".encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> "str | None":
        path = self._path(key)
        if not path.exists():
            return None
        with path.open("r", encoding="utf-8") as fp:
            return json.load(fp)["raw"]

    def put(self, key: str, raw: str, meta: "dict | None" = None) -> None:
        payload = {"raw": raw, **(meta or {})}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fp:
                json.dump(payload, fp, ensure_ascii=False)
            os.replace(tmp, self._path(key))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


def run_scoring(
    transcripts: list[Transcript],
    questions: list[Question],
    backend: ModelBackend,
    cache: "ResponseCache | None" = None,
    max_inflight: int = 4,
    max_words: int = 2500,
) -> tuple[list[FirmQuarterScore], list[ChunkAnswer]]:
    """Answer every (chunk x question) once and reduce to firm-quarter scores.

    Responses are cached under (chunk text hash, question, model); a rerun
    with a warm cache issues zero backend calls. Dispatch order never affects
    the output: assembly sorts on (call, question, chunk).
    """
    chunks_by_call: dict[str, list[Chunk]] = {}
    call_meta: dict[str, Transcript] = {}
    for t in transcripts:
        call_meta[t.call_id] = t
        chunks_by_call[t.call_id] = chunk_transcript(t, max_words=max_words)

    tasks: list[tuple[Chunk, Question]] = []
    for call_id in sorted(chunks_by_call):
        for chunk in chunks_by_call[call_id]:
            for q in questions:
                tasks.append((chunk, q))

    def fetch(task: tuple[Chunk, Question]) -> ChunkAnswer:
        chunk, question = task
        key = None
        if cache is not None:
            key = ResponseCache.key(chunk.text, question.question_id, backend.model_name)
            cached = cache.get(key)
            if cached is not None:
                return answer_from_raw(chunk.call_id, chunk.index, question.question_id, cached)
        prompt = build_prompt(question, chunk)
        try:
            raw = backend.complete(prompt)
        except BackendError as exc:
            raise BackendError(
                f"backend failed for call {chunk.call_id} chunk {chunk.index} "
                f"question {question.question_id}: {exc}"
            ) from exc
        if cache is not None and key is not None:
            cache.put(
                key,
                raw,
                {
                    "question_id": question.question_id,
                    "model": backend.model_name,
                    "chunk_sha": hashlib.sha256(chunk.text.encode("utf-8")).hexdigest(),
                },
            )
        return answer_from_raw(chunk.call_id, chunk.index, question.question_id, raw)

    if max_inflight > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=max_inflight) as pool:
            answers = list(pool.map(fetch, tasks))
    else:
        answers = [fetch(t) for t in tasks]

    answers.sort(key=lambda a: (a.call_id, a.question_id, a.chunk_index))

    # Pool chunk answers per (firm, quarter, question); normally one call each.
    grouped: dict[tuple[str, Quarter, str], list[ChunkAnswer]] = {}
    for a in answers:
        meta = call_meta[a.call_id]
        grouped.setdefault((meta.firm_id, meta.calendar_quarter, a.question_id), []).append(a)

    scores: list[FirmQuarterScore] = []
    for (firm_id, quarter, question_id), group in sorted(
        grouped.items(), key=lambda kv: (kv[0][0], kv[0][1].index, kv[0][2])
    ):
        total = 0.0
        for a in group:
            total += score_choice(a.choice)
        scores.append(
            FirmQuarterScore(
                firm_id=firm_id,
                calendar_quarter=quarter,
                question_id=question_id,
                score=total / len(group),
                n_chunks=len(group),
                n_malformed=sum(1 for a in group if a.parse_status == "malformed"),
            )
        )
    return scores, answers


def write_scores_csv(scores: list[FirmQuarterScore], path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["firm_id", "year", "quarter", "question_id", "score", "n_chunks", "n_malformed"])
        for s in scores:
            writer.writerow(
                [
                    s.firm_id,
                    s.calendar_quarter.year,
                    s.calendar_quarter.quarter,
                    s.question_id,
                    repr(s.score),
                    s.n_chunks,
                    s.n_malformed,
                ]
            )


def read_scores_csv(path: "str | Path") -> list[FirmQuarterScore]:
    out: list[FirmQuarterScore] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fp:
        for row in csv.DictReader(fp):
            out.append(
                FirmQuarterScore(
                    firm_id=row["firm_id"],
                    calendar_quarter=Quarter(int(row["year"]), int(row["quarter"])),
                    question_id=row["question_id"],
                    score=float(row["score"]),
                    n_chunks=int(row["n_chunks"]),
                    n_malformed=int(row["n_malformed"]),
                )
            )
    return out


def write_answers_csv(answers: list[ChunkAnswer], path: "str | Path") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["call_id", "chunk_index", "question_id", "choice", "explanation", "parse_status", "raw"])
        for a in answers:
            writer.writerow(
                [a.call_id, a.chunk_index, a.question_id, a.choice, a.explanation, a.parse_status, a.raw]
            )


def read_answers_csv(path: "str | Path") -> list[ChunkAnswer]:
    out: list[ChunkAnswer] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fp:
        for row in csv.DictReader(fp):
            out.append(
                ChunkAnswer(
                    call_id=row["call_id"],
                    chunk_index=int(row["chunk_index"]),
                    question_id=row["question_id"],
                    choice=row["choice"],
                    explanation=row["explanation"],
                    raw=row["raw"],
                    parse_status=row["parse_status"],
                )
            )
    return out
