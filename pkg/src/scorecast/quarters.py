"""Calendar-quarter arithmetic used by every time-indexed structure.

A quarter is a (year, 1..4) pair with integer arithmetic on a flat index,
so `q + 1` is the next quarter and `q2 - q1` counts quarters between them.
Annual periods are plain ints (the year).
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass
from functools import total_ordering

from .errors import DataError

_QUARTER_RE = re.compile(r"^(\d{4})Q([1-4])$")


@total_ordering
@dataclass(frozen=True)
class Quarter:
    year: int
    quarter: int

    def __post_init__(self):
        if not 1 <= self.quarter <= 4:
            raise DataError(f"quarter must be 1..4, got {self.quarter}")

    @property
    def index(self) -> int:
        return self.year * 4 + (self.quarter - 1)

    @classmethod
    def from_index(cls, idx: int) -> "Quarter":
        return cls(idx // 4, idx % 4 + 1)

    @classmethod
    def parse(cls, text: str) -> "Quarter":
        m = _QUARTER_RE.match(text.strip())
        if m is None:
            raise DataError(f"cannot parse quarter label {text!r} (expected YYYYQn)")
        return cls(int(m.group(1)), int(m.group(2)))

    @classmethod
    def of_date(cls, date: _dt.date) -> "Quarter":
        return cls(date.year, (date.month - 1) // 3 + 1)

    def __add__(self, n: int) -> "Quarter":
        return Quarter.from_index(self.index + n)

    def __sub__(self, other):
        if isinstance(other, Quarter):
            return self.index - other.index
        return Quarter.from_index(self.index - other)

    def __lt__(self, other: "Quarter") -> bool:
        return self.index < other.index

    def __str__(self) -> str:
        return f"{self.year}Q{self.quarter}"


def quarter_range(first: Quarter, last: Quarter) -> list[Quarter]:
    """All quarters from `first` to `last` inclusive."""
    if last < first:
        raise DataError(f"empty quarter range {first}..{last}")
    return [Quarter.from_index(i) for i in range(first.index, last.index + 1)]


def parse_period(text: str) -> "Quarter | int":
    """Parse a period label: YYYYQn -> Quarter, YYYY -> int year."""
    text = text.strip()
    if _QUARTER_RE.match(text):
        return Quarter.parse(text)
    if re.match(r"^\d{4}$", text):
        return int(text)
    raise DataError(f"cannot parse period label {text!r} (expected YYYYQn or YYYY)")
