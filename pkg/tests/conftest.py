import datetime as dt

import pytest

from scorecast.corpus import Transcript
from scorecast.quarters import Quarter


def make_transcript(
    text: str,
    call_id: str = "c1",
    firm_id: str = "f1",
    sector: str = "manufacturing",
    year: int = 2019,
    quarter: int = 2,
) -> Transcript:
    month = 3 * quarter - 1
    return Transcript(
        call_id=call_id,
        firm_id=firm_id,
        naics_sector=sector,
        calendar_quarter=Quarter(year, quarter),
        call_date=dt.date(year, month, 15),
        text=text,
    )


@pytest.fixture
def transcript_factory():
    return make_transcript
