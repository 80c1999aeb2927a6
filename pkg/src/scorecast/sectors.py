"""The 19 NAICS sectors used for industry aggregation.

The 20 two-digit NAICS sectors collapse to 19 because "Other Services
(except Public Administration)" is merged into "Public Administration"
before any aggregation. `normalize_sector` applies that merge and accepts
either a canonical id or a two-digit NAICS code.
"""

from __future__ import annotations

from .errors import CorpusError

# canonical id -> (NAICS code(s), display name)
SECTORS: dict[str, tuple[tuple[str, ...], str]] = {
    "agriculture": (("11",), "Agriculture, Forestry, Fishing and Hunting"),
    "mining": (("21",), "Mining, Quarrying, and Oil and Gas Extraction"),
    "utilities": (("22",), "Utilities"),
    "construction": (("23",), "Construction"),
    "manufacturing": (("31", "32", "33"), "Manufacturing"),
    "wholesale_trade": (("42",), "Wholesale Trade"),
    "retail_trade": (("44", "45"), "Retail Trade"),
    "transportation_warehousing": (("48", "49"), "Transportation and Warehousing"),
    "information": (("51",), "Information"),
    "finance_insurance": (("52",), "Finance and Insurance"),
    "real_estate": (("53",), "Real Estate and Rental and Leasing"),
    "professional_services": (("54",), "Professional, Scientific, and Technical Services"),
    "management": (("55",), "Management of Companies and Enterprises"),
    "administrative_support": (("56",), "Administrative and Support and Waste Management"),
    "educational_services": (("61",), "Educational Services"),
    "health_care": (("62",), "Health Care and Social Assistance"),
    "arts_entertainment": (("71",), "Arts, Entertainment, and Recreation"),
    "accommodation_food": (("72",), "Accommodation and Food Services"),
    # "Other Services (except Public Administration)" (81) is merged in here.
    "public_administration": (("81", "92"), "Public Administration"),
}

SECTOR_IDS: tuple[str, ...] = tuple(SECTORS)

# Pre-merge label accepted on input, folded into public_administration.
_MERGED_ALIASES = {"other_services": "public_administration"}

_CODE_TO_ID = {code: sid for sid, (codes, _) in SECTORS.items() for code in codes}


def normalize_sector(label: str) -> str:
    """Map an input sector label (canonical id, alias, or NAICS code) to a canonical id."""
    key = str(label).strip().lower()
    if key in SECTORS:
        return key
    if key in _MERGED_ALIASES:
        return _MERGED_ALIASES[key]
    if key in _CODE_TO_ID:
        return _CODE_TO_ID[key]
    raise CorpusError(f"unknown NAICS sector label {label!r}")
