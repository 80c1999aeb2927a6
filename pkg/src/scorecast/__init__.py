"""Earnings-call expectation scores and the econometrics built on them.

Submodules:
  corpus      transcript ingestion and word-bounded chunking
  anonymize   masked-identity variants (dates/entities -> "###")
  scoring     prompts, response parsing, call-level scores, response cache
  backends    chat-model backends (deterministic mock, OpenAI-compatible HTTP)
  panel       score aggregation, growth transforms, regression frames
  regression  OLS / Newey-West / within-entity estimators and tables
  var         VAR estimation, orthogonalized IRFs, bootstrap bands
  composite   expanding-window sales-weighted composite score
  textval     explanation normalization and n-gram frequency tables
  figures     plot-ready CSV emitters
  pipeline    staged end-to-end runs with a digest manifest
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BackendError,
    CorpusError,
    DataError,
    EstimationError,
    PipelineError,
    ScorecastError,
    TaggerError,
)
from .quarters import Quarter  # noqa: F401
