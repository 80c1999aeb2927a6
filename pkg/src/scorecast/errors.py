"""Exception types shared across the package."""


class ScorecastError(Exception):
    """Base class for all package errors."""


class CorpusError(ScorecastError):
    """Malformed, duplicate, or otherwise invalid transcript data."""


class TaggerError(ScorecastError):
    """An entity tagger returned invalid spans or failed outright."""


class BackendError(ScorecastError):
    """A chat-model backend failed after its configured retries."""


class DataError(ScorecastError):
    """Series/panel inputs violate a precondition (missing periods, bad levels)."""


class EstimationError(ScorecastError):
    """A regression or VAR could not be estimated (rank, sample size, variance)."""


class PipelineError(ScorecastError):
    """Configuration or orchestration failure in the end-to-end pipeline."""
