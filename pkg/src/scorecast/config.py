"""Run configuration: a sectioned key=value file, validated before any stage runs.

Every pipeline default mirrors the reference settings: 2,500-word chunks,
quarterly frames with 4 dependent-variable lags, Newey-West with 2 lags
where stated, an 8-variable VAR with 2 lags, horizon 20, 2,000 bootstrap
replications, 95% bands. The seed is mandatory; all stage randomness flows
from it through named substreams.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PipelineError
from .scoring import QUESTIONS
from .var import DEFAULT_VARIABLES

KNOWN_KEYS = {
    "run": {"seed", "out"},
    "corpus": {"path", "max_words"},
    "mask": {"enabled", "fraction", "tagger", "gazetteer"},
    "scoring": {"backend", "model", "temperature", "base_url", "cache_dir",
                "max_inflight", "questions", "api_key_env"},
    "aggregate": {"levels", "questions"},
    "frame": {"target", "horizons", "lags", "controls", "level", "macro"},
    "regress": {"estimator", "nw_lags", "intercept"},
    "var": {"data", "order", "lags", "shock", "horizon", "reps", "coverage", "accumulate"},
    "composite": {"firm_sales", "min_window", "level"},
    "ngrams": {"top", "sizes", "buckets"},
    "report": {"kinds", "target"},
}

# keys whose values are filesystem paths (hashed by basename in stage digests)
PATH_KEYS = {"path", "cache_dir", "macro", "data", "firm_sales", "gazetteer", "out"}


@dataclass
class RunConfig:
    seed: int
    out_dir: Path
    corpus_path: Path
    max_words: int = 2500
    mask_enabled: bool = True
    mask_fraction: float = 0.10
    tagger: str = "heuristic"
    gazetteer: "Path | None" = None
    backend: str = "mock"
    model: str = "mock-chat"
    temperature: float = 0.0
    base_url: str = ""
    cache_dir: "Path | None" = None
    max_inflight: int = 4
    api_key_env: str = "SCORECAST_API_KEY"
    questions: tuple = tuple(QUESTIONS)
    agg_levels: tuple = ("national", "industry")
    macro_path: "Path | None" = None
    frame_target: str = "real_gdp"
    frame_horizons: tuple = (1,)
    frame_lags: int = 4
    frame_controls: tuple = ("term_spread", "real_ffr", "gz_spread")
    frame_level: str = "national"
    regress_estimator: str = "nw"
    regress_nw_lags: "int | None" = None
    regress_intercept: bool = True
    var_data: "Path | None" = None
    var_order: tuple = DEFAULT_VARIABLES
    var_lags: int = 2
    var_shock: str = "ai_economy_score"
    var_horizon: int = 20
    var_reps: int = 2000
    var_coverage: float = 0.95
    var_accumulate: "tuple | None" = None
    firm_sales: "Path | None" = None
    composite_min_window: int = 8
    composite_level: str = "national"
    ngram_top: int = 10
    ngram_sizes: tuple = (3, 4)
    ngram_buckets: tuple = ("low", "high")
    report_kinds: tuple = ("score_vs_growth", "score_by_industry", "irf")
    raw_sections: dict = field(default_factory=dict)
    source_path: "Path | None" = None


def _split(value: str) -> tuple:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def load_config(path: "str | Path", seed_override: "int | None" = None,
                out_override: "str | None" = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise PipelineError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path, encoding="utf-8")
    sections = {s: dict(parser.items(s)) for s in parser.sections()}

    def get(section: str, key: str, default=None):
        return sections.get(section, {}).get(key, default)

    base = path.parent

    def as_path(value) -> "Path | None":
        if value in (None, ""):
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    seed = seed_override if seed_override is not None else get("run", "seed")
    if seed is None:
        raise PipelineError("config must set [run] seed (or pass --seed)")
    out = out_override or get("run", "out") or "out"

    questions = get("scoring", "questions", "all")
    question_ids = tuple(QUESTIONS) if questions == "all" else _split(questions)

    cfg = RunConfig(
        seed=int(seed),
        out_dir=Path(out) if Path(out).is_absolute() else base / out,
        corpus_path=as_path(get("corpus", "path", "corpus.jsonl")),
        max_words=int(get("corpus", "max_words", 2500)),
        mask_enabled=str(get("mask", "enabled", "true")).lower() in ("1", "true", "yes"),
        mask_fraction=float(get("mask", "fraction", 0.10)),
        tagger=get("mask", "tagger", "heuristic"),
        gazetteer=as_path(get("mask", "gazetteer")),
        backend=get("scoring", "backend", "mock"),
        model=get("scoring", "model", "mock-chat"),
        temperature=float(get("scoring", "temperature", 0.0)),
        base_url=get("scoring", "base_url", ""),
        cache_dir=as_path(get("scoring", "cache_dir")),
        max_inflight=int(get("scoring", "max_inflight", 4)),
        api_key_env=get("scoring", "api_key_env", "SCORECAST_API_KEY"),
        questions=question_ids,
        agg_levels=_split(get("aggregate", "levels", "national,industry")),
        macro_path=as_path(get("frame", "macro")),
        frame_target=get("frame", "target", "real_gdp"),
        frame_horizons=tuple(int(h) for h in _split(get("frame", "horizons", "1"))),
        frame_lags=int(get("frame", "lags", 4)),
        frame_controls=_split(get("frame", "controls", "term_spread,real_ffr,gz_spread")),
        frame_level=get("frame", "level", "national"),
        regress_estimator=get("regress", "estimator", "nw"),
        regress_nw_lags=(int(get("regress", "nw_lags")) if get("regress", "nw_lags") else None),
        regress_intercept=str(get("regress", "intercept", "true")).lower() in ("1", "true", "yes"),
        var_data=as_path(get("var", "data")),
        var_order=(_split(get("var", "order")) or DEFAULT_VARIABLES),
        var_lags=int(get("var", "lags", 2)),
        var_shock=get("var", "shock", "ai_economy_score"),
        var_horizon=int(get("var", "horizon", 20)),
        var_reps=int(get("var", "reps", 2000)),
        var_coverage=float(get("var", "coverage", 0.95)),
        var_accumulate=(_split(get("var", "accumulate")) or None),
        firm_sales=as_path(get("composite", "firm_sales")),
        composite_min_window=int(get("composite", "min_window", 8)),
        composite_level=get("composite", "level", "national"),
        ngram_top=int(get("ngrams", "top", 10)),
        ngram_sizes=tuple(int(n) for n in _split(get("ngrams", "sizes", "3,4"))),
        ngram_buckets=_split(get("ngrams", "buckets", "low,high")),
        report_kinds=_split(get("report", "kinds", "score_vs_growth,score_by_industry,irf")),
        raw_sections=sections,
        source_path=path,
    )
    return cfg


def validate_config(cfg: RunConfig) -> list[str]:
    """Zero findings means the pipeline can run."""
    findings: list[str] = []
    for section, keys in cfg.raw_sections.items():
        if section not in KNOWN_KEYS:
            findings.append(f"unknown config section [{section}]")
            continue
        for key in keys:
            if key not in KNOWN_KEYS[section]:
                findings.append(f"unknown key {key!r} in section [{section}]")
    if cfg.corpus_path is None or not cfg.corpus_path.exists():
        findings.append(f"[corpus] path does not exist: {cfg.corpus_path}")
    if cfg.macro_path is not None and not cfg.macro_path.exists():
        findings.append(f"[frame] macro does not exist: {cfg.macro_path}")
    if cfg.var_data is not None and not cfg.var_data.exists():
        findings.append(f"[var] data does not exist: {cfg.var_data}")
    if cfg.firm_sales is not None and not cfg.firm_sales.exists():
        findings.append(f"[composite] firm_sales does not exist: {cfg.firm_sales}")
    if cfg.gazetteer is not None and not cfg.gazetteer.exists():
        findings.append(f"[mask] gazetteer does not exist: {cfg.gazetteer}")
    unknown_q = [q for q in cfg.questions if q not in QUESTIONS]
    if unknown_q:
        findings.append(f"[scoring] unknown question ids: {', '.join(unknown_q)}")
    if cfg.backend not in ("mock", "openai-compat"):
        findings.append(f"[scoring] unknown backend {cfg.backend!r}")
    if cfg.backend == "openai-compat" and not cfg.base_url:
        findings.append("[scoring] openai-compat backend needs base_url")
    if len(cfg.var_order) != 8:
        findings.append(f"[var] order names {len(cfg.var_order)} variables, expected 8")
    if cfg.var_shock not in cfg.var_order:
        findings.append(f"[var] shock {cfg.var_shock!r} not in the variable order")
    if cfg.var_data is not None and cfg.var_data.exists():
        header = cfg.var_data.read_text(encoding="utf-8").splitlines()[0].split(",")
        missing = [v for v in cfg.var_order if v not in header]
        if missing:
            findings.append(f"[var] variables absent from data CSV: {', '.join(missing)}")
    if not 0 < cfg.mask_fraction <= 1:
        findings.append(f"[mask] fraction out of range: {cfg.mask_fraction}")
    if cfg.tagger not in ("heuristic", "external"):
        findings.append(f"[mask] unknown tagger {cfg.tagger!r}")
    bad_levels = [lv for lv in cfg.agg_levels if lv not in ("national", "industry", "firm")]
    if bad_levels:
        findings.append(f"[aggregate] unknown levels: {', '.join(bad_levels)}")
    if cfg.regress_estimator not in ("ols", "nw", "fe"):
        findings.append(f"[regress] unknown estimator {cfg.regress_estimator!r}")
    for n in cfg.ngram_sizes:
        if n not in (3, 4):
            findings.append(f"[ngrams] size {n} unsupported (3 or 4)")
    return findings


def stage_config_digest(cfg: RunConfig, sections: tuple) -> str:
    """Digest of the named config sections with path values reduced to basenames.

    Basenames keep digests machine-independent; content changes of the files
    themselves are caught by input digests.
    """
    parts: list[str] = [f"seed={cfg.seed}"]
    for section in sections:
        for key, value in sorted(cfg.raw_sections.get(section, {}).items()):
            if key in PATH_KEYS and value:
                value = Path(value).name
            parts.append(f"{section}.{key}={value}")
    return hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()


def config_hash(cfg: RunConfig) -> str:
    return stage_config_digest(cfg, tuple(sorted(KNOWN_KEYS)))
