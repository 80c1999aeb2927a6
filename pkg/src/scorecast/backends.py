"""Chat-model backends behind one minimal interface.

`MockBackend` is fully deterministic (seeded hash of the prompt) and is what
every golden test runs against. `OpenAICompatBackend` speaks the standard
chat-completion wire format: POST {model, messages, temperature} to
`<base_url>/chat/completions` with a bearer token taken from an environment
variable.
"""

from __future__ import annotations

import hashlib
import os
import time
from typing import Protocol

import requests

from .errors import BackendError

DEFAULT_API_KEY_ENV = "SCORECAST_API_KEY"


class ModelBackend(Protocol):
    backend_id: str
    model_name: str

    def complete(self, prompt: str) -> str: ...


_POSITIVE_PHRASES = (
    "strong revenue growth across segments",
    "improving market conditions support optimism",
    "management expects strong demand growth",
    "strong sales growth this quarter",
    "positive business performance continues",
    "strong financial performance cited",
    "order backlog indicates strong demand",
    "strong first quarter results reported",
)
_NEGATIVE_PHRASES = (
    "challenging economic environment persists",
    "weak demand in key markets",
    "challenging market conditions cited",
    "global economic uncertainty weighs on outlook",
    "pricing pressure on margins continues",
    "currency headwinds remain challenging",
    "soft order trends across regions",
    "cautious tone on global economic conditions",
)
_NEUTRAL_PHRASES = (
    "management maintains prior guidance",
    "stable conditions expected next quarter",
    "outlook unchanged from last quarter",
    "no directional commentary beyond current levels",
)

_CHOICE_PHRASES = (
    ("Decrease substantially", _NEGATIVE_PHRASES),
    ("Decrease", _NEGATIVE_PHRASES),
    ("No change", _NEUTRAL_PHRASES),
    ("Increase", _POSITIVE_PHRASES),
    ("Increase substantially", _POSITIVE_PHRASES),
)


class MockBackend:
    """Deterministic stand-in model: seeded hash of the prompt picks the answer.

    Identical (prompt, model, temperature, seed) always yields identical
    output. `calls` counts completions actually served, so cache tests can
    assert on traffic.
    """

    backend_id = "mock"

    def __init__(self, model_name: str = "mock-chat", seed: int = 0, temperature: float = 0.0):
        self.model_name = model_name
        self.seed = seed
        self.temperature = temperature
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        key = f"{self.seed}|{self.model_name}|{self.temperature:.6f}|{prompt}"
        h = int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")
        bucket = h % 16
        if bucket == 15:
            return "The outlook appears mixed with several moving parts."
        if bucket == 14:
            return "no information is provided"
        phrase, bank = _CHOICE_PHRASES[(h >> 8) % 5]
        explanation = bank[(h >> 16) % len(bank)]
        return f"{phrase} - {explanation}."


class OpenAICompatBackend:
    """Client for any endpoint speaking the OpenAI chat-completion format.

    Retries connection errors, 429, and 5xx responses with exponential
    backoff; anything still failing raises BackendError.
    """

    backend_id = "openai-compat"

    def __init__(
        self,
        base_url: str,
        model_name: str,
        temperature: float = 0.0,
        seed: "int | None" = 0,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        max_retries: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 60.0,
        session: "requests.Session | None" = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.temperature = temperature
        self.seed = seed
        self.api_key_env = api_key_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.session = session or requests.Session()
        self.calls = 0

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.api_key_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str) -> str:
        payload: dict = {
            "model": self.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        if self.seed is not None:
            payload["seed"] = self.seed
        url = f"{self.base_url}/chat/completions"
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                self.calls += 1
                resp = self.session.post(url, json=payload, headers=self._headers(), timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise BackendError(f"backend returned HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise BackendError(f"malformed backend response: {exc}") from exc
        raise BackendError(f"backend unreachable after {self.max_retries + 1} attempts ({last_error})")
