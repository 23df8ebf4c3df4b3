"""LLM clients: a live HTTP provider and a record/replay pair for offline runs.

Replay fixtures are line-delimited JSON::

    {"request_hash": "<sha256>", "response": "<model text>",
     "usage": {"input_tokens": 812, "output_tokens": 57}}

The hash covers the prompt and the generation parameters, so a fixture file
answers exactly the requests it was recorded from.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from ..metrics import count_tokens

log = logging.getLogger(__name__)

API_BASE_ENV = "EASEPATCH_API_BASE"
API_KEY_ENV = "EASEPATCH_API_KEY"
MODEL_ENV = "EASEPATCH_MODEL"


class TransportError(RuntimeError):
    """The provider could not be reached or returned an unusable response."""


class ReplayMiss(TransportError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.0
    max_tokens: int = 4096


@dataclass(frozen=True)
class Usage:
    input_tokens: int = 0
    output_tokens: int = 0

    def __add__(self, other: "Usage") -> "Usage":
        return Usage(self.input_tokens + other.input_tokens, self.output_tokens + other.output_tokens)


@dataclass(frozen=True)
class Completion:
    text: str
    usage: Usage


class LlmClient(Protocol):
    def complete(self, prompt: str, params: GenerationParams | None = None) -> Completion: ...


def request_hash(prompt: str, params: GenerationParams | None = None) -> str:
    payload = json.dumps(
        {"prompt": prompt, "params": asdict(params or GenerationParams())},
        sort_keys=True, ensure_ascii=False, separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ReplayClient:
    """Answers requests from a fixture file; unknown requests raise :class:`ReplayMiss`."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._records: dict[str, Completion] = {}
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                row = json.loads(line)
                usage = Usage(**row.get("usage", {}))
                self._records[row["request_hash"]] = Completion(row["response"], usage)

    def __len__(self) -> int:
        return len(self._records)

    def complete(self, prompt: str, params: GenerationParams | None = None) -> Completion:
        key = request_hash(prompt, params)
        try:
            return self._records[key]
        except KeyError:
            raise ReplayMiss(f"no recorded response for request {key[:12]} in {self.path}") from None


class RecordingClient:
    """Forwards to ``inner`` and appends every exchange to a fixture file."""

    def __init__(self, inner: LlmClient, path: str | os.PathLike):
        self.inner = inner
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                self._seen = {json.loads(line)["request_hash"] for line in fh if line.strip()}

    def complete(self, prompt: str, params: GenerationParams | None = None) -> Completion:
        result = self.inner.complete(prompt, params)
        key = request_hash(prompt, params)
        with self._lock:
            if key not in self._seen:
                self._seen.add(key)
                row = {"request_hash": key, "response": result.text, "usage": asdict(result.usage)}
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
        return result


class CallableClient:
    """Wrap a plain ``prompt -> text`` function; usage is estimated locally."""

    def __init__(self, fn: Callable[[str], str]):
        self.fn = fn

    def complete(self, prompt: str, params: GenerationParams | None = None) -> Completion:
        text = self.fn(prompt)
        return Completion(text, Usage(count_tokens(prompt), count_tokens(text)))


class HttpClient:
    """Chat-completions style HTTP provider.

    Endpoint, key and model come from ``EASEPATCH_API_BASE``,
    ``EASEPATCH_API_KEY`` and ``EASEPATCH_MODEL`` unless given explicitly.
    """

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, *, retries: int = 2, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = (base_url or os.environ.get(API_BASE_ENV, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        self.model = model or os.environ.get(MODEL_ENV)
        if not self.base_url or not self.model:
            raise TransportError(f"set {API_BASE_ENV} and {MODEL_ENV} to use a live client")
        self.retries = retries
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def complete(self, prompt: str, params: GenerationParams | None = None) -> Completion:
        params = params or GenerationParams()
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        for attempt in range(self.retries + 1):
            try:
                resp = self._http.post(f"{self.base_url}/chat/completions", json=body)
            except httpx.TransportError as exc:
                problem = f"{type(exc).__name__}: {exc}"
            else:
                if resp.status_code < 400:
                    return self._completion(resp, prompt)
                problem = f"provider returned HTTP {resp.status_code}: {resp.text[:200]}"
                if resp.status_code < 500 and resp.status_code != 429:
                    raise TransportError(problem)
            if attempt < self.retries:
                log.warning("%s; retrying", problem)
                time.sleep(0.5 * 2**attempt)
        raise TransportError(problem)

    @staticmethod
    def _completion(resp: httpx.Response, prompt: str) -> Completion:
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed provider response: {exc}") from exc
        usage = data.get("usage") or {}
        return Completion(text, Usage(
            usage.get("prompt_tokens", count_tokens(prompt)),
            usage.get("completion_tokens", count_tokens(text)),
        ))


def make_client(spec: str) -> LlmClient:
    """``replay:<file>``, ``live``, or ``record:<file>`` (live, recorded to file)."""
    if spec.startswith("replay:"):
        return ReplayClient(spec[len("replay:"):])
    if spec == "live":
        return HttpClient()
    if spec.startswith("record:"):
        return RecordingClient(HttpClient(), spec[len("record:"):])
    raise ValueError(f"unknown client {spec!r}; expected replay:<file>, live or record:<file>")
