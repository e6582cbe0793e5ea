"""Pluggable completion-endpoint client.

Wire contract (completions style, JSON over HTTP POST to base_url):

    request:  {"model", "prompt", "temperature", "max_tokens", "stop"}
    response: {"text"}

A transport is any callable taking the request payload and returning the
response dict; the default transport does real HTTP via requests, and
``MockBackend`` serves canned completions from a fixture mapping prompt
hashes to text. Credentials come from an environment variable named in the
endpoint config and never appear in logs or error messages.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import requests

from .errors import (
    AuthError,
    ContextOverflowError,
    InferenceError,
    MalformedResponseError,
    TimeoutAfterRetriesError,
    ValidationError,
)

logger = logging.getLogger(__name__)

# crude token proxy: one budget unit per four characters
CHARS_PER_UNIT = 4


@dataclass
class DecodeParams:
    mode: str = "greedy"
    temperature: float = 0.0
    max_new_tokens: int = 512
    stop_sequences: tuple = ()

    def validate(self) -> None:
        if self.mode not in ("greedy", "sampled"):
            raise ValidationError(f"unknown decode mode: {self.mode!r}")
        if self.mode == "greedy" and self.temperature != 0.0:
            raise ValidationError("greedy decoding requires temperature 0")
        if self.max_new_tokens < 1:
            raise ValidationError("max_new_tokens must be >= 1")


@dataclass
class EndpointConfig:
    base_url: str = ""
    model_name: str = ""
    api_key_env: str = ""
    timeout: float = 30.0
    max_retries: int = 2
    context_budget: int = 4096
    decode: DecodeParams = field(default_factory=DecodeParams)

    def validate(self) -> None:
        if self.timeout <= 0:
            raise ValidationError("timeout must be positive")
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0")
        self.decode.validate()

    @classmethod
    def from_dict(cls, data: dict) -> "EndpointConfig":
        decode = DecodeParams(**data.pop("decode", {}))
        cfg = cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__}, decode=decode)
        cfg.validate()
        return cfg


@dataclass
class FewShotPrompt:
    instruction: str
    shots: list  # (input, output) tuples, oldest first
    query: str

    def render(self) -> str:
        parts = [self.instruction] if self.instruction else []
        for shot_input, shot_output in self.shots:
            parts.append(f"{shot_input}\n{shot_output}")
        parts.append(self.query)
        return "\n".join(parts)

    def units(self) -> int:
        return math.ceil(len(self.render()) / CHARS_PER_UNIT)


def assemble_fewshot(
    instruction: str, shots: Sequence, query: str, budget: int
) -> FewShotPrompt:
    """Build a few-shot prompt within budget, dropping oldest shots first.

    The query is never truncated; if it does not fit even with zero shots,
    that is a hard error.
    """
    prompt = FewShotPrompt(instruction, list(shots), query)
    while prompt.units() > budget and prompt.shots:
        prompt.shots.pop(0)
    if prompt.units() > budget:
        raise ContextOverflowError("query alone exceeds the context budget")
    return prompt


def _hash_prompt(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class MockBackend:
    """Deterministic transport for tests and offline pipeline runs.

    Looks up the completion by sha256 of the prompt text; falls back to a
    rule function (e.g. echo) when no fixture entry matches.
    """

    def __init__(self, fixture=None, rule: Optional[Callable[[str], str]] = None):
        if isinstance(fixture, (str, Path)):
            fixture = json.loads(Path(fixture).read_text(encoding="utf-8"))
        self.fixture = dict(fixture or {})
        self.rule = rule
        self.calls = 0

    @staticmethod
    def key_for(prompt: str) -> str:
        return _hash_prompt(prompt)

    def add(self, prompt: str, completion: str) -> None:
        self.fixture[_hash_prompt(prompt)] = completion

    def __call__(self, payload: dict) -> dict:
        self.calls += 1
        prompt = payload["prompt"]
        key = _hash_prompt(prompt)
        if key in self.fixture:
            return {"text": self.fixture[key]}
        if self.rule is not None:
            return {"text": self.rule(prompt)}
        return {"text": ""}


class HttpTransport:
    """Real HTTP transport; retries live in the client, not here."""

    def __init__(self, cfg: EndpointConfig):
        self.cfg = cfg

    def __call__(self, payload: dict) -> dict:
        api_key = os.environ.get(self.cfg.api_key_env, "")
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        resp = requests.post(
            self.cfg.base_url, json=payload, headers=headers, timeout=self.cfg.timeout
        )
        if resp.status_code in (429,) or resp.status_code >= 500:
            raise TransientTransportError(f"backend returned HTTP {resp.status_code}")
        if resp.status_code == 401 or resp.status_code == 403:
            raise AuthError("backend rejected the credential")
        if resp.status_code != 200:
            raise InferenceError(f"backend returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedResponseError("backend reply is not JSON") from exc


class TransientTransportError(InferenceError):
    """Retryable transport failure (connection, timeout, 429/5xx)."""


class CompletionClient:
    """Thread-safe client enforcing auth, budget, retries, and concurrency.

    At most ``max_in_flight`` requests run concurrently, process-wide per
    client. Backoff delays are base * 2^attempt, monotonically
    non-decreasing; the sleep function is injectable for tests.
    """

    def __init__(
        self,
        cfg: EndpointConfig,
        transport: Optional[Callable[[dict], dict]] = None,
        max_in_flight: int = 4,
        backoff_base: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
    ):
        cfg.validate()
        self.cfg = cfg
        self._uses_network = transport is None
        self.transport = transport if transport is not None else HttpTransport(cfg)
        self._sem = threading.BoundedSemaphore(max_in_flight)
        self.backoff_base = backoff_base
        self._sleep = sleep

    def _payload(self, prompt_text: str) -> dict:
        return {
            "model": self.cfg.model_name,
            "prompt": prompt_text,
            "temperature": self.cfg.decode.temperature,
            "max_tokens": self.cfg.decode.max_new_tokens,
            "stop": list(self.cfg.decode.stop_sequences),
        }

    def complete(self, prompt) -> str:
        """Send one completion request; returns the backend text.

        ``prompt`` is a FewShotPrompt or a plain string. Auth and budget are
        checked before anything is sent.
        """
        if isinstance(prompt, FewShotPrompt):
            units, text = prompt.units(), prompt.render()
        else:
            text = str(prompt)
            units = math.ceil(len(text) / CHARS_PER_UNIT)
        if self._uses_network and self.cfg.api_key_env and not os.environ.get(self.cfg.api_key_env):
            raise AuthError(f"credential env var {self.cfg.api_key_env} is not set")
        if units > self.cfg.context_budget:
            raise ContextOverflowError(
                f"prompt of {units} units exceeds budget {self.cfg.context_budget}"
            )
        payload = self._payload(text)
        last_error: Optional[Exception] = None
        with self._sem:
            for attempt in range(self.cfg.max_retries + 1):
                if attempt:
                    self._sleep(self.backoff_base * (2 ** (attempt - 1)))
                try:
                    reply = self.transport(payload)
                except (TransientTransportError, requests.ConnectionError, requests.Timeout) as exc:
                    last_error = exc
                    logger.warning("transient backend error (attempt %d): %s", attempt + 1, exc)
                    continue
                if not isinstance(reply, dict) or "text" not in reply:
                    raise MalformedResponseError("backend reply missing 'text' field")
                return reply["text"]
        raise TimeoutAfterRetriesError(
            f"backend still failing after {self.cfg.max_retries + 1} attempts: {last_error}"
        )
