# Copyright (c) 2026 The relevatr authors
"""Provider-agnostic completion client with HTTP backends, a record/replay store and a scripted test double."""

import logging
import os
import threading
import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from http import HTTPStatus
from pathlib import Path
from typing import Any, Protocol

import requests

from . import settings
from .exceptions import (
    AuthenticationError,
    CacheMissError,
    DigestConflictError,
    ProviderUnavailableError,
    RateLimitError,
    ReplayStoreError,
    RequestRejectedError,
    RetriesExhaustedError,
    TransportError,
)
from .utils import _append_jsonl, _dumps, _iter_jsonl, _sha256_text


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

OPENAI_BASE_URL = "https://api.openai.com/v1"
GEMINI_BASE_URL = "https://generativelanguage.googleapis.com/v1beta"
RETRYABLE_ERRORS = (RateLimitError, ProviderUnavailableError)


def request_digest(model_id: str, prompt: str) -> str:
    """Digest identifying a request: SHA-256 over the model id and prompt bytes."""
    return _sha256_text(f"{model_id}\x00{prompt}")


@dataclass(frozen=True)
class CompletionRequest:
    """A single-turn completion request."""

    model_id: str
    prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 512

    def __post_init__(self) -> None:
        """Validate the request."""
        if not self.prompt:
            msg = "prompt must be non-empty."
            raise ValueError(msg)
        if self.temperature < 0:
            msg = f"temperature must be >= 0, got {self.temperature}."
            raise ValueError(msg)
        if self.max_output_tokens < 1:
            msg = f"max_output_tokens must be positive, got {self.max_output_tokens}."
            raise ValueError(msg)

    @property
    def digest(self) -> str:
        """Replay store key of the request."""
        return request_digest(self.model_id, self.prompt)


@dataclass(frozen=True)
class CompletionResponse:
    """Provider text and how it was obtained."""

    text: str
    latency_ms: int
    provider: str
    cached: bool = False


class Backend(Protocol):
    """Sends one request to a provider and returns the text verbatim."""

    name: str

    def send(self, request: CompletionRequest) -> str:
        """Return the completion text."""
        ...


def _post_json(
    session: requests.Session, url: str, payload: dict[str, Any], headers: dict[str, str], timeout: float
) -> dict[str, Any]:
    """
    POST a JSON body and map failures onto transport errors.

    Args:
        session (requests.Session): HTTP session.
        url (str): Endpoint URL.
        payload (dict): JSON body.
        headers (dict): Request headers, credentials included.
        timeout (float): Timeout in seconds.

    Returns:
        dict: The decoded response body.

    Raises:
        AuthenticationError: On 401 and 403.
        RateLimitError: On 429.
        ProviderUnavailableError: On timeouts, connection failures, 5xx and undecodable bodies.
        RequestRejectedError: On any other 4xx.

    """
    logger.debug("POST %s %s", url, _dumps(payload))
    try:
        response = session.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.Timeout as e:
        msg = f"Request to {url} timed out: {e}"
        raise ProviderUnavailableError(msg) from e
    except requests.RequestException as e:
        msg = f"Request to {url} failed: {e}"
        raise ProviderUnavailableError(msg) from e
    logger.debug("HTTP %d %s", response.status_code, response.text)

    status = response.status_code
    if status in {HTTPStatus.UNAUTHORIZED, HTTPStatus.FORBIDDEN}:
        msg = f"Authentication failed for {url} (HTTP {status})."
        raise AuthenticationError(msg)
    if status == HTTPStatus.TOO_MANY_REQUESTS:
        msg = f"Rate limited by {url}."
        raise RateLimitError(msg)
    if status >= HTTPStatus.INTERNAL_SERVER_ERROR:
        msg = f"Server error from {url} (HTTP {status})."
        raise ProviderUnavailableError(msg)
    if status >= HTTPStatus.BAD_REQUEST:
        msg = f"Request rejected by {url} (HTTP {status}): {response.text[:500]}"
        raise RequestRejectedError(msg)
    try:
        return response.json()
    except ValueError as e:
        msg = f"Undecodable response from {url}: {e}"
        raise ProviderUnavailableError(msg) from e


class OpenAICompatibleBackend:
    """Chat-completions dialect. Also serves self-hosted open-weight models behind a compatible server."""

    name = "openai"

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        *,
        timeout: float | None = None,
        session: requests.Session | None = None,
    ) -> None:
        """Read the endpoint and key from the environment unless given."""
        self.base_url = (base_url or os.environ.get(settings.openai_base_url_env) or OPENAI_BASE_URL).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(settings.openai_api_key_env, "")
        self.timeout = settings.request_timeout if timeout is None else timeout
        self.session = session or requests.Session()

    def send(self, request: CompletionRequest) -> str:
        """POST to /chat/completions and return the first choice's content."""
        payload = {
            "model": request.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        data = _post_json(self.session, f"{self.base_url}/chat/completions", payload, headers, self.timeout)
        try:
            return data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as e:
            msg = f"Unexpected chat completion body: {e!r}"
            raise ProviderUnavailableError(msg) from e


class GeminiBackend:
    """generateContent dialect."""

    name = "gemini"

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        *,
        timeout: float | None = None,
        session: requests.Session | None = None,
    ) -> None:
        """Read the endpoint and key from the environment unless given."""
        self.base_url = (base_url or os.environ.get(settings.gemini_base_url_env) or GEMINI_BASE_URL).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(settings.gemini_api_key_env, "")
        self.timeout = settings.request_timeout if timeout is None else timeout
        self.session = session or requests.Session()

    def send(self, request: CompletionRequest) -> str:
        """POST to models/{model}:generateContent and join the text parts of the first candidate."""
        payload = {
            "contents": [{"role": "user", "parts": [{"text": request.prompt}]}],
            "generationConfig": {"temperature": request.temperature, "maxOutputTokens": request.max_output_tokens},
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["x-goog-api-key"] = self.api_key
        url = f"{self.base_url}/models/{request.model_id}:generateContent"
        data = _post_json(self.session, url, payload, headers, self.timeout)
        try:
            parts = data["candidates"][0]["content"]["parts"]
        except (KeyError, IndexError, TypeError) as e:
            msg = f"Unexpected generateContent body: {e!r}"
            raise ProviderUnavailableError(msg) from e
        return "".join(part.get("text", "") for part in parts)


@dataclass
class ScriptedBackend:
    """
    Deterministic stand-in for a provider.

    Responses are looked up by request digest, then by prompt text, then fall back to `default`. A callable
    `responses` is called with the request instead.
    """

    responses: Mapping[str, str] | Callable[[CompletionRequest], str] = field(default_factory=dict)
    default: str | None = None
    name: str = "scripted"
    calls: list[CompletionRequest] = field(default_factory=list, repr=False)

    def send(self, request: CompletionRequest) -> str:
        """Return the scripted text for a request."""
        self.calls.append(request)
        if callable(self.responses):
            return self.responses(request)
        for key in (request.digest, request.prompt):
            if key in self.responses:
                return self.responses[key]
        if self.default is not None:
            return self.default
        msg = f"No scripted response for request {request.digest[:12]}."
        raise RequestRejectedError(msg)


BACKENDS: dict[str, type] = {"openai": OpenAICompatibleBackend, "gemini": GeminiBackend}


def make_backend(provider: str, **kwargs: Any) -> Backend:  # noqa: ANN401
    """Instantiate a live backend by provider name."""
    try:
        return BACKENDS[provider](**kwargs)
    except KeyError as e:
        msg = f"Unknown provider {provider!r}. Choose from {', '.join(sorted(BACKENDS))}."
        raise ValueError(msg) from e


class ReplayStore:
    """
    Append-only, digest-keyed store of model responses.

    Each line holds one (digest, model_id, text) record. Reads are served from memory; writes are serialized.
    """

    def __init__(self, path: str | Path) -> None:
        """
        Open a store, loading existing records.

        Args:
            path (str | Path): Store file. Created on the first write.

        Raises:
            ReplayStoreError: If the file holds a malformed line.
            DigestConflictError: If one digest is recorded with two different texts.

        """
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, dict[str, str]] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        try:
            for line_number, record, error in _iter_jsonl(self.path):
                if record is None or not {"digest", "model_id", "text"} <= record.keys():
                    msg = f"{self.path}:{line_number}: malformed replay record ({error or 'missing fields'})."
                    raise ReplayStoreError(msg)
                existing = self._entries.get(record["digest"])
                if existing is not None and existing["text"] != record["text"]:
                    msg = f"{self.path}:{line_number}: conflicting texts for digest {record['digest']}."
                    raise DigestConflictError(msg)
                self._entries[record["digest"]] = record
        except OSError as e:
            msg = f"Cannot read replay store {self.path}: {e}"
            raise ReplayStoreError(msg) from e

    def __len__(self) -> int:
        """Number of recorded digests."""
        return len(self._entries)

    def __contains__(self, digest: object) -> bool:
        """Whether a digest is recorded."""
        return digest in self._entries

    def get(self, digest: str) -> str | None:
        """Recorded text for a digest, if any."""
        entry = self._entries.get(digest)
        return None if entry is None else entry["text"]

    def record(self, request: CompletionRequest, response: CompletionResponse | str) -> bool:
        """
        Store the response text of a request.

        Args:
            request (CompletionRequest): The request.
            response (CompletionResponse | str): The response or its text.

        Returns:
            bool: True if a new entry was written, False if the identical pair was already stored.

        Raises:
            DigestConflictError: If the digest is stored with a different text.
            ReplayStoreError: If the store cannot be written.

        """
        text = response.text if isinstance(response, CompletionResponse) else response
        digest = request.digest
        with self._lock:
            existing = self._entries.get(digest)
            if existing is not None:
                if existing["text"] != text:
                    msg = f"Digest {digest} is already recorded with a different response."
                    raise DigestConflictError(msg)
                return False
            entry = {"digest": digest, "model_id": request.model_id, "text": text}
            try:
                _append_jsonl(self.path, entry)
            except OSError as e:
                msg = f"Cannot write replay store {self.path}: {e}"
                raise ReplayStoreError(msg) from e
            self._entries[digest] = entry
            return True


class ClientMode(str, Enum):
    """How a client uses its replay store."""

    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


class CompletionClient:
    """
    Completion client shared by concurrent judge tasks.

    In live mode every request goes to the backend. In record mode stored responses are served from the store and
    new ones are recorded. In replay mode only the store is used; a miss is an error when strict, and otherwise
    falls through to the backend and is recorded.
    """

    def __init__(
        self,
        backend: Backend | None,
        *,
        model_id: str,
        store: ReplayStore | None = None,
        mode: ClientMode | str = ClientMode.LIVE,
        strict: bool = True,
        temperature: float | None = None,
        max_output_tokens: int | None = None,
        max_retries: int | None = None,
        backoff_base: float | None = None,
        backoff_cap: float | None = None,
        max_in_flight: int | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        """
        Configure the client. Unset knobs fall back to relevatr.settings.

        Raises:
            ValueError: If the mode needs a store or backend that is missing.

        """
        self.backend = backend
        self.model_id = model_id
        self.store = store
        self.mode = ClientMode(mode)
        self.strict = strict
        self.temperature = settings.temperature if temperature is None else temperature
        self.max_output_tokens = settings.max_output_tokens if max_output_tokens is None else max_output_tokens
        self.max_retries = settings.max_retries if max_retries is None else max_retries
        self.backoff_base = settings.backoff_base if backoff_base is None else backoff_base
        self.backoff_cap = settings.backoff_cap if backoff_cap is None else backoff_cap
        self._sleep = sleep

        if self.mode is not ClientMode.LIVE and store is None:
            msg = f"Mode {self.mode.value!r} needs a replay store."
            raise ValueError(msg)
        if backend is None and not (self.mode is ClientMode.REPLAY and strict):
            msg = "A backend is required unless replaying strictly."
            raise ValueError(msg)

        if max_in_flight is None:
            max_in_flight = settings.provider_max_in_flight.get(self.provider, settings.max_in_flight)
        self.max_in_flight = max_in_flight
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._counter_lock = threading.Lock()
        self.network_calls = 0

    @property
    def provider(self) -> str:
        """Provider name of the backend."""
        return self.backend.name if self.backend is not None else "replay"

    def backoff_delay(self, attempt: int) -> float:
        """Delay before retry number attempt + 1: min(cap, base * 2**attempt)."""
        return min(self.backoff_cap, self.backoff_base * 2**attempt)

    def request(self, prompt: str) -> CompletionRequest:
        """Build a request for a prompt with the client's model and sampling settings."""
        return CompletionRequest(
            model_id=self.model_id,
            prompt=prompt,
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
        )

    def complete(self, request: CompletionRequest | str) -> CompletionResponse:
        """
        Obtain the completion of a request.

        Args:
            request (CompletionRequest | str): The request, or a prompt sent with the client's settings.

        Returns:
            CompletionResponse: Provider text verbatim. cached is True iff it came from the replay store.

        Raises:
            CacheMissError: On a strict replay miss.
            AuthenticationError: If the provider rejects the credentials.
            RequestRejectedError: If the provider rejects the request.
            RetriesExhaustedError: If transient failures outlast max_retries.

        """
        if isinstance(request, str):
            request = self.request(request)

        if self.store is not None and self.mode is not ClientMode.LIVE:
            text = self.store.get(request.digest)
            if text is not None:
                return CompletionResponse(text=text, latency_ms=0, provider=self.provider, cached=True)
            if self.mode is ClientMode.REPLAY and self.strict:
                msg = f"Replay cache miss for request {request.digest} ({request.model_id})."
                raise CacheMissError(msg)
            logger.info("Replay cache miss for %s, calling %s.", request.digest[:12], self.provider)

        response = self._send_with_retries(request)
        if self.store is not None and self.mode is not ClientMode.LIVE:
            self.store.record(request, response)
        return response

    def _send_with_retries(self, request: CompletionRequest) -> CompletionResponse:
        if self.backend is None:
            msg = "No backend configured."
            raise TransportError(msg)

        last_error: TransportError | None = None
        for attempt in range(self.max_retries + 1):
            with self._counter_lock:
                self.network_calls += 1
            start = time.perf_counter()
            try:
                with self._slots:
                    text = self.backend.send(request)
            except RETRYABLE_ERRORS as e:
                last_error = e
                if attempt == self.max_retries:
                    break
                delay = self.backoff_delay(attempt)
                logger.warning(
                    "%s (attempt %d/%d), retrying in %.1fs.", e, attempt + 1, self.max_retries + 1, delay
                )
                self._sleep(delay)
            else:
                latency_ms = max(0, round((time.perf_counter() - start) * 1000))
                return CompletionResponse(text=text, latency_ms=latency_ms, provider=self.provider)

        msg = f"Giving up on request {request.digest[:12]} after {self.max_retries + 1} attempts: {last_error}"
        raise RetriesExhaustedError(msg) from last_error
