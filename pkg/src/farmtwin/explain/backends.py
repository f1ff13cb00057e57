"""Chat backends: an offline deterministic stub and a chat-completions HTTP client."""
from __future__ import annotations

import logging
import os
from typing import Mapping, Optional, Protocol

import httpx

from farmtwin.explain.prompt import PromptContext
from farmtwin.explain.stub import stub_answer

log = logging.getLogger(__name__)

ENV_ENDPOINT = "EXPLAIN_LLM_ENDPOINT"
ENV_MODEL = "EXPLAIN_LLM_MODEL"
ENV_API_KEY = "EXPLAIN_LLM_API_KEY"


class BackendError(RuntimeError):
    """Backend failure; ``kind`` is one of config, network, timeout, auth, rate_limit, http, protocol."""

    def __init__(self, kind: str, message: str, prompt: Optional[PromptContext] = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.prompt = prompt


class ChatBackend(Protocol):
    backend_id: str

    def complete(self, prompt: PromptContext) -> str: ...


class StubBackend:
    backend_id = "stub"

    def complete(self, prompt: PromptContext) -> str:
        return stub_answer(prompt)


class RemoteChatBackend:
    backend_id = "remote"

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str,
        timeout: float = 60.0,
        transport: Optional[httpx.BaseTransport] = None,
        verbose: bool = False,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.transport = transport
        self.verbose = verbose

    @classmethod
    def from_env(cls, environ: Mapping[str, str] = os.environ, **kw) -> "RemoteChatBackend":
        missing = [k for k in (ENV_ENDPOINT, ENV_MODEL, ENV_API_KEY) if not environ.get(k)]
        if missing:
            raise BackendError("config", f"missing environment variables: {', '.join(missing)}")
        return cls(environ[ENV_ENDPOINT], environ[ENV_MODEL], environ[ENV_API_KEY], **kw)

    def payload(self, prompt: PromptContext) -> dict:
        return {
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text()},
            ],
            "temperature": 0,
        }

    def complete(self, prompt: PromptContext) -> str:
        body = self.payload(prompt)
        headers = {"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"}
        if self.verbose:
            log.info("POST %s headers=%s body=%s", self.endpoint, {**headers, "Authorization": "Bearer ***"}, body)
        try:
            with httpx.Client(timeout=self.timeout, transport=self.transport) as client:
                resp = client.post(self.endpoint, json=body, headers=headers)
        except httpx.TimeoutException as exc:
            raise BackendError("timeout", str(exc) or "request timed out", prompt) from exc
        except httpx.HTTPError as exc:
            raise BackendError("network", str(exc), prompt) from exc

        if resp.status_code in (401, 403):
            raise BackendError("auth", f"HTTP {resp.status_code}: {resp.text}", prompt)
        if resp.status_code == 429:
            raise BackendError("rate_limit", f"HTTP 429: {resp.text}", prompt)
        if resp.status_code >= 400:
            raise BackendError("http", f"HTTP {resp.status_code}: {resp.text}", prompt)
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError("protocol", f"unexpected response body: {resp.text[:200]}", prompt) from exc
        if self.verbose:
            log.info("response: %s", data)
        return text
