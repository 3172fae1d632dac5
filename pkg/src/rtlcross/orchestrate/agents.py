"""Agent endpoints: canned, programmatic, and HTTP chat-completion.

All endpoints expose `complete(system, user) -> str` returning the raw
completion text; code extraction from the think/answer format is a
separate concern handled by `extract_code`.
"""

from __future__ import annotations

import json
import os
import re
import urllib.request
from typing import Callable

from rtlcross.orchestrate.prompts import ROLES


class AgentError(Exception):
    """Transport-level failure: the endpoint could not produce text."""


class AgentEndpoint:
    """Base class; subclasses implement `complete`."""

    kind = "abstract"

    def __init__(self, role: str):
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        self.role = role
        self.calls: list[tuple[str, str]] = []

    def complete(self, system: str, user: str) -> str:
        raise NotImplementedError


class MockAgent(AgentEndpoint):
    """Replays a fixed list of completions, repeating the last one."""

    kind = "mock"

    def __init__(self, role: str, outputs: list[str]):
        super().__init__(role)
        if not outputs:
            raise ValueError("mock agent needs at least one canned output")
        self.outputs = list(outputs)
        self.cursor = 0

    def complete(self, system: str, user: str) -> str:
        self.calls.append((system, user))
        out = self.outputs[min(self.cursor, len(self.outputs) - 1)]
        self.cursor += 1
        return out


class ScriptedAgent(AgentEndpoint):
    """Delegates to a callable; any statefulness lives in its closure."""

    kind = "scripted"

    def __init__(self, role: str, fn: Callable[[str, str], str]):
        super().__init__(role)
        self.fn = fn

    def complete(self, system: str, user: str) -> str:
        self.calls.append((system, user))
        return self.fn(system, user)


class ChatAgent(AgentEndpoint):
    """OpenAI-style chat-completion endpoint over HTTP.

    The API key is read from the environment at request time so a key
    never sits in configuration files or logs.
    """

    kind = "chat"

    def __init__(
        self,
        role: str,
        url: str,
        model: str,
        *,
        api_key_env: str = "RTLCROSS_API_KEY",
        temperature: float | None = 1.0,
        timeout: float = 60.0,
    ):
        super().__init__(role)
        self.url = url
        self.model = model
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.timeout = timeout

    def complete(self, system: str, user: str) -> str:
        self.calls.append((system, user))
        payload: dict = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        request = urllib.request.Request(
            self.url,
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        key = os.environ.get(self.api_key_env)
        if key:
            request.add_header("Authorization", f"Bearer {key}")
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                body = json.load(resp)
        except (OSError, ValueError) as exc:
            raise AgentError(f"chat request failed: {exc}") from exc
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise AgentError("malformed chat response") from exc
        if not isinstance(text, str):
            raise AgentError("chat response content is not text")
        return text


def make_agent(kind: str, role: str, **options) -> AgentEndpoint:
    if kind == "mock":
        return MockAgent(role, **options)
    if kind == "scripted":
        return ScriptedAgent(role, **options)
    if kind == "chat":
        return ChatAgent(role, **options)
    raise ValueError(f"unknown agent kind {kind!r}")


_FENCE = re.compile(r"```([A-Za-z0-9_+-]*)[ \t]*\r?\n(.*?)```", re.DOTALL)
_ANSWER = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)


def extract_code(text: str, lang: str) -> str | None:
    """Pull the final code block out of a completion.

    Prefers fenced blocks inside the last <answer> section, then blocks
    anywhere in the text; within the searched region the last block
    tagged with the requested language wins, then the last untagged
    block.  None when no usable block exists.
    """
    answers = _ANSWER.findall(text)
    regions = [answers[-1]] if answers else []
    regions.append(text)
    for region in regions:
        tagged = None
        untagged = None
        for match in _FENCE.finditer(region):
            body = match.group(2).strip()
            if not body:
                continue
            if match.group(1) == lang:
                tagged = body
            elif not match.group(1):
                untagged = body
        found = tagged if tagged is not None else untagged
        if found is not None:
            return found
    return None
