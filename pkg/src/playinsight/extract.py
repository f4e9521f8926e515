"""Prompt construction, provider calls, and response parsing.

The provider returns a pipe-delimited two-column table (Ability | Behavior);
parsing is defensive: unknown ability labels and duplicate rows degrade to
warnings, and only a completion with no parseable rows at all is an error.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from .model import (
    ABILITY_ORDER,
    AbilityDimension,
    ActivityRecord,
    UnknownAbility,
    ability_from_alias,
)
from .store import Store


class EmptyNarrative(ValueError):
    pass


class NoTableFound(ValueError):
    pass


class ProviderUnavailable(RuntimeError):
    pass


_DELIMITER = '"""'


def _escape_narrative(text: str) -> str:
    return text.replace("\\", "\\\\").replace(_DELIMITER, '\\"""')


def _unescape_narrative(text: str) -> str:
    return re.sub(
        r'\\\\|\\"""',
        lambda m: "\\" if m.group() == "\\\\" else _DELIMITER,
        text,
    )


@dataclass(frozen=True)
class PromptTemplate:
    role_line: str
    task_description: str
    ability_categories: tuple[str, ...]
    requirements: tuple[str, ...]
    input_label: str = "Input Data"

    def render(self, narrative: str) -> str:
        categories = ", ".join(f'"{name}"' for name in self.ability_categories)
        requirements = "\n".join(
            f"{i}. {text}" for i, text in enumerate(self.requirements, start=1)
        )
        return (
            f"Role: {self.role_line}\n"
            f"\n"
            f"Task Description: {self.task_description}\n"
            f"\n"
            f"Ability Categories: {categories}.\n"
            f"\n"
            f"Requirements:\n"
            f"{requirements}\n"
            f"\n"
            f"{self.input_label}:\n"
            f"{_DELIMITER}\n"
            f"{_escape_narrative(narrative)}\n"
            f"{_DELIMITER}"
        )


DEFAULT_TEMPLATE = PromptTemplate(
    role_line="You are an expert in the field of early childhood education.",
    task_description=(
        "Based on a child's self-narrative of their play process, select the "
        "most relevant and prominent abilities from the following [Ability "
        "Categories] and summarize the child's behavior in relation to these "
        "abilities."
    ),
    ability_categories=(
        "Numerical and Geometric Cognition",
        "Creativity and Imagination",
        "Fine Motor Development",
        "Gross Motor Development",
        "Empathy",
        "Emotional Cognition",
        "Communication",
        "Cooperation",
    ),
    requirements=(
        "Select only the most relevant and prominent abilities, not exceeding "
        "the given range of abilities.",
        "Provide a brief and specific description of the child's behavior for "
        "each ability, with the child as the subject.",
        "Format the output in table form, with each row representing an "
        "ability and its corresponding behavior.",
        "Each row in the table should include two columns: Ability and "
        "Behavior.",
        "No additional explanations or extra information is needed, only a "
        "summary of the abilities and behaviors.",
    ),
)


def build_prompt(narrative: str, template: PromptTemplate = DEFAULT_TEMPLATE) -> str:
    """Deterministic rendering; the same narrative always yields the same bytes."""
    if not narrative.strip():
        raise EmptyNarrative("narrative must be non-empty")
    return template.render(narrative)


def narrative_from_prompt(prompt: str) -> str:
    """Recover the narrative from a rendered prompt (inverse of the escaping)."""
    first = prompt.index(_DELIMITER)
    last = prompt.rindex(_DELIMITER)
    if first == last:
        raise ValueError("prompt has no delimited input section")
    inner = prompt[first + len(_DELIMITER) : last]
    return _unescape_narrative(inner.strip("\n"))


_SEPARATOR_CELL = re.compile(r"^:?-{2,}:?$")
_DECORATION = re.compile(r"^[\s*_`]+|[\s*_`]+$")


def _split_table_row(line: str) -> list[str] | None:
    stripped = line.strip()
    if "|" not in stripped:
        return None
    if stripped.startswith("|"):
        stripped = stripped[1:]
    if stripped.endswith("|"):
        stripped = stripped[:-1]
    return [cell.strip() for cell in stripped.split("|")]


def parse_response(text: str) -> tuple[list[tuple[AbilityDimension, str]], list[str]]:
    """Extract (ability, behavior) rows from a completion.

    Header and dash-separator rows are skipped; ability cells go through the
    alias table; duplicates collapse onto the first row (behaviors joined);
    anything unusable is reported as a warning.  Raises NoTableFound when the
    completion contains no parseable row at all.
    """
    warnings: list[str] = []
    rows: dict[AbilityDimension, str] = {}
    parseable = 0
    # Split on actual newlines only; exotic vertical whitespace inside a
    # behavior cell must not break the row apart.
    for line in re.split(r"\r\n|\r|\n", text):
        cells = _split_table_row(line)
        if cells is None or len(cells) < 2:
            continue
        if all(_SEPARATOR_CELL.match(cell) for cell in cells if cell):
            continue
        label = _DECORATION.sub("", cells[0])
        behavior = " | ".join(cell for cell in cells[1:] if cell).strip()
        if not label or not behavior:
            continue
        if label.casefold() == "ability":
            continue  # header row
        parseable += 1
        try:
            ability = ability_from_alias(label)
        except UnknownAbility:
            warnings.append(f"unknown ability {label!r} skipped")
            continue
        if ability in rows:
            warnings.append(f"duplicate ability {ability.value} merged")
            rows[ability] = f"{rows[ability]}; {behavior}"
        elif len(rows) >= len(ABILITY_ORDER):
            warnings.append(f"row for {ability.value} beyond 8 abilities dropped")
        else:
            rows[ability] = behavior
    if parseable == 0:
        raise NoTableFound("completion contains no parseable table rows")
    return list(rows.items()), warnings


@dataclass(frozen=True)
class ExtractionResult:
    activity_id: str
    rows: tuple[tuple[AbilityDimension, str], ...]
    raw_response: str
    warnings: tuple[str, ...] = ()
    retries: int = 0
    error: str | None = None


class Provider(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    auth_env: str = "PLAYINSIGHT_API_TOKEN"
    max_parallel: int = 4
    max_attempts: int = 3
    backoff_seconds: float = 0.5
    timeout_seconds: float = 60.0

    def __post_init__(self):
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def load_provider_config(path: str | Path) -> ProviderConfig:
    """Read a key=value config file.

    Keys: endpoint, model, auth_env, max_parallel, retries, timeout_ms,
    backoff_ms.  The auth token itself is read from the environment variable
    named by auth_env, never from the file.
    """
    values: dict[str, str] = {}
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    kwargs: dict = {}
    if "endpoint" in values:
        kwargs["endpoint"] = values["endpoint"]
    if "model" in values:
        kwargs["model"] = values["model"]
    if "auth_env" in values:
        kwargs["auth_env"] = values["auth_env"]
    if "max_parallel" in values:
        kwargs["max_parallel"] = int(values["max_parallel"])
    if "retries" in values:
        kwargs["max_attempts"] = int(values["retries"])
    if "timeout_ms" in values:
        kwargs["timeout_seconds"] = int(values["timeout_ms"]) / 1000.0
    if "backoff_ms" in values:
        kwargs["backoff_seconds"] = int(values["backoff_ms"]) / 1000.0
    missing = {"endpoint", "model"} - set(kwargs)
    if missing:
        raise ValueError(f"provider config missing keys: {sorted(missing)}")
    return ProviderConfig(**kwargs)


class HttpProvider:
    """Messages-style chat-completion client with retry and backoff."""

    def __init__(
        self,
        config: ProviderConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._sleep = sleep
        self._client = httpx.Client(
            timeout=config.timeout_seconds, transport=transport
        )
        self.retries_used = 0

    def close(self) -> None:
        self._client.close()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.auth_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_error = "no attempt made"
        for attempt in range(self.config.max_attempts):
            if attempt:
                self.retries_used += 1
                self._sleep(self.config.backoff_seconds * 2 ** (attempt - 1))
            try:
                response = self._client.post(
                    self.config.endpoint, json=body, headers=self._headers()
                )
            except httpx.HTTPError as exc:
                last_error = f"transport error: {exc}"
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code != 200:
                raise ProviderUnavailable(
                    f"provider rejected request: HTTP {response.status_code}"
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                raise ProviderUnavailable(f"malformed provider response: {exc}") from exc
        raise ProviderUnavailable(
            f"provider unavailable after {self.config.max_attempts} attempts "
            f"({last_error})"
        )


# Deterministic keyword table for the offline provider; keys are whole words
# looked up per sentence.
MOCK_KEYWORDS: dict[AbilityDimension, tuple[str, ...]] = {
    AbilityDimension.NUMERACY_GEOMETRY: (
        "count", "counted", "counting", "number", "numbers", "shape", "shapes",
        "circle", "square", "triangle", "measure", "measured",
    ),
    AbilityDimension.CREATIVITY_IMAGINATION: (
        "pretend", "pretended", "castle", "story", "stories", "imagine",
        "imagined", "invent", "invented",
    ),
    AbilityDimension.FINE_MOTOR: (
        "cut", "draw", "drew", "drawing", "mold", "molded", "fold", "folded",
        "thread", "button",
    ),
    AbilityDimension.GROSS_MOTOR: (
        "run", "ran", "running", "jump", "jumped", "climb", "climbed", "slide",
        "slid", "balance", "balanced",
    ),
    AbilityDimension.EMOTION_RECOGNITION: (
        "happy", "sad", "angry", "scared", "excited", "upset",
    ),
    AbilityDimension.EMPATHY: (
        "comfort", "comforted", "help", "helped", "hug", "hugged", "shared",
    ),
    AbilityDimension.COMMUNICATION: (
        "told", "asked", "said", "talk", "talked", "explain", "explained",
    ),
    AbilityDimension.COLLABORATION: (
        "together", "team", "teamed", "cooperate", "cooperated", "partner",
    ),
}

# Completions use the prompt-facing category names so parsing exercises the
# alias table exactly like a live provider would.
_PROMPT_NAME = {
    AbilityDimension.NUMERACY_GEOMETRY: "Numerical and Geometric Cognition",
    AbilityDimension.CREATIVITY_IMAGINATION: "Creativity and Imagination",
    AbilityDimension.FINE_MOTOR: "Fine Motor Development",
    AbilityDimension.GROSS_MOTOR: "Gross Motor Development",
    AbilityDimension.EMOTION_RECOGNITION: "Emotional Cognition",
    AbilityDimension.EMPATHY: "Empathy",
    AbilityDimension.COMMUNICATION: "Communication",
    AbilityDimension.COLLABORATION: "Cooperation",
}

_SENTENCE_SPLIT = re.compile(r"[.!?\n]+")
_WORD = re.compile(r"[a-z']+")


def mock_completion(narrative: str) -> str:
    """Deterministic completion: keyword table over sentences, table output."""
    sentences = [s.strip() for s in _SENTENCE_SPLIT.split(narrative) if s.strip()]
    found: dict[AbilityDimension, str] = {}
    for sentence in sentences:
        words = set(_WORD.findall(sentence.casefold()))
        for ability, keywords in MOCK_KEYWORDS.items():
            if ability not in found and words.intersection(keywords):
                found[ability] = sentence
    if not found:
        fallback = sentences[0] if sentences else narrative.strip()
        found[AbilityDimension.CREATIVITY_IMAGINATION] = fallback
    lines = ["| Ability | Behavior |", "| --- | --- |"]
    for ability in ABILITY_ORDER:
        if ability in found:
            lines.append(f"| {_PROMPT_NAME[ability]} | {found[ability]} |")
    return "\n".join(lines)


class MockProvider:
    """Offline deterministic provider; recovers the narrative from the prompt."""

    def complete(self, prompt: str) -> str:
        return mock_completion(narrative_from_prompt(prompt))


class ResponseLog:
    """Append-only archive of raw completions, one JSON record per line."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, activity_id: str, response: str) -> tuple[int, str]:
        timestamp = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
        record = json.dumps(
            {"activity_id": activity_id, "timestamp": timestamp, "response": response},
            ensure_ascii=False,
        )
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                offset = fh.tell()
                fh.write(record + "\n")
        return offset, timestamp


def extract(
    record: ActivityRecord,
    provider: Provider,
    template: PromptTemplate = DEFAULT_TEMPLATE,
) -> ExtractionResult:
    """Run one narrative through the provider and parse the table.

    A completion with no table triggers exactly one re-ask with an appended
    "Output only the table." instruction.
    """
    if not record.processed_narrative:
        raise EmptyNarrative(
            f"activity {record.activity_id} has no processed narrative"
        )
    prompt = build_prompt(record.processed_narrative, template)
    response = provider.complete(prompt)
    retries = 0
    try:
        rows, warnings = parse_response(response)
    except NoTableFound:
        retries = 1
        response = provider.complete(prompt + "\n\nOutput only the table.")
        rows, warnings = parse_response(response)
        warnings = ["re-asked after tableless completion"] + warnings
    return ExtractionResult(
        activity_id=record.activity_id,
        rows=tuple(rows),
        raw_response=response,
        warnings=tuple(warnings),
        retries=retries,
    )


def persist_result(
    result: ExtractionResult,
    record: ActivityRecord,
    store: Store,
    log: ResponseLog | None = None,
) -> None:
    """Write parsed rows (and the raw-response log entry) for one activity."""
    offset, timestamp = (None, "")
    if log is not None:
        offset, timestamp = log.append(record.activity_id, result.raw_response)
    store.record_extraction(record, result.rows, offset, timestamp)


def extract_batch(
    records: Sequence[ActivityRecord],
    provider: Provider,
    max_parallel: int = 4,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    store: Store | None = None,
    log: ResponseLog | None = None,
) -> list[ExtractionResult]:
    """Extract many records with bounded parallelism.

    Results come back in input order; per-record failures are embedded as
    error entries and never abort the batch.
    """

    def one(record: ActivityRecord) -> ExtractionResult:
        try:
            return extract(record, provider, template)
        except (EmptyNarrative, NoTableFound, ProviderUnavailable) as exc:
            return ExtractionResult(
                activity_id=record.activity_id,
                rows=(),
                raw_response="",
                error=f"{type(exc).__name__}: {exc}",
            )

    with ThreadPoolExecutor(max_workers=max(1, max_parallel)) as pool:
        results = list(pool.map(one, records))

    if store is not None:
        for record, result in zip(records, results):
            if result.error is None:
                persist_result(result, record, store, log)
    return results
