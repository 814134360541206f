"""LLM-driven prediction of analogous relation pairs plus the two filter rules.

The primary test substrate is a record/replay transcript (prompt hash ->
response, JSON lines), so the whole filter stage is deterministic and
reproducible without access to any particular model snapshot. Live calls go
through a pluggable HTTP backend with the API key taken from the environment.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import httpx

from .kb import AnalogousRelationPair, PROVENANCE_AUTO, STATUS_PENDING
from .linker import CandidateSet

logger = logging.getLogger(__name__)

NONE_ANSWER = "none"


class TranscriptMissError(KeyError):
    """Replay backend has no recorded response for a prompt."""

    def __init__(self, prompt: str):
        self.prompt = prompt
        super().__init__(f"transcript incomplete: no response for prompt sha {prompt_sha(prompt)}")


class BackendError(RuntimeError):
    pass


def prompt_sha(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def _load_exemplars(name: str) -> str:
    return resources.files("analogykit.data").joinpath(name).read_text(encoding="utf-8").rstrip("\n")


SELECTION_TASK = (
    "Choose the relations from the relation candidates that can form an analogy "
    "with the given relation."
)
META_TASK = (
    "Induce two relations into a higher-level relation and explain why they can "
    "form an analogy."
)


def build_selection_prompt(
    query: str,
    candidates: list[str],
    exemplars: str | None = None,
) -> str:
    """Selection prompt: task sentence, few-shot block, query block ending 'Answer:'."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if exemplars is None:
        exemplars = _load_exemplars("selection_exemplars.txt")
    parts = [SELECTION_TASK]
    if exemplars:
        parts.append(exemplars)
    parts.append(
        f"Given relation: {query}\n"
        f"Relation candidates: [{', '.join(candidates)}]\n"
        f"Answer:"
    )
    return "\n\n".join(parts)


def build_meta_prompt(label_a: str, label_b: str, exemplars: str | None = None) -> str:
    """Meta-relation prompt; the completion after the final colon is the answer."""
    if exemplars is None:
        exemplars = _load_exemplars("meta_exemplars.txt")
    parts = [META_TASK]
    if exemplars:
        parts.append(exemplars)
    parts.append(
        f"The relation [{label_a}] and the relation [{label_b}] can form an "
        f"analogy because both of them can be induced into a relation:"
    )
    return "\n\n".join(parts)


# ---------------------------------------------------------------------------
# Backends


class ReplayBackend:
    """Deterministic playback from a recorded transcript (JSONL)."""

    kind = "replay"

    def __init__(self, transcript_path: str | Path):
        self.transcript_path = Path(transcript_path)
        self._responses: dict[str, str] = {}
        with open(self.transcript_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    self._responses[rec["prompt_sha256"]] = rec["response"]

    def complete(self, prompt: str) -> str:
        sha = prompt_sha(prompt)
        if sha not in self._responses:
            raise TranscriptMissError(prompt)
        return self._responses[sha]


class RecordingBackend:
    """Wraps another backend and appends every exchange to a transcript."""

    kind = "recording"

    def __init__(self, inner, transcript_path: str | Path, model: str = "unknown"):
        self.inner = inner
        self.transcript_path = Path(transcript_path)
        self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
        self.model = model

    def complete(self, prompt: str) -> str:
        response = self.inner.complete(prompt)
        record = {
            "prompt_sha256": prompt_sha(prompt),
            "prompt": prompt,
            "response": response,
            "model": self.model,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        with open(self.transcript_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response


class RemoteBackend:
    """Completion-style HTTP backend. API key comes from the environment only."""

    kind = "remote"

    def __init__(
        self,
        model: str,
        endpoint: str,
        api_key_env: str = "LLM_API_KEY",
        temperature: float = 0.0,
        max_tokens: int = 128,
        retries: int = 3,
        timeout: float = 60.0,
    ):
        self.model = model
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.retries = retries
        self.timeout = timeout

    def complete(self, prompt: str) -> str:
        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            raise BackendError(f"missing API key in environment variable {self.api_key_env}")
        payload = {
            "model": self.model,
            "prompt": prompt,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(self.retries):
            try:
                resp = httpx.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {api_key}"},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["text"]
            except (httpx.HTTPError, KeyError, IndexError) as exc:
                last_error = exc
                time.sleep(min(2**attempt, 8))
        raise BackendError(f"remote backend failed after {self.retries} retries: {last_error}")


# ---------------------------------------------------------------------------
# Selection and rules


@dataclass(frozen=True)
class SelectionResult:
    query: str
    candidates_shown: tuple
    selected: tuple  # subset of candidates_shown
    raw_response: str
    dropped: tuple = ()  # model outputs that matched no candidate

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "candidates_shown": list(self.candidates_shown),
            "selected": list(self.selected),
            "raw_response": self.raw_response,
            "dropped": list(self.dropped),
        }


@dataclass(frozen=True)
class MetaRelationResult:
    pair: tuple  # (relation id, relation id)
    meta: str | None
    raw_response: str


def _parse_selection(response: str, candidates: list[str]) -> tuple[list[str], list[str]]:
    by_lower = {c.strip().lower(): c for c in candidates}
    selected: list[str] = []
    dropped: list[str] = []
    text = response.strip()
    if text.lower() == NONE_ANSWER:
        return [], []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        match = by_lower.get(token.lower())
        if match is None:
            dropped.append(token)
        elif match not in selected:
            selected.append(match)
    if dropped:
        logger.info("selection parser dropped non-candidate tokens: %s", dropped)
    return selected, dropped


def select_analogous(
    query: str,
    candidate_set: CandidateSet,
    backend,
    labels: dict[str, str] | None = None,
    exemplars: str | None = None,
) -> SelectionResult:
    """Ask the backend which candidates form an analogy with the query relation.

    ``labels`` maps relation ids to the surface labels shown in the prompt;
    without it, ids double as labels. The parser only ever returns relations
    that were actually shown.
    """
    labels = labels or {}
    cand_ids = candidate_set.candidate_ids()
    cand_labels = [labels.get(rid, rid) for rid in cand_ids]
    prompt = build_selection_prompt(labels.get(query, query), cand_labels, exemplars=exemplars)
    response = backend.complete(prompt)
    selected_labels, dropped = _parse_selection(response, cand_labels)
    label_to_id = {labels.get(rid, rid).lower(): rid for rid in cand_ids}
    selected_ids = [label_to_id[s.lower()] for s in selected_labels]
    return SelectionResult(
        query=query,
        candidates_shown=tuple(cand_ids),
        selected=tuple(selected_ids),
        raw_response=response,
        dropped=tuple(dropped),
    )


def apply_symmetry_rule(results: list[SelectionResult]) -> list[tuple[str, str]]:
    """Rule 1: keep (R1, R2) only when each selected the other.

    Output is canonically ordered and deduplicated.
    """
    selected_by_query = {r.query: set(r.selected) for r in results}
    kept: set[tuple[str, str]] = set()
    for r in results:
        for other in r.selected:
            if r.query in selected_by_query.get(other, set()):
                kept.add(tuple(sorted((r.query, other))))
    return sorted(kept)


def _parse_meta(response: str) -> str | None:
    text = response.strip().strip(".").strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1].strip()
    if not text or text.lower() == NONE_ANSWER:
        return None
    return text


def summarize_meta(
    pair: tuple[str, str],
    backend,
    labels: dict[str, str] | None = None,
    exemplars: str | None = None,
) -> MetaRelationResult:
    labels = labels or {}
    a, b = pair
    prompt = build_meta_prompt(labels.get(a, a), labels.get(b, b), exemplars=exemplars)
    response = backend.complete(prompt)
    return MetaRelationResult(pair=(a, b), meta=_parse_meta(response), raw_response=response)


def apply_meta_rule(results: list[MetaRelationResult]) -> list[AnalogousRelationPair]:
    """Rule 2: drop pairs with no meta relation; survivors become pending pairs."""
    out: list[AnalogousRelationPair] = []
    for r in results:
        if r.meta is None:
            continue
        a, b = r.pair
        out.append(
            AnalogousRelationPair(
                rel_a=a,
                rel_b=b,
                meta_relation=r.meta,
                provenance=PROVENANCE_AUTO,
                status=STATUS_PENDING,
            )
        )
    return sorted(out, key=lambda p: p.key())


@dataclass
class FilterFunnel:
    raw_pairs: list  # unordered pairs implied by any selection
    after_rule1: list
    after_rule2: list  # AnalogousRelationPair, pending

    def counts(self) -> dict:
        return {
            "raw": len(self.raw_pairs),
            "after_rule1": len(self.after_rule1),
            "after_rule2": len(self.after_rule2),
        }


def run_filter_stage(
    candidate_sets: list[CandidateSet],
    backend,
    labels: dict[str, str] | None = None,
) -> tuple[FilterFunnel, list[SelectionResult], list[MetaRelationResult]]:
    """Full filter stage: selection, Rule 1 (symmetry), Rule 2 (meta relation)."""
    selections = [
        select_analogous(cs.query_relation, cs, backend, labels=labels)
        for cs in candidate_sets
        if cs.candidates
    ]
    raw = sorted({tuple(sorted((s.query, rid))) for s in selections for rid in s.selected})
    rule1 = apply_symmetry_rule(selections)
    metas = [summarize_meta(pair, backend, labels=labels) for pair in rule1]
    rule2 = apply_meta_rule(metas)
    return FilterFunnel(raw, rule1, rule2), selections, metas


def write_pending_pairs(pairs: list[AnalogousRelationPair], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict(), ensure_ascii=False) + "\n")


def read_pairs(path: str | Path) -> list[AnalogousRelationPair]:
    with open(path, encoding="utf-8") as fh:
        return [AnalogousRelationPair.from_dict(json.loads(line)) for line in fh if line.strip()]
