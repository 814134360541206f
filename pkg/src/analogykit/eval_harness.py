"""Analogy recognition baselines, retrieval-augmented prompting, and metrics.

The recognition baselines are embedding-offset (cosine between B-A and D-C
difference vectors) and sentence similarity over rendered "A is to B" strings.
Generation metrics are accuracy, MRR with a top-10 window, and hit/recall@k.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dataset_gen import McqaItem
from .kb import Analogy
from .linker import ZeroVectorError, cosine

logger = logging.getLogger(__name__)

MRR_WINDOW = 10
DEFAULT_RETRIEVAL_K = 8

RETRIEVAL_TASK = "Please make analogies."


class MissingEmbeddingError(KeyError):
    pass


@dataclass(frozen=True)
class RankedPrediction:
    item_id: str
    ranked_outputs: tuple
    scores: tuple | None = None

    def __post_init__(self):
        if len(set(self.ranked_outputs)) != len(self.ranked_outputs):
            raise ValueError("ranked outputs must not contain duplicates")
        if self.scores is not None:
            if len(self.scores) != len(self.ranked_outputs):
                raise ValueError("scores must parallel ranked_outputs")
            if list(self.scores) != sorted(self.scores, reverse=True):
                raise ValueError("scores must be in descending order")


# ---------------------------------------------------------------------------
# Word vectors


class WordVectors:
    """Text-format word vectors ("token v1 v2 ..." per line).

    Multiword concepts embed as the unweighted mean of their token vectors.
    """

    def __init__(self, vectors: dict[str, np.ndarray]):
        self.vectors = vectors

    @classmethod
    def load(cls, path: str | Path) -> "WordVectors":
        vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split(" ")
                if len(parts) < 2:
                    continue
                vectors[parts[0]] = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
        return cls(vectors)

    def concept(self, concept: str) -> np.ndarray:
        tokens = concept.lower().split()
        vecs = []
        for tok in tokens:
            if tok not in self.vectors:
                raise MissingEmbeddingError(f"no embedding for token {tok!r} in {concept!r}")
            vecs.append(self.vectors[tok])
        return np.mean(vecs, axis=0)


# ---------------------------------------------------------------------------
# Recognition baselines


def offset_predict(item: McqaItem, vectors: WordVectors) -> int:
    """argmax over candidates of cosine(B-A, D-C); ties go to the lowest index.

    Candidates with a zero difference vector are scored -inf.
    """
    query_diff = vectors.concept(item.query[1]) - vectors.concept(item.query[0])
    best_idx, best_score = 0, -math.inf
    for idx, (c, d) in enumerate(item.candidates):
        cand_diff = vectors.concept(d) - vectors.concept(c)
        try:
            score = cosine(query_diff, cand_diff)
        except ZeroVectorError:
            score = -math.inf
        if score > best_score + 1e-12:
            best_idx, best_score = idx, score
    return best_idx


def sentence_predict(item: McqaItem, embed: Callable[[str], np.ndarray]) -> int:
    """argmax over candidates of cosine(embed("A is to B"), embed("C is to D"))."""
    qvec = embed(f"{item.query[0]} is to {item.query[1]}")
    best_idx, best_score = 0, -math.inf
    for idx, (c, d) in enumerate(item.candidates):
        try:
            score = cosine(qvec, embed(f"{c} is to {d}"))
        except ZeroVectorError:
            score = -math.inf
        if score > best_score + 1e-12:
            best_idx, best_score = idx, score
    return best_idx


def run_recognition_baseline(
    items: list[McqaItem],
    predict: Callable[[McqaItem], int],
) -> tuple[list[int], list[int], int]:
    """Apply a baseline item by item; items with missing embeddings are skipped
    and reported. Returns (predictions, golds, skipped)."""
    preds: list[int] = []
    golds: list[int] = []
    skipped = 0
    for item in items:
        try:
            preds.append(predict(item))
            golds.append(item.answer_index)
        except MissingEmbeddingError as exc:
            skipped += 1
            logger.info("skipping item: %s", exc)
    return preds, golds, skipped


# ---------------------------------------------------------------------------
# Metrics


def _normalize_answer(text: str) -> str:
    return " ".join(text.strip().lower().split())


def accuracy(preds: Sequence[int], gold: Sequence[int]) -> float:
    if len(preds) != len(gold):
        raise ValueError(f"length mismatch: {len(preds)} vs {len(gold)}")
    if not preds:
        return 0.0
    return sum(p == g for p, g in zip(preds, gold)) / len(preds)


def mrr(preds: Sequence[RankedPrediction], gold: Sequence[str], window: int = MRR_WINDOW) -> float:
    """Mean reciprocal rank over a top-``window`` view; absent gold scores 0."""
    if len(preds) != len(gold):
        raise ValueError(f"length mismatch: {len(preds)} vs {len(gold)}")
    total = 0.0
    for pred, g in zip(preds, gold):
        target = _normalize_answer(g)
        rank = 0
        for i, out in enumerate(pred.ranked_outputs[:window], start=1):
            if _normalize_answer(out) == target:
                rank = i
                break
        total += 1.0 / rank if rank else 0.0
    return total / len(preds) if preds else 0.0


def hit_at_k(preds: Sequence[RankedPrediction], gold: Sequence[str], k: int) -> float:
    """Fraction of items whose gold answer appears in the first k outputs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(preds) != len(gold):
        raise ValueError(f"length mismatch: {len(preds)} vs {len(gold)}")
    hits = 0
    for pred, g in zip(preds, gold):
        target = _normalize_answer(g)
        if any(_normalize_answer(out) == target for out in pred.ranked_outputs[:k]):
            hits += 1
    return hits / len(preds) if preds else 0.0


recall_at_k = hit_at_k  # single-gold items: recall@k and hit@k coincide


def generation_report(preds: Sequence[RankedPrediction], gold: Sequence[str]) -> dict:
    return {
        "accuracy": hit_at_k(preds, gold, 1),
        "mrr": mrr(preds, gold),
        "recall@5": recall_at_k(preds, gold, 5),
        "hit@10": hit_at_k(preds, gold, 10),
        "n": len(preds),
    }


# ---------------------------------------------------------------------------
# Retrieval-augmented prompting


@dataclass(frozen=True)
class FewShotPrompt:
    exemplars: tuple  # of (a, b, c, d)
    query: tuple  # (a, b, c)
    rendered: str


def render_generation_query(a: str, b: str, c: str) -> str:
    return f"{a} is to {b} as {c} is to"


def render_retrieval_prompt(exemplars: Sequence[tuple], query: tuple) -> str:
    lines = [RETRIEVAL_TASK]
    for a, b, c, d in exemplars:
        lines.append(f"input: {render_generation_query(a, b, c)}")
        lines.append(f"output: {d}")
    lines.append(f"input: {render_generation_query(*query)}")
    lines.append("output:")
    return "\n".join(lines)


def embed_analogies(
    analogies: Sequence[Analogy],
    embed: Callable[[str], np.ndarray],
) -> list[tuple[Analogy, np.ndarray]]:
    """Embedding of each analogy's rendered A-is-to-B-as-C-is-to-D string."""
    return [(an, embed(an.as_text())) for an in analogies]


def retrieve_topk_analogies(
    query: tuple,
    embedded: Sequence[tuple],
    embed: Callable[[str], np.ndarray],
    k: int = DEFAULT_RETRIEVAL_K,
) -> FewShotPrompt:
    """Exact top-k most similar stored analogies as few-shot exemplars.

    k = 0 yields a zero-shot prompt with just the task sentence and query.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    exemplars: list[tuple] = []
    if k > 0 and embedded:
        qvec = embed(render_generation_query(*query))
        scored = [
            (cosine(qvec, vec), an.as_text(), an) for an, vec in embedded
        ]
        scored.sort(key=lambda s: (-s[0], s[1]))
        exemplars = [(an.a, an.b, an.c, an.d) for _, _, an in scored[:k]]
    return FewShotPrompt(
        exemplars=tuple(exemplars),
        query=tuple(query),
        rendered=render_retrieval_prompt(exemplars, tuple(query)),
    )


# ---------------------------------------------------------------------------
# Predictions file IO


def read_predictions(path: str | Path) -> list[RankedPrediction]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out.append(RankedPrediction(d["item_id"], tuple(d["ranked_outputs"])))
    return out


def format_report_table(report: dict) -> str:
    width = max(len(k) for k in report)
    lines = []
    for key, value in report.items():
        shown = f"{value:.4f}" if isinstance(value, float) else str(value)
        lines.append(f"{key.ljust(width)}  {shown}")
    return "\n".join(lines)
