"""Candidate analogous-relation search over relation-label embeddings.

An exact cosine scan is all that is needed at the scale of a few hundred
relation labels, so no approximate index is used. A deterministic hashed
character-n-gram embedder ships in-tree so the whole pipeline runs offline;
a remote provider can be plugged in behind the same interface.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_CANDIDATE_K = 20


class ZeroVectorError(ValueError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmbeddingProviderError(RuntimeError):
    def __init__(self, labels: list[str], message: str = "embedding provider failed"):
        self.labels = labels
        super().__init__(f"{message}: {labels}")


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity undefined for zero vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class CandidateSet:
    query_relation: str
    candidates: tuple  # ((relation_id, score), ...) sorted desc, ties by id

    def candidate_ids(self) -> list[str]:
        return [rid for rid, _ in self.candidates]

    def to_dict(self) -> dict:
        return {
            "query_relation": self.query_relation,
            "candidates": [[rid, score] for rid, score in self.candidates],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateSet":
        return cls(d["query_relation"], tuple((rid, float(s)) for rid, s in d["candidates"]))


class EmbeddingProvider(Protocol):
    provider_id: str

    def embed(self, labels: list[str]) -> dict[str, np.ndarray]: ...


class HashedNgramEmbedder:
    """Deterministic local fallback: hashed character n-grams, L2-normalized.

    Uses sha1 of each n-gram so vectors are stable across processes and
    Python versions (never the builtin randomized hash).
    """

    def __init__(self, dim: int = 256, ngram_sizes: tuple[int, ...] = (2, 3, 4)):
        self.dim = dim
        self.ngram_sizes = ngram_sizes
        self.provider_id = f"hashed-ngram-d{dim}-n{''.join(map(str, ngram_sizes))}"

    def _vector(self, label: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        padded = f"#{label.lower()}#"
        for n in self.ngram_sizes:
            for i in range(max(len(padded) - n + 1, 0)):
                gram = padded[i : i + n]
                digest = hashlib.sha1(gram.encode("utf-8")).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dim
                sign = 1.0 if digest[4] % 2 == 0 else -1.0
                vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0  # degenerate label; arbitrary fixed direction
            return vec
        return vec / norm

    def embed(self, labels: list[str]) -> dict[str, np.ndarray]:
        return {label: self._vector(label) for label in set(labels)}


class EmbeddingCache:
    """Content-addressed on-disk cache keyed by (provider id, label)."""

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, provider_id: str, label: str) -> Path:
        key = hashlib.sha256(f"{provider_id}\x00{label}".encode("utf-8")).hexdigest()
        return self.cache_dir / f"{key}.json"

    def get(self, provider_id: str, label: str) -> np.ndarray | None:
        path = self._path(provider_id, label)
        if not path.exists():
            return None
        return np.asarray(json.loads(path.read_text(encoding="utf-8"))["values"], dtype=np.float64)

    def put(self, provider_id: str, label: str, vector: np.ndarray) -> None:
        path = self._path(provider_id, label)
        path.write_text(
            json.dumps({"provider": provider_id, "label": label, "values": vector.tolist()}),
            encoding="utf-8",
        )


def embed_relations(
    labels: list[str],
    provider: EmbeddingProvider,
    cache: EmbeddingCache | None = None,
) -> dict[str, np.ndarray]:
    """One vector per unique label, consulting the on-disk cache first."""
    unique = sorted(set(labels))
    out: dict[str, np.ndarray] = {}
    missing: list[str] = []
    for label in unique:
        cached = cache.get(provider.provider_id, label) if cache else None
        if cached is not None:
            out[label] = cached
        else:
            missing.append(label)
    if missing:
        fresh = provider.embed(missing)
        failed = [label for label in missing if label not in fresh]
        if failed:
            raise EmbeddingProviderError(failed)
        for label, vec in fresh.items():
            out[label] = np.asarray(vec, dtype=np.float64)
            if cache:
                cache.put(provider.provider_id, label, out[label])
    return out


def top_k_candidates(
    query: str,
    index: dict[str, np.ndarray],
    k: int = DEFAULT_CANDIDATE_K,
) -> CandidateSet:
    """Exact top-k by cosine over the whole index, query excluded.

    Ties are broken lexicographically by relation id. Fewer than k other
    relations simply clamps the result.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if query not in index:
        raise KeyError(f"query relation not embedded: {query}")
    qvec = index[query]
    scored = [
        (cosine(qvec, vec), rid)
        for rid, vec in index.items()
        if rid != query
    ]
    scored.sort(key=lambda sr: (-sr[0], sr[1]))
    return CandidateSet(query, tuple((rid, score) for score, rid in scored[:k]))


def write_candidate_sets(sets: list[CandidateSet], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for cs in sets:
            fh.write(json.dumps(cs.to_dict(), ensure_ascii=False) + "\n")


def read_candidate_sets(path: str | Path) -> list[CandidateSet]:
    with open(path, encoding="utf-8") as fh:
        return [CandidateSet.from_dict(json.loads(line)) for line in fh if line.strip()]
