"""Analogy knowledge base core.

Relations own popularity-sorted concept pairs; approved analogous relation
pairs are stored once in canonical order. Both analogy kinds (same-relation
and analogous-relations) are derived on demand rather than materialized.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .kg_ingest import RawTriple

SAME_RELATION = "same_relation"
ANALOGOUS_RELATIONS = "analogous_relations"

PROVENANCE_AUTO = "auto"
PROVENANCE_HUMAN = "human_added"

STATUS_PENDING = "pending"
STATUS_APPROVED = "approved"
STATUS_REJECTED = "rejected"


class UnresolvedRelationError(ValueError):
    """An analogous pair references a relation absent from the KB."""

    def __init__(self, labels: list[str]):
        self.labels = labels
        super().__init__(f"unresolved relation labels: {', '.join(labels)}")


class PairNotApprovedError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ConceptPair:
    subject: str
    object: str
    popularity: float = 0.0

    def key(self) -> tuple[str, str]:
        return (self.subject, self.object)


@dataclass(frozen=True)
class Relation:
    id: str
    label: str
    source: str
    pairs: tuple[ConceptPair, ...]  # sorted by popularity desc, ties (subject, object)


@dataclass(frozen=True)
class AnalogousRelationPair:
    rel_a: str
    rel_b: str
    meta_relation: str = ""
    provenance: str = PROVENANCE_AUTO
    status: str = STATUS_PENDING

    def __post_init__(self):
        if self.rel_a == self.rel_b:
            raise ValueError(f"analogous pair must join distinct relations: {self.rel_a}")
        if self.rel_a > self.rel_b:
            object.__setattr__(self, "rel_a", self.rel_b)
            object.__setattr__(self, "rel_b", self.rel_a)

    def key(self) -> tuple[str, str]:
        return (self.rel_a, self.rel_b)

    def to_dict(self) -> dict:
        return {
            "rel_a": self.rel_a,
            "rel_b": self.rel_b,
            "meta_relation": self.meta_relation,
            "provenance": self.provenance,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalogousRelationPair":
        return cls(
            d["rel_a"],
            d["rel_b"],
            d.get("meta_relation", ""),
            d.get("provenance", PROVENANCE_AUTO),
            d.get("status", STATUS_PENDING),
        )


@dataclass(frozen=True)
class Analogy:
    a: str
    b: str
    c: str
    d: str
    kind: str
    relation_ids: tuple[str, ...]

    def as_text(self) -> str:
        return f"{self.a} is to {self.b} as {self.c} is to {self.d}"


def relation_id(label: str, source: str) -> str:
    return f"{source}/{label}"


def _sorted_pairs(pairs: Iterable[ConceptPair]) -> tuple[ConceptPair, ...]:
    return tuple(sorted(pairs, key=lambda p: (-p.popularity, p.subject, p.object)))


@dataclass(frozen=True)
class KB:
    relations: dict  # id -> Relation
    analogous_pairs: tuple  # canonical AnalogousRelationPair, approved
    source_hashes: dict = field(default_factory=dict)

    def relation(self, rid: str) -> Relation:
        return self.relations[rid]

    def approved_pair_keys(self) -> set:
        return {p.key() for p in self.analogous_pairs}


def build_kb(
    triples: Iterable[RawTriple],
    approved: Iterable[AnalogousRelationPair] = (),
) -> KB:
    """Group triples into relations and attach approved analogous pairs.

    Pairs are deduplicated per relation (highest popularity wins) and sorted
    descending by popularity. Approved pairs referencing unknown relations
    raise with the full list of unresolved labels.
    """
    grouped: dict[str, dict[tuple[str, str], ConceptPair]] = {}
    meta: dict[str, tuple[str, str]] = {}
    for t in triples:
        if t.subject == t.object:
            continue
        rid = relation_id(t.relation_label, t.source)
        meta[rid] = (t.relation_label, t.source)
        bucket = grouped.setdefault(rid, {})
        key = (t.subject, t.object)
        existing = bucket.get(key)
        if existing is None or t.score > existing.popularity:
            bucket[key] = ConceptPair(t.subject, t.object, t.score)

    relations = {
        rid: Relation(rid, meta[rid][0], meta[rid][1], _sorted_pairs(bucket.values()))
        for rid, bucket in grouped.items()
    }

    seen: dict[tuple[str, str], AnalogousRelationPair] = {}
    unresolved: list[str] = []
    for pair in approved:
        for rid in (pair.rel_a, pair.rel_b):
            if rid not in relations:
                unresolved.append(rid)
        seen.setdefault(pair.key(), pair)
    if unresolved:
        raise UnresolvedRelationError(sorted(set(unresolved)))

    pairs = tuple(sorted(seen.values(), key=lambda p: p.key()))
    return KB(relations=relations, analogous_pairs=pairs)


def _canonical_same(p: ConceptPair, q: ConceptPair, rid: str) -> Analogy:
    first, second = sorted([p.key(), q.key()])
    return Analogy(first[0], first[1], second[0], second[1], SAME_RELATION, (rid,))


def iter_same_relation(kb: KB, rid: str) -> Iterator[Analogy]:
    """All C(n,2) same-relation analogies, most popular combinations first.

    Combination order: ascending (rank_i + rank_j, rank_i) over the
    popularity-ranked pair list, so the head of the stream combines the most
    popular pairs.
    """
    pairs = kb.relation(rid).pairs
    n = len(pairs)
    index_pairs = sorted(
        ((i, j) for i in range(n) for j in range(i + 1, n)),
        key=lambda ij: (ij[0] + ij[1], ij[0]),
    )
    for i, j in index_pairs:
        yield _canonical_same(pairs[i], pairs[j], rid)


def enumerate_same_relation(kb: KB, rid: str, limit: int | None = None) -> list[Analogy]:
    if limit is not None and limit < 0:
        raise ValueError("limit must be >= 0")
    it = iter_same_relation(kb, rid)
    if limit is None:
        return list(it)
    return [a for _, a in zip(range(limit), it)]


def iter_analogous(kb: KB, pair: AnalogousRelationPair) -> Iterator[Analogy]:
    """Cross product of the two relations' pairs, most popular first.

    Order: ascending (rank_a + rank_b, rank_a). Degenerate combinations where
    both sides are the same concept pair are skipped.
    """
    if pair.status != STATUS_APPROVED:
        raise PairNotApprovedError(f"pair {pair.key()} has status {pair.status}")
    pairs_a = kb.relation(pair.rel_a).pairs
    pairs_b = kb.relation(pair.rel_b).pairs
    index_pairs = sorted(
        ((i, j) for i in range(len(pairs_a)) for j in range(len(pairs_b))),
        key=lambda ij: (ij[0] + ij[1], ij[0]),
    )
    for i, j in index_pairs:
        p, q = pairs_a[i], pairs_b[j]
        if p.key() == q.key():
            continue
        yield Analogy(p.subject, p.object, q.subject, q.object, ANALOGOUS_RELATIONS, (pair.rel_a, pair.rel_b))


def enumerate_analogous(kb: KB, pair_key: tuple[str, str], limit: int | None = None) -> list[Analogy]:
    if limit is not None and limit < 0:
        raise ValueError("limit must be >= 0")
    pair = next((p for p in kb.analogous_pairs if p.key() == tuple(sorted(pair_key))), None)
    if pair is None:
        raise PairNotApprovedError(f"no approved pair {pair_key}")
    it = iter_analogous(kb, pair)
    if limit is None:
        return list(it)
    return [a for _, a in zip(range(limit), it)]


def kb_stats(kb: KB) -> dict:
    """Exact counts; derivable analogy totals as closed-form sums."""
    per_source_pairs: dict[str, int] = {}
    per_source_relations: dict[str, int] = {}
    for rel in kb.relations.values():
        per_source_pairs[rel.source] = per_source_pairs.get(rel.source, 0) + len(rel.pairs)
        per_source_relations[rel.source] = per_source_relations.get(rel.source, 0) + 1
    same_total = sum(math.comb(len(r.pairs), 2) for r in kb.relations.values())
    analogous_total = sum(
        len(kb.relation(p.rel_a).pairs) * len(kb.relation(p.rel_b).pairs)
        for p in kb.analogous_pairs
    )
    return {
        "concept_pairs_by_source": per_source_pairs,
        "relations_by_source": per_source_relations,
        "relation_count": len(kb.relations),
        "concept_pair_count": sum(len(r.pairs) for r in kb.relations.values()),
        "analogous_relation_pairs": len(kb.analogous_pairs),
        "derivable_analogies": {
            SAME_RELATION: same_total,
            ANALOGOUS_RELATIONS: analogous_total,
        },
    }


@dataclass
class SampleResult:
    analogies: list
    short: bool  # fewer derivable analogies than requested


def sample_analogies(kb: KB, kind: str, n: int, seed: int, band_size: int = 100) -> SampleResult:
    """Deterministic popularity-weighted sample without duplicates.

    The derivation streams are interleaved, chunked into rank bands, and each
    band is shuffled with the seeded RNG; high-popularity bands are consumed
    first. Requesting more than is derivable returns everything, flagged short.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if kind == SAME_RELATION:
        streams = [iter_same_relation(kb, rid) for rid in sorted(kb.relations)]
    elif kind == ANALOGOUS_RELATIONS:
        streams = [iter_analogous(kb, p) for p in kb.analogous_pairs]
    else:
        raise ValueError(f"unknown analogy kind: {kind}")

    rng = random.Random(seed)
    out: list[Analogy] = []
    seen: set[tuple] = set()
    exhausted = [False] * len(streams)
    while len(out) < n and not all(exhausted):
        band: list[Analogy] = []
        for idx, stream in enumerate(streams):
            if exhausted[idx]:
                continue
            for _ in range(band_size):
                try:
                    band.append(next(stream))
                except StopIteration:
                    exhausted[idx] = True
                    break
        rng.shuffle(band)
        for analogy in band:
            key = (analogy.a, analogy.b, analogy.c, analogy.d, analogy.kind)
            if key in seen:
                continue
            seen.add(key)
            out.append(analogy)
            if len(out) == n:
                break
    return SampleResult(analogies=out, short=len(out) < n)


# ---------------------------------------------------------------------------
# Persistence: JSONL per entity kind plus a manifest.


def save_kb(kb: KB, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "relations.jsonl", "w", encoding="utf-8") as fh:
        for rid in sorted(kb.relations):
            rel = kb.relations[rid]
            fh.write(json.dumps({"id": rel.id, "label": rel.label, "source": rel.source}, ensure_ascii=False) + "\n")
    with open(directory / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for rid in sorted(kb.relations):
            for p in kb.relations[rid].pairs:
                fh.write(
                    json.dumps(
                        {"relation_id": rid, "subject": p.subject, "object": p.object, "popularity": p.popularity},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    with open(directory / "analogous_pairs.jsonl", "w", encoding="utf-8") as fh:
        for pair in kb.analogous_pairs:
            fh.write(json.dumps(pair.to_dict(), ensure_ascii=False) + "\n")
    manifest = {
        "counts": kb_stats(kb),
        "built_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "source_hashes": kb.source_hashes,
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def load_kb(directory: str | Path) -> KB:
    directory = Path(directory)
    rel_meta: dict[str, dict] = {}
    with open(directory / "relations.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                rel_meta[d["id"]] = d
    pairs_by_rel: dict[str, list[ConceptPair]] = {rid: [] for rid in rel_meta}
    with open(directory / "pairs.jsonl", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                pairs_by_rel[d["relation_id"]].append(
                    ConceptPair(d["subject"], d["object"], float(d["popularity"]))
                )
    relations = {
        rid: Relation(rid, m["label"], m["source"], _sorted_pairs(pairs_by_rel[rid]))
        for rid, m in rel_meta.items()
    }
    analogous: list[AnalogousRelationPair] = []
    ap_path = directory / "analogous_pairs.jsonl"
    if ap_path.exists():
        with open(ap_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    analogous.append(AnalogousRelationPair.from_dict(json.loads(line)))
    manifest = {}
    mf = directory / "manifest.json"
    if mf.exists():
        manifest = json.loads(mf.read_text(encoding="utf-8"))
    return KB(
        relations=relations,
        analogous_pairs=tuple(sorted(analogous, key=lambda p: p.key())),
        source_hashes=manifest.get("source_hashes", {}),
    )


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
