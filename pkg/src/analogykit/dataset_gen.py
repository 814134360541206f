"""Materialize analogy-reasoning datasets from the KB.

Recognition items are 4-way multiple choice: one query concept pair, one
correct candidate (same or analogous relation) and three distractors from
relations that are neither the query's relation nor analogous to it.
Generation items hold out D from "A is to B as C is to D". Overlap against
external benchmarks is controlled with the both-tuples rule.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .kb import (
    ANALOGOUS_RELATIONS,
    KB,
    Analogy,
    SAME_RELATION,
    sample_analogies,
)

logger = logging.getLogger(__name__)

N_CANDIDATES = 4
N_DISTRACTORS = 3


@dataclass(frozen=True)
class McqaItem:
    query: tuple  # (a, b)
    candidates: tuple  # 4 x (c, d)
    answer_index: int
    kind: str
    relation_ids: tuple
    shared_concepts: bool = False  # query and answer pairs share a concept

    def to_dict(self) -> dict:
        return {
            "query": {"a": self.query[0], "b": self.query[1]},
            "candidates": [{"c": c, "d": d} for c, d in self.candidates],
            "answer": self.answer_index,
            "kind": self.kind,
            "relations": list(self.relation_ids),
            "shared_concepts": self.shared_concepts,
            "text": render_mcqa_text(self),
        }


@dataclass(frozen=True)
class GenItem:
    a: str
    b: str
    c: str
    target_d: str
    kind: str
    relation_ids: tuple

    def text(self) -> str:
        return f"{self.a} is to {self.b} as {self.c} is to"

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.target_d,
            "kind": self.kind,
            "relations": list(self.relation_ids),
            "text": self.text(),
        }


def render_mcqa_text(item: McqaItem) -> str:
    lines = [f"{item.query[0]} is to {item.query[1]} as:"]
    for i, (c, d) in enumerate(item.candidates):
        lines.append(f"({chr(ord('A') + i)}) {c} is to {d}")
    return "\n".join(lines)


@dataclass
class DatasetReport:
    requested: int = 0
    emitted: int = 0
    skipped_no_distractors: int = 0
    short: bool = False

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def _analogous_neighbors(kb: KB) -> dict[str, set[str]]:
    neighbors: dict[str, set[str]] = {rid: set() for rid in kb.relations}
    for p in kb.analogous_pairs:
        neighbors.setdefault(p.rel_a, set()).add(p.rel_b)
        neighbors.setdefault(p.rel_b, set()).add(p.rel_a)
    return neighbors


def _distractor_pool(kb: KB, query_rid: str, neighbors: dict[str, set[str]]) -> list[tuple]:
    """(relation_id, ConceptPair) from relations neither equal/analogous to the
    query relation nor sharing its surface label (guards near-duplicate
    relations across sources)."""
    query_label = kb.relations[query_rid].label.lower()
    banned = {query_rid} | neighbors.get(query_rid, set())
    banned |= {rid for rid, rel in kb.relations.items() if rel.label.lower() == query_label}
    # a surface pair that also exists under a banned relation would be a
    # valid answer, not a distractor
    banned_pair_keys = {p.key() for rid in banned for p in kb.relations[rid].pairs}
    pool = []
    for rid in sorted(kb.relations):
        if rid in banned:
            continue
        for p in kb.relations[rid].pairs:
            if p.key() not in banned_pair_keys:
                pool.append((rid, p))
    return pool


def _build_item(
    analogy: Analogy,
    kb: KB,
    neighbors: dict[str, set[str]],
    rng: random.Random,
) -> McqaItem | None:
    query = (analogy.a, analogy.b)
    answer = (analogy.c, analogy.d)
    query_rid = analogy.relation_ids[0]
    pool = _distractor_pool(kb, query_rid, neighbors)
    # reject distractors identical to the query or answer surface pair
    pool = [(rid, p) for rid, p in pool if p.key() not in (query, answer)]
    if len(pool) < N_DISTRACTORS:
        return None
    picked = rng.sample(pool, N_DISTRACTORS)
    candidates = [answer] + [p.key() for _, p in picked]
    order = list(range(N_CANDIDATES))
    rng.shuffle(order)
    shuffled = tuple(candidates[i] for i in order)
    answer_index = order.index(0)
    shared = bool(set(query) & set(answer))
    return McqaItem(
        query=query,
        candidates=shuffled,
        answer_index=answer_index,
        kind=analogy.kind,
        relation_ids=analogy.relation_ids,
        shared_concepts=shared,
    )


def make_recognition_dataset(
    kb: KB,
    n_same: int,
    n_analogous: int,
    seed: int,
) -> tuple[list[McqaItem], DatasetReport]:
    """Deterministic per seed. Queries for which 3 valid distractors cannot be
    found are skipped and counted."""
    if len(kb.relations) < 5 and (n_same or n_analogous):
        logger.warning("KB has fewer than 5 relations; distractor diversity is limited")
    rng = random.Random(seed)
    neighbors = _analogous_neighbors(kb)
    report = DatasetReport(requested=n_same + n_analogous)
    items: list[McqaItem] = []
    for kind, n in ((SAME_RELATION, n_same), (ANALOGOUS_RELATIONS, n_analogous)):
        if n == 0:
            continue
        sample = sample_analogies(kb, kind, n, seed=rng.randrange(2**31))
        if sample.short:
            report.short = True
        for analogy in sample.analogies:
            item = _build_item(analogy, kb, neighbors, rng)
            if item is None:
                report.skipped_no_distractors += 1
                continue
            items.append(item)
    report.emitted = len(items)
    return items, report


def make_generation_dataset(kb: KB, n: int, seed: int) -> tuple[list[GenItem], DatasetReport]:
    """Split the budget across both analogy kinds; deterministic, no duplicates."""
    rng = random.Random(seed)
    report = DatasetReport(requested=n)
    n_same = n // 2
    n_analogous = n - n_same
    items: list[GenItem] = []
    seen: set[tuple] = set()
    for kind, want in ((SAME_RELATION, n_same), (ANALOGOUS_RELATIONS, n_analogous)):
        sample = sample_analogies(kb, kind, want, seed=rng.randrange(2**31))
        for analogy in sample.analogies:
            key = (analogy.a, analogy.b, analogy.c, analogy.d)
            if key in seen:
                continue
            seen.add(key)
            items.append(
                GenItem(analogy.a, analogy.b, analogy.c, analogy.d, kind, analogy.relation_ids)
            )
    report.emitted = len(items)
    report.short = len(items) < n
    return items, report


# ---------------------------------------------------------------------------
# Overlap control (both-tuples rule)


@dataclass(frozen=True)
class ExternalItem:
    a: str
    b: str
    c: str
    d: str


class _PairIndex:
    """(subject, object) -> relation ids, with approved-analogous lookups."""

    def __init__(self, kb: KB):
        self.by_pair: dict[tuple, set] = {}
        for rid, rel in kb.relations.items():
            for p in rel.pairs:
                self.by_pair.setdefault((p.subject.lower(), p.object.lower()), set()).add(rid)
        self.approved = kb.approved_pair_keys()

    def relations_for(self, a: str, b: str) -> set:
        return self.by_pair.get((a.strip().lower(), b.strip().lower()), set())

    def tuples_linked(self, r1s: set, r2s: set) -> bool:
        for r1 in r1s:
            for r2 in r2s:
                if r1 == r2 or tuple(sorted((r1, r2))) in self.approved:
                    return True
        return False


def item_overlaps(kb_index: _PairIndex, item: ExternalItem) -> bool:
    """An external A:B::C:D overlaps when both tuples (A,R1,B) and (C,R2,D) are
    in the KB with R1 and R2 the same or analogous."""
    r1s = kb_index.relations_for(item.a, item.b)
    r2s = kb_index.relations_for(item.c, item.d)
    if not r1s or not r2s:
        return False
    return kb_index.tuples_linked(r1s, r2s)


def compute_overlap(kb: KB, external: list[ExternalItem]) -> tuple[float, list[ExternalItem]]:
    """Overlap rate plus the overlapping subset for downstream exclusion."""
    if not external:
        raise ValueError("empty external set: overlap rate undefined")
    index = _PairIndex(kb)
    overlapping = [item for item in external if item_overlaps(index, item)]
    return len(overlapping) / len(external), overlapping


def _quad_key(a: str, b: str, c: str, d: str) -> frozenset:
    # A:B::C:D matches C:D::A:B; compare unordered pair-of-pairs, case-folded
    return frozenset({(a.lower(), b.lower()), (c.lower(), d.lower())})


def exclude_overlap(items: list, external_sets: Iterable[list]) -> list:
    """Drop training items whose pair-of-pairs matches any external test item.

    Works for both GenItems and McqaItems (query + correct candidate).
    Idempotent by construction.
    """
    banned: set[frozenset] = set()
    for ext in external_sets:
        for e in ext:
            banned.add(_quad_key(e.a, e.b, e.c, e.d))

    kept = []
    for item in items:
        if isinstance(item, GenItem):
            key = _quad_key(item.a, item.b, item.c, item.target_d)
        else:
            c, d = item.candidates[item.answer_index]
            key = _quad_key(item.query[0], item.query[1], c, d)
        if key not in banned:
            kept.append(item)
    return kept


def load_external_items(path: str | Path) -> tuple[list[ExternalItem], int]:
    """Common A:B::C:D text format, one item per line ("a:b::c:d").

    Malformed lines are skipped and counted.
    """
    items: list[ExternalItem] = []
    malformed = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            halves = line.split("::")
            if len(halves) != 2:
                malformed += 1
                continue
            left = halves[0].split(":")
            right = halves[1].split(":")
            if len(left) != 2 or len(right) != 2 or not all(s.strip() for s in left + right):
                malformed += 1
                continue
            items.append(
                ExternalItem(left[0].strip(), left[1].strip(), right[0].strip(), right[1].strip())
            )
    return items, malformed


def write_jsonl(items: Iterable, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
