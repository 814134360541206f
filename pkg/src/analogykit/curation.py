"""Human-in-the-loop review of analogous relation pairs.

Event-sourced: every mutation (enqueue, decision, human add) is appended to a
JSONL log, and item status is a pure function of the decision multiset, so
replaying the log reconstructs the store exactly. An HTTP/JSON API on top is
provided in :mod:`analogykit.api`.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from .kb import (
    KB,
    AnalogousRelationPair,
    ConceptPair,
    PROVENANCE_HUMAN,
    STATUS_APPROVED,
    STATUS_PENDING,
    STATUS_REJECTED,
)

logger = logging.getLogger(__name__)

STATUS_CONFLICT = "conflict"

VERDICT_ACCEPT = "accept"
VERDICT_REJECT = "reject"

EVIDENCE_SAMPLE_SIZE = 5
APPROVAL_THRESHOLD = 2


class UnknownItemError(KeyError):
    pass


class UnknownAnnotatorError(ValueError):
    pass


class NotACandidateError(ValueError):
    pass


class DuplicatePairError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationRecord:
    annotator: str
    verdict: str
    timestamp: str
    note: str = ""


@dataclass
class ReviewItem:
    item_id: str
    pair: AnalogousRelationPair
    sample_pairs_a: list
    sample_pairs_b: list
    decisions: list = field(default_factory=list)
    missing_evidence: bool = False

    @property
    def status(self) -> str:
        return resolve_status([d.verdict for d in self.latest_decisions()])

    def latest_decisions(self) -> list[AnnotationRecord]:
        # later submissions by the same annotator supersede earlier ones
        latest: dict[str, AnnotationRecord] = {}
        for d in self.decisions:
            latest[d.annotator] = d
        return list(latest.values())

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "pair": self.pair.to_dict(),
            "sample_pairs_a": [{"subject": p.subject, "object": p.object, "popularity": p.popularity} for p in self.sample_pairs_a],
            "sample_pairs_b": [{"subject": p.subject, "object": p.object, "popularity": p.popularity} for p in self.sample_pairs_b],
            "decisions": [
                {"annotator": d.annotator, "verdict": d.verdict, "timestamp": d.timestamp, "note": d.note}
                for d in self.latest_decisions()
            ],
            "status": self.status,
            "missing_evidence": self.missing_evidence,
        }


def resolve_status(verdicts: list[str]) -> str:
    """Pure status policy over one-latest-verdict-per-annotator lists."""
    accepts = verdicts.count(VERDICT_ACCEPT)
    rejects = verdicts.count(VERDICT_REJECT)
    if accepts >= APPROVAL_THRESHOLD:
        return STATUS_APPROVED
    if rejects >= APPROVAL_THRESHOLD:
        return STATUS_REJECTED
    if accepts == 1 and rejects == 1:
        return STATUS_CONFLICT
    return STATUS_PENDING


def item_id_for(pair: AnalogousRelationPair) -> str:
    return f"{pair.rel_a}||{pair.rel_b}"


def _evidence(kb: KB | None, rid: str) -> tuple[list, bool]:
    if kb is None or rid not in kb.relations:
        return [], True
    return list(kb.relations[rid].pairs[:EVIDENCE_SAMPLE_SIZE]), False


class ReviewStore:
    """Append-only decision log with derived in-memory state."""

    def __init__(
        self,
        annotators: list[str],
        log_path: str | Path | None = None,
        kb: KB | None = None,
        candidate_sets: dict[str, list[str]] | None = None,
    ):
        self.annotators = list(annotators)
        self.log_path = Path(log_path) if log_path else None
        self.kb = kb
        self.candidate_sets = candidate_sets or {}
        self.items: dict[str, ReviewItem] = {}
        if self.log_path and self.log_path.exists():
            self._replay()

    # -- event log ---------------------------------------------------------

    def _append_event(self, event: dict) -> None:
        if self.log_path is None:
            return
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    self._apply(json.loads(line), record=False)

    def _apply(self, event: dict, record: bool = True) -> None:
        kind = event["event"]
        if kind == "enqueued":
            pair = AnalogousRelationPair.from_dict(event["pair"])
            self._materialize(pair)
        elif kind == "decision":
            item = self.items[event["item_id"]]
            item.decisions.append(
                AnnotationRecord(
                    event["annotator"], event["verdict"], event["timestamp"], event.get("note", "")
                )
            )
        elif kind == "pair_added":
            pair = AnalogousRelationPair.from_dict(event["pair"])
            self._materialize(pair)
        if record:
            self._append_event(event)

    def _materialize(self, pair: AnalogousRelationPair) -> ReviewItem:
        iid = item_id_for(pair)
        if iid in self.items:
            return self.items[iid]
        ev_a, miss_a = _evidence(self.kb, pair.rel_a)
        ev_b, miss_b = _evidence(self.kb, pair.rel_b)
        if (miss_a or miss_b) and self.kb is not None:
            logger.warning("review item %s has missing KB evidence", iid)
        item = ReviewItem(
            item_id=iid,
            pair=pair,
            sample_pairs_a=ev_a,
            sample_pairs_b=ev_b,
            missing_evidence=miss_a or miss_b,
        )
        self.items[iid] = item
        return item

    # -- operations --------------------------------------------------------

    def enqueue(self, pending: list[AnalogousRelationPair]) -> list[ReviewItem]:
        """Create one review item per pair; re-enqueueing is a no-op."""
        created: list[ReviewItem] = []
        for pair in pending:
            if item_id_for(pair) in self.items:
                continue
            self._apply({"event": "enqueued", "pair": pair.to_dict()})
            created.append(self.items[item_id_for(pair)])
        return created

    def submit_decision(
        self, item_id: str, annotator: str, verdict: str, note: str = ""
    ) -> ReviewItem:
        if item_id not in self.items:
            raise UnknownItemError(item_id)
        if annotator not in self.annotators:
            raise UnknownAnnotatorError(f"annotator not registered: {annotator}")
        if verdict not in (VERDICT_ACCEPT, VERDICT_REJECT):
            raise ValueError(f"verdict must be accept or reject, got {verdict!r}")
        self._apply(
            {
                "event": "decision",
                "item_id": item_id,
                "annotator": annotator,
                "verdict": verdict,
                "note": note,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            }
        )
        return self.items[item_id]

    def add_pair(self, rel_a: str, rel_b: str, annotator: str) -> ReviewItem:
        """Annotator-added pair; must come from the candidate sets, like the
        automatic route, and arrives pre-seeded with the adder's accept."""
        if annotator not in self.annotators:
            raise UnknownAnnotatorError(f"annotator not registered: {annotator}")
        a, b = sorted((rel_a, rel_b))
        if b not in self.candidate_sets.get(a, []) and a not in self.candidate_sets.get(b, []):
            raise NotACandidateError(f"({rel_a}, {rel_b}) is not in any candidate set")
        iid = f"{a}||{b}"
        if iid in self.items:
            raise DuplicatePairError(f"pair already present with status {self.items[iid].status}")
        pair = AnalogousRelationPair(a, b, provenance=PROVENANCE_HUMAN, status=STATUS_PENDING)
        self._apply({"event": "pair_added", "pair": pair.to_dict(), "annotator": annotator})
        self.submit_decision(iid, annotator, VERDICT_ACCEPT)
        return self.items[iid]

    def pending_items(self) -> list[ReviewItem]:
        return [i for i in sorted(self.items.values(), key=lambda i: i.item_id) if i.status == STATUS_PENDING]

    def stats(self) -> dict:
        counts = {STATUS_PENDING: 0, STATUS_APPROVED: 0, STATUS_REJECTED: 0, STATUS_CONFLICT: 0}
        for item in self.items.values():
            counts[item.status] += 1
        kappa = None
        fully_decided = [
            [d.verdict for d in item.latest_decisions()][:2]
            for item in self.items.values()
            if len(item.latest_decisions()) >= 2
        ]
        if fully_decided:
            try:
                kappa = fleiss_kappa(fully_decided)
            except ValueError:
                kappa = None
        return {"counts": counts, "total": len(self.items), "fleiss_kappa": kappa}

    def export_approved(self) -> list[AnalogousRelationPair]:
        """Approved pairs only, canonical order, ready for a KB rebuild."""
        out = [
            AnalogousRelationPair(
                item.pair.rel_a,
                item.pair.rel_b,
                item.pair.meta_relation,
                item.pair.provenance,
                STATUS_APPROVED,
            )
            for item in self.items.values()
            if item.status == STATUS_APPROVED
        ]
        return sorted(out, key=lambda p: p.key())


def fleiss_kappa(tables: list[list[str]], categories: tuple[str, ...] = (VERDICT_ACCEPT, VERDICT_REJECT)) -> float:
    """Fleiss's kappa for n items each rated by the same number of raters.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar). When every rater uses a single
    category on every item, agreement is perfect and 1.0 is returned by
    convention; any other configuration with Pe_bar = 1 is undefined.
    """
    if not tables:
        raise ValueError("no items")
    m = len(tables[0])
    if m < 2:
        raise ValueError("need at least 2 raters per item")
    if any(len(row) != m for row in tables):
        raise ValueError("every item must have the same number of ratings")

    n = len(tables)
    counts = [[row.count(cat) for cat in categories] for row in tables]
    p_i = [
        (sum(c * c for c in row) - m) / (m * (m - 1))
        for row in counts
    ]
    p_bar = sum(p_i) / n
    p_j = [sum(row[j] for row in counts) / (n * m) for j in range(len(categories))]
    pe_bar = sum(p * p for p in p_j)
    if pe_bar == 1.0:
        if p_bar == 1.0:
            return 1.0
        raise ValueError("kappa undefined: expected agreement is 1 without perfect agreement")
    return (p_bar - pe_bar) / (1.0 - pe_bar)
