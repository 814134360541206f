"""Parse knowledge-graph dump slices into normalized, relation-grouped triples.

Two sources are supported: ConceptNet assertion dumps (5-column TSV, weight
threshold applied) and a pre-extracted Wikidata slice (4-column TSV with a
pageview count as the popularity signal).
"""

from __future__ import annotations

import gzip
import io
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

logger = logging.getLogger(__name__)

CONCEPTNET_WEIGHT_THRESHOLD = 2.0

_WS_RE = re.compile(r"\s+")


class EmptyConceptError(ValueError):
    """Raised when a concept string normalizes to nothing usable."""


@dataclass(frozen=True)
class RawTriple:
    subject: str
    relation_label: str
    object: str
    score: float
    source: str  # "conceptnet" | "wikidata"

    def to_json(self) -> str:
        return json.dumps(
            {
                "subject": self.subject,
                "relation": self.relation_label,
                "object": self.object,
                "score": self.score,
                "source": self.source,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "RawTriple":
        d = json.loads(line)
        return cls(d["subject"], d["relation"], d["object"], float(d["score"]), d["source"])


@dataclass
class IngestReport:
    triples_read: int = 0
    triples_kept: int = 0
    triples_dropped_by_weight: int = 0
    malformed_lines: int = 0
    relations_seen: int = 0
    _relation_labels: set = field(default_factory=set, repr=False)

    def note_relation(self, label: str) -> None:
        self._relation_labels.add(label)
        self.relations_seen = len(self._relation_labels)

    def to_dict(self) -> dict:
        return {
            "triples_read": self.triples_read,
            "triples_kept": self.triples_kept,
            "triples_dropped_by_weight": self.triples_dropped_by_weight,
            "malformed_lines": self.malformed_lines,
            "relations_seen": self.relations_seen,
        }


def normalize_concept(raw: str, source: str = "conceptnet") -> str:
    """Canonical surface form: NFC, underscores to spaces, collapsed whitespace.

    ConceptNet concepts are lowercased; Wikidata entity casing is preserved.
    Raises EmptyConceptError when nothing survives.
    """
    text = unicodedata.normalize("NFC", raw)
    text = text.replace("_", " ")
    text = _WS_RE.sub(" ", text).strip()
    if source == "conceptnet":
        text = text.lower()
    if not text:
        raise EmptyConceptError(f"concept normalizes to empty: {raw!r}")
    return text


def _open_maybe_gzip(path: Path) -> IO[str]:
    if str(path).endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def _concept_from_uri(uri: str, language_filter: str) -> str | None:
    # /c/en/solar_system[/n/...] -> "solar system"; None when language mismatches
    parts = uri.split("/")
    if len(parts) < 4 or parts[1] != "c":
        return None
    if parts[2] != language_filter:
        return None
    return normalize_concept(parts[3], source="conceptnet")


def _relation_from_uri(uri: str) -> str | None:
    # /r/IsA -> "IsA"
    parts = uri.split("/")
    if len(parts) < 3 or parts[1] != "r":
        return None
    return parts[2]


def parse_conceptnet(
    stream: Iterable[str] | str | Path,
    language_filter: str = "en",
    weight_threshold: float = CONCEPTNET_WEIGHT_THRESHOLD,
) -> tuple[list[RawTriple], IngestReport]:
    """Parse a ConceptNet assertion dump (5-column TSV).

    Only triples with both endpoints in ``language_filter`` and weight strictly
    greater than ``weight_threshold`` are kept. Malformed lines are counted and
    skipped, never fatal.
    """
    if isinstance(stream, (str, Path)):
        with _open_maybe_gzip(Path(stream)) as fh:
            return parse_conceptnet(list(fh), language_filter, weight_threshold)

    triples: list[RawTriple] = []
    report = IngestReport()
    for line in stream:
        line = line.rstrip("\n")
        if not line.strip():
            continue
        report.triples_read += 1
        cols = line.split("\t")
        if len(cols) != 5:
            report.malformed_lines += 1
            continue
        _assertion, rel_uri, start_uri, end_uri, meta = cols
        relation = _relation_from_uri(rel_uri)
        try:
            weight = float(json.loads(meta).get("weight"))
        except (json.JSONDecodeError, TypeError, ValueError):
            report.malformed_lines += 1
            continue
        if relation is None or weight != weight or weight < 0:
            report.malformed_lines += 1
            continue
        try:
            subject = _concept_from_uri(start_uri, language_filter)
            obj = _concept_from_uri(end_uri, language_filter)
        except EmptyConceptError:
            report.malformed_lines += 1
            continue
        if subject is None or obj is None:
            # non-matching language or non-concept endpoint: silently out of scope
            continue
        if weight <= weight_threshold:
            report.triples_dropped_by_weight += 1
            continue
        report.note_relation(relation)
        report.triples_kept += 1
        triples.append(RawTriple(subject, relation, obj, weight, "conceptnet"))
    return triples, report


def parse_wikidata(stream: Iterable[str] | str | Path) -> tuple[list[RawTriple], IngestReport]:
    """Parse a pre-extracted Wikidata slice.

    Format: TSV with header ``subject  property  object  pageviews``; the
    subject's pageview count becomes the triple's popularity score. No weight
    threshold is applied to Wikidata triples.
    """
    if isinstance(stream, (str, Path)):
        with _open_maybe_gzip(Path(stream)) as fh:
            return parse_wikidata(list(fh))

    triples: list[RawTriple] = []
    report = IngestReport()
    lines: Iterator[str] = iter(stream)
    for idx, line in enumerate(lines):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if idx == 0 and line.split("\t")[:1] == ["subject"]:
            continue  # header row
        report.triples_read += 1
        cols = line.split("\t")
        if len(cols) != 4 or any(not c.strip() for c in cols[:3]):
            report.malformed_lines += 1
            continue
        subj_raw, prop_raw, obj_raw, views_raw = cols
        try:
            pageviews = int(views_raw)
            if pageviews < 0:
                raise ValueError
            subject = normalize_concept(subj_raw, source="wikidata")
            relation = normalize_concept(prop_raw, source="wikidata")
            obj = normalize_concept(obj_raw, source="wikidata")
        except (ValueError, EmptyConceptError):
            report.malformed_lines += 1
            continue
        report.note_relation(relation)
        report.triples_kept += 1
        triples.append(RawTriple(subject, relation, obj, float(pageviews), "wikidata"))
    return triples, report


def write_triples(triples: Iterable[RawTriple], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for t in triples:
            fh.write(t.to_json() + "\n")


def read_triples(path: str | Path) -> list[RawTriple]:
    with open(path, encoding="utf-8") as fh:
        return [RawTriple.from_json(line) for line in fh if line.strip()]
