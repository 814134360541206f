"""Pipeline configuration: paper-fixed constants as defaults, resolved-config
snapshots written next to every stage's outputs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml


@dataclass
class PipelineConfig:
    conceptnet_path: str | None = None
    wikidata_path: str | None = None
    language: str = "en"
    weight_threshold: float = 2.0  # strict: keep only weights > threshold
    candidate_k: int = 20
    retrieval_k: int = 8
    embedding_dim: int = 256
    seed: int = 0
    output_dir: str = "out"
    annotators: list = field(default_factory=lambda: ["annotator1", "annotator2", "annotator3"])
    backend: dict = field(default_factory=lambda: {"kind": "replay", "transcript": None})

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        if path is None:
            return cls()
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def snapshot(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "resolved_config.json").write_text(
            json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
