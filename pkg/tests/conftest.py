import pytest
from pathlib import Path

from analogykit import kg_ingest, kb as kb_mod, llm_filter

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fixture_triples():
    cn, _ = kg_ingest.parse_conceptnet(DATA / "conceptnet_fixture.tsv")
    wd, _ = kg_ingest.parse_wikidata(DATA / "wikidata_fixture.tsv")
    return cn + wd


@pytest.fixture(scope="session")
def approved_pairs():
    pending = llm_filter.read_pairs(DATA / "golden_pending_pairs.jsonl")
    return [
        kb_mod.AnalogousRelationPair(
            p.rel_a, p.rel_b, p.meta_relation, p.provenance, kb_mod.STATUS_APPROVED
        )
        for p in pending
    ]


@pytest.fixture(scope="session")
def fixture_kb(fixture_triples, approved_pairs):
    return kb_mod.build_kb(fixture_triples, approved_pairs)
