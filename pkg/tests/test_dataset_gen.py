import pytest

from analogykit.dataset_gen import (
    ExternalItem,
    GenItem,
    compute_overlap,
    exclude_overlap,
    load_external_items,
    make_generation_dataset,
    make_recognition_dataset,
    write_jsonl,
)
from analogykit.kb import ANALOGOUS_RELATIONS, SAME_RELATION


def oracle_check_item(item, kb):
    """Independent validity oracle, re-deriving analogy validity from the KB.

    The answer's surface pair must live under a relation that is the query's
    relation or approved-analogous to it; no distractor's pair may.
    """
    approved = kb.approved_pair_keys()
    query_rid = item.relation_ids[0]
    assert item.query in {p.key() for p in kb.relation(query_rid).pairs}

    def relations_holding(pair):
        return {
            rid
            for rid, rel in kb.relations.items()
            if pair in {p.key() for p in rel.pairs}
        }

    def linked(rid):
        return rid == query_rid or tuple(sorted((rid, query_rid))) in approved

    answer = item.candidates[item.answer_index]
    assert any(linked(rid) for rid in relations_holding(answer)), "answer not analogous/same"
    for idx, cand in enumerate(item.candidates):
        if idx == item.answer_index:
            continue
        assert not any(linked(rid) for rid in relations_holding(cand)), "distractor is valid"


class TestRecognitionDataset:
    def test_oracle_validity(self, fixture_kb):
        items, _ = make_recognition_dataset(fixture_kb, n_same=60, n_analogous=60, seed=5)
        assert items
        for item in items:
            oracle_check_item(item, fixture_kb)

    def test_all_analogous_when_n_same_zero(self, fixture_kb):
        items, _ = make_recognition_dataset(fixture_kb, n_same=0, n_analogous=30, seed=5)
        assert items
        assert all(i.kind == ANALOGOUS_RELATIONS for i in items)

    def test_deterministic_file_output(self, fixture_kb, tmp_path):
        for run in ("a", "b"):
            items, _ = make_recognition_dataset(fixture_kb, 40, 40, seed=9)
            write_jsonl(items, tmp_path / f"{run}.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_no_identical_candidates_within_item(self, fixture_kb):
        items, _ = make_recognition_dataset(fixture_kb, 50, 50, seed=2)
        for item in items:
            assert len(set(item.candidates)) == 4

    def test_exactly_four_candidates(self, fixture_kb):
        items, _ = make_recognition_dataset(fixture_kb, 20, 20, seed=1)
        for item in items:
            assert len(item.candidates) == 4
            assert 0 <= item.answer_index <= 3


class TestGenerationDataset:
    def test_text_form(self, fixture_kb):
        items, _ = make_generation_dataset(fixture_kb, 20, seed=4)
        for item in items:
            assert item.text() == f"{item.a} is to {item.b} as {item.c} is to"
            assert item.target_d

    def test_pairs_are_valid_kb_analogies(self, fixture_kb):
        items, _ = make_generation_dataset(fixture_kb, 40, seed=4)
        for item in items:
            rels = item.relation_ids
            first = {p.key() for p in fixture_kb.relation(rels[0]).pairs}
            last = {p.key() for p in fixture_kb.relation(rels[-1]).pairs}
            assert (item.a, item.b) in first
            assert (item.c, item.target_d) in last

    def test_no_duplicates(self, fixture_kb):
        items, _ = make_generation_dataset(fixture_kb, 200, seed=4)
        keys = [(i.a, i.b, i.c, i.target_d) for i in items]
        assert len(keys) == len(set(keys))

    def test_oversized_request_flagged(self, fixture_kb):
        items, report = make_generation_dataset(fixture_kb, 10_000, seed=4)
        assert report.short
        assert len(items) < 10_000


class TestOverlap:
    def test_both_tuples_present_is_overlap(self, fixture_kb):
        # both pairs live under approved-analogous relations (CEO / head of state)
        ext = [ExternalItem("Tim Cook", "Apple", "Joe Biden", "USA")]
        rate, overlapping = compute_overlap(fixture_kb, ext)
        assert rate == 1.0
        assert overlapping == ext

    def test_same_relation_overlap(self, fixture_kb):
        ext = [ExternalItem("up", "down", "high", "low")]
        rate, _ = compute_overlap(fixture_kb, ext)
        assert rate == 1.0

    def test_one_tuple_present_not_overlap(self, fixture_kb):
        ext = [ExternalItem("Tim Cook", "Apple", "unicorn", "rainbow")]
        rate, overlapping = compute_overlap(fixture_kb, ext)
        assert rate == 0.0
        assert overlapping == []

    def test_unlinked_relations_not_overlap(self, fixture_kb):
        # both tuples in the KB, but capital and spouse are not analogous
        ext = [ExternalItem("France", "Paris", "Barack Obama", "Michelle Obama")]
        rate, _ = compute_overlap(fixture_kb, ext)
        assert rate == 0.0

    def test_empty_external_set_errors(self, fixture_kb):
        with pytest.raises(ValueError):
            compute_overlap(fixture_kb, [])


class TestExcludeOverlap:
    def planted(self):
        train = [
            GenItem("up", "down", "high", "low", SAME_RELATION, ("conceptnet/antonym",)),
            GenItem("hot", "cold", "left", "right", SAME_RELATION, ("conceptnet/antonym",)),
            GenItem("lion", "animal", "apple", "fruit", SAME_RELATION, ("conceptnet/IsA",)),
            GenItem("rose", "flower", "oak", "tree", SAME_RELATION, ("conceptnet/IsA",)),
            GenItem("wheel", "car", "leaf", "tree", SAME_RELATION, ("conceptnet/PartOf",)),
        ]
        external = [
            ExternalItem("up", "down", "high", "low"),
            ExternalItem("left", "right", "hot", "cold"),  # swapped halves still match
            ExternalItem("Lion", "Animal", "Apple", "Fruit"),  # case-insensitive
            ExternalItem("not", "in", "the", "kb"),
        ]
        return train, external

    def test_planted_collisions_removed(self):
        train, external = self.planted()
        filtered = exclude_overlap(train, [external])
        assert len(train) - len(filtered) == 3

    def test_disjoint_is_identity(self):
        train, _ = self.planted()
        assert exclude_overlap(train, [[ExternalItem("w", "x", "y", "z")]]) == train

    def test_idempotent(self):
        train, external = self.planted()
        once = exclude_overlap(train, [external])
        assert exclude_overlap(once, [external]) == once


class TestExternalLoader:
    def test_parse_and_malformed_count(self, tmp_path):
        path = tmp_path / "ext.txt"
        path.write_text(
            "up:down::high:low\n"
            "# comment\n"
            "broken line\n"
            "a:b::c:d\n"
            "x:::y::z\n",
            encoding="utf-8",
        )
        items, malformed = load_external_items(path)
        assert len(items) == 2
        assert malformed == 2
        assert items[0] == ExternalItem("up", "down", "high", "low")
