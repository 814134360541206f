import pytest

from analogykit.curation import (
    DuplicatePairError,
    NotACandidateError,
    ReviewStore,
    UnknownAnnotatorError,
    UnknownItemError,
    fleiss_kappa,
    item_id_for,
)
from analogykit.kb import AnalogousRelationPair, STATUS_APPROVED

ANNOTATORS = ["ann1", "ann2", "ann3"]


def pending_pair(a="wikidata/author", b="wikidata/composer", meta="created by"):
    return AnalogousRelationPair(a, b, meta)


@pytest.fixture
def store(fixture_kb, tmp_path):
    candidate_sets = {
        rid: [other for other in fixture_kb.relations if other != rid]
        for rid in fixture_kb.relations
    }
    return ReviewStore(
        ANNOTATORS,
        log_path=tmp_path / "decisions.jsonl",
        kb=fixture_kb,
        candidate_sets=candidate_sets,
    )


class TestEnqueue:
    def test_one_item_per_pair(self, store):
        items = store.enqueue([pending_pair(), pending_pair("wikidata/capital", "wikidata/currency")])
        assert len(items) == 2

    def test_idempotent(self, store):
        store.enqueue([pending_pair()])
        again = store.enqueue([pending_pair()])
        assert again == []
        assert len(store.items) == 1

    def test_evidence_attached_top5(self, store, fixture_kb):
        [item] = store.enqueue([pending_pair()])
        assert len(item.sample_pairs_a) == 5
        top = fixture_kb.relations["wikidata/author"].pairs[:5]
        assert item.sample_pairs_a == list(top)

    def test_missing_relation_flags_item(self, tmp_path):
        store = ReviewStore(ANNOTATORS, log_path=tmp_path / "log.jsonl", kb=None)
        [item] = store.enqueue([pending_pair()])
        assert item.missing_evidence
        assert item.sample_pairs_a == []


class TestDecisions:
    def test_accept_accept_approves(self, store):
        [item] = store.enqueue([pending_pair()])
        store.submit_decision(item.item_id, "ann1", "accept")
        updated = store.submit_decision(item.item_id, "ann2", "accept")
        assert updated.status == "approved"

    def test_accept_reject_conflicts(self, store):
        [item] = store.enqueue([pending_pair()])
        store.submit_decision(item.item_id, "ann1", "accept")
        assert store.submit_decision(item.item_id, "ann2", "reject").status == "conflict"

    def test_conflict_resolved_by_third(self, store):
        [item] = store.enqueue([pending_pair()])
        store.submit_decision(item.item_id, "ann1", "accept")
        store.submit_decision(item.item_id, "ann2", "reject")
        assert store.submit_decision(item.item_id, "ann3", "accept").status == "approved"

    def test_single_accept_stays_pending(self, store):
        [item] = store.enqueue([pending_pair()])
        assert store.submit_decision(item.item_id, "ann1", "accept").status == "pending"

    def test_resubmission_supersedes(self, store):
        [item] = store.enqueue([pending_pair()])
        store.submit_decision(item.item_id, "ann1", "reject")
        store.submit_decision(item.item_id, "ann1", "accept")
        store.submit_decision(item.item_id, "ann2", "accept")
        assert store.items[item.item_id].status == "approved"
        # audit trail keeps both submissions
        assert len(store.items[item.item_id].decisions) == 3

    def test_unknown_item(self, store):
        with pytest.raises(UnknownItemError):
            store.submit_decision("nope", "ann1", "accept")

    def test_unknown_annotator(self, store):
        [item] = store.enqueue([pending_pair()])
        with pytest.raises(UnknownAnnotatorError):
            store.submit_decision(item.item_id, "stranger", "accept")


class TestAddPair:
    def test_valid_candidate_pair(self, store):
        item = store.add_pair("wikidata/director", "wikidata/spouse", "ann1")
        assert item.pair.provenance == "human_added"
        # pre-seeded with the adder's accept
        assert [d.verdict for d in item.latest_decisions()] == ["accept"]

    def test_non_candidate_rejected(self, fixture_kb, tmp_path):
        store = ReviewStore(
            ANNOTATORS,
            log_path=tmp_path / "log.jsonl",
            kb=fixture_kb,
            candidate_sets={"wikidata/author": ["wikidata/composer"]},
        )
        with pytest.raises(NotACandidateError):
            store.add_pair("wikidata/director", "wikidata/spouse", "ann1")

    def test_duplicate_rejected(self, store):
        store.enqueue([pending_pair()])
        with pytest.raises(DuplicatePairError):
            store.add_pair("wikidata/author", "wikidata/composer", "ann1")


class TestReplayReconstruction:
    def test_log_replay_rebuilds_statuses(self, store, tmp_path):
        items = store.enqueue(
            [pending_pair(), pending_pair("wikidata/capital", "wikidata/currency")]
        )
        store.submit_decision(items[0].item_id, "ann1", "accept")
        store.submit_decision(items[0].item_id, "ann2", "accept")
        store.submit_decision(items[1].item_id, "ann1", "reject")

        replayed = ReviewStore(ANNOTATORS, log_path=store.log_path)
        assert {i: it.status for i, it in replayed.items.items()} == {
            i: it.status for i, it in store.items.items()
        }


class TestExportApproved:
    def test_only_approved_exported(self, store):
        items = store.enqueue(
            [pending_pair(), pending_pair("wikidata/capital", "wikidata/currency")]
        )
        store.submit_decision(items[0].item_id, "ann1", "accept")
        store.submit_decision(items[0].item_id, "ann2", "accept")
        store.submit_decision(items[1].item_id, "ann1", "accept")
        store.submit_decision(items[1].item_id, "ann2", "reject")
        approved = store.export_approved()
        assert [p.key() for p in approved] == [("wikidata/author", "wikidata/composer")]
        assert approved[0].status == STATUS_APPROVED

    def test_empty_store(self, tmp_path):
        store = ReviewStore(ANNOTATORS, log_path=tmp_path / "log.jsonl")
        assert store.export_approved() == []

    def test_nothing_from_nowhere(self, store):
        [item] = store.enqueue([pending_pair()])
        store.submit_decision(item.item_id, "ann1", "accept")
        store.submit_decision(item.item_id, "ann2", "accept")
        exported_ids = {item_id_for(p) for p in store.export_approved()}
        assert exported_ids <= set(store.items)


class TestFleissKappa:
    def test_perfect_agreement(self):
        tables = [["accept", "accept"]] * 10
        assert fleiss_kappa(tables) == 1.0

    def test_hand_worked_six_item_table(self):
        # counts [a,r] per item: [2,0]x3 + [1,1]x2 + [0,2]x1 -> P_bar = 2/3,
        # p_accept = 8/12, Pe = (2/3)^2 + (1/3)^2 = 5/9, kappa = (1/9)/(4/9)
        tables = [
            ["accept", "accept"],
            ["accept", "accept"],
            ["accept", "reject"],
            ["reject", "accept"],
            ["reject", "reject"],
            ["accept", "accept"],
        ]
        assert fleiss_kappa(tables) == pytest.approx(0.25, abs=1e-9)

    def test_single_category_degenerate(self):
        tables = [["reject", "reject"], ["reject", "reject"]]
        assert fleiss_kappa(tables) == 1.0

    def test_unequal_counts_error(self):
        with pytest.raises(ValueError):
            fleiss_kappa([["accept", "accept"], ["accept"]])

    def test_fewer_than_two_raters_error(self):
        with pytest.raises(ValueError):
            fleiss_kappa([["accept"], ["reject"]])
