"""Acceptance gate: one test per release criterion, each printing a pass line.

Run with -s (or read the captured stdout) to see the per-criterion verdicts.
"""

import json
import math
import random
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from analogykit import kb as kb_mod, kg_ingest, linker, llm_filter
from analogykit.cli import main as cli_main
from analogykit.curation import fleiss_kappa
from analogykit.dataset_gen import (
    ExternalItem,
    McqaItem,
    compute_overlap,
    make_recognition_dataset,
)
from analogykit.eval_harness import (
    RankedPrediction,
    WordVectors,
    accuracy as accuracy_metric,
    embed_analogies,
    hit_at_k,
    mrr,
    offset_predict,
    recall_at_k,
    render_generation_query,
    retrieve_topk_analogies,
)
from analogykit.kb import Analogy, SAME_RELATION
from analogykit.linker import HashedNgramEmbedder, cosine, top_k_candidates
from analogykit.llm_filter import SelectionResult, apply_symmetry_rule

DATA = Path(__file__).parent / "data"


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"FAIL: {name}")
        raise
    print(f"PASS: {name}")


def _run_pipeline(out: Path) -> None:
    runner = CliRunner()
    stages = [
        ["ingest", "--conceptnet", str(DATA / "conceptnet_fixture.tsv"),
         "--wikidata", str(DATA / "wikidata_fixture.tsv"), "--out", str(out)],
        ["link", "--triples", str(out / "triples.jsonl"), "--out", str(out)],
        ["llm-filter", "--candidates", str(out / "candidates.jsonl"),
         "--transcript", str(DATA / "transcript.jsonl"), "--out", str(out)],
        ["build-kb", "--triples", str(out / "triples.jsonl"),
         "--approved", str(out / "pending_pairs.jsonl"), "--approve-pending",
         "--out", str(out)],
    ]
    for args in stages:
        result = runner.invoke(cli_main, args, catch_exceptions=False)
        assert result.exit_code == 0, result.output


def test_end_to_end_fixture_run(tmp_path):
    with criterion("end-to-end fixture run (golden, byte-identical, <10s)"):
        started = time.monotonic()
        for name in ("first", "second"):
            _run_pipeline(tmp_path / name)
        elapsed = time.monotonic() - started

        golden = (DATA / "golden_pending_pairs.jsonl").read_bytes()
        assert (tmp_path / "first" / "pending_pairs.jsonl").read_bytes() == golden
        for artifact in ("triples.jsonl", "candidates.jsonl", "pending_pairs.jsonl",
                         "kb/relations.jsonl", "kb/pairs.jsonl", "kb/analogous_pairs.jsonl"):
            assert (tmp_path / "first" / artifact).read_bytes() == (
                tmp_path / "second" / artifact
            ).read_bytes(), artifact
        assert elapsed < 10.0, f"two pipeline runs took {elapsed:.2f}s"


def test_ingestion_weight_threshold():
    with criterion("ingestion keeps weight > 2.0 only; boundary 2.0 dropped"):
        raw_rows = []
        for line in (DATA / "conceptnet_fixture.tsv").read_text().splitlines():
            cols = line.split("\t")
            if len(cols) != 5:
                continue
            try:
                weight = json.loads(cols[4]).get("weight")
            except json.JSONDecodeError:
                continue
            concepts = [c.split("/")[3] if c.count("/") >= 3 else "" for c in (cols[2], cols[3])]
            well_formed = all(
                c.startswith("/c/en/") and tok.replace("_", " ").strip()
                for c, tok in zip((cols[2], cols[3]), concepts)
            )
            if well_formed and isinstance(weight, (int, float)):
                raw_rows.append(float(weight))
        assert 2.0 in raw_rows, "fixture must contain the boundary case"

        triples, report = kg_ingest.parse_conceptnet(DATA / "conceptnet_fixture.tsv")
        assert len(triples) == sum(1 for w in raw_rows if w > 2.0)
        assert report.triples_dropped_by_weight == sum(1 for w in raw_rows if w <= 2.0)


def test_symmetry_rule_against_bruteforce_oracle():
    with criterion("Rule 1 equals O(n^2) mutual-selection brute force, 100 seeds"):
        for seed in range(100):
            rng = random.Random(seed)
            n = rng.randint(10, 40)
            relations = [f"rel{i}" for i in range(n)]
            results = []
            for r in relations:
                others = [x for x in relations if x != r]
                shown = rng.sample(others, min(20, len(others)))
                selected = tuple(x for x in shown if rng.random() < 0.3)
                results.append(SelectionResult(r, tuple(shown), selected, ""))
            got = apply_symmetry_rule(results)
            sel = {r.query: set(r.selected) for r in results}
            expected = sorted(
                tuple(sorted((a, b)))
                for i, a in enumerate(relations)
                for b in relations[i + 1:]
                if b in sel[a] and a in sel[b]
            )
            assert got == expected, f"seed {seed}"


def test_meta_rule_drops_none_and_funnel_is_monotone(tmp_path):
    with criterion("Rule 2 drops every 'None' meta; funnel raw >= r1 >= r2"):
        _run_pipeline(tmp_path)
        sets = linker.read_candidate_sets(tmp_path / "candidates.jsonl")
        labels = {cs.query_relation: cs.query_relation.split("/", 1)[1] for cs in sets}
        backend = llm_filter.ReplayBackend(DATA / "transcript.jsonl")
        funnel, _, metas = llm_filter.run_filter_stage(sets, backend, labels=labels)

        none_pairs = {m.pair for m in metas if m.meta is None}
        assert none_pairs, "fixture must exercise a 'None' meta response"
        final_keys = {p.key() for p in funnel.after_rule2}
        assert not none_pairs & final_keys

        counts = funnel.counts()
        assert counts["raw"] >= counts["after_rule1"] >= counts["after_rule2"]
        assert final_keys <= set(funnel.after_rule1) <= set(funnel.raw_pairs)


def test_enumeration_counts(fixture_kb):
    with criterion("same-relation count = C(n,2); analogous count = n_a*n_b"):
        for rid, rel in fixture_kb.relations.items():
            analogies = kb_mod.enumerate_same_relation(fixture_kb, rid)
            assert len(analogies) == math.comb(len(rel.pairs), 2), rid
            assert len({(a.a, a.b, a.c, a.d) for a in analogies}) == len(analogies)
        assert fixture_kb.analogous_pairs
        for pair in fixture_kb.analogous_pairs:
            analogies = kb_mod.enumerate_analogous(fixture_kb, pair.key())
            n_a = len(fixture_kb.relation(pair.rel_a).pairs)
            n_b = len(fixture_kb.relation(pair.rel_b).pairs)
            identical = sum(
                1
                for p in fixture_kb.relation(pair.rel_a).pairs
                for q in fixture_kb.relation(pair.rel_b).pairs
                if p.key() == q.key()
            )
            assert len(analogies) == n_a * n_b - identical, pair.key()


def test_mcqa_validity_and_answer_balance(fixture_kb):
    with criterion("1000 MCQA items valid per oracle; answer index 25% +/- 5"):
        items, _ = make_recognition_dataset(fixture_kb, n_same=500, n_analogous=500, seed=11)
        assert len(items) == 1000
        approved = fixture_kb.approved_pair_keys()
        pair_keys = {
            rid: {p.key() for p in rel.pairs} for rid, rel in fixture_kb.relations.items()
        }

        def valid_under(pair, query_rid):
            holders = {rid for rid, keys in pair_keys.items() if pair in keys}
            return any(
                rid == query_rid or tuple(sorted((rid, query_rid))) in approved
                for rid in holders
            )

        for item in items:
            query_rid = item.relation_ids[0]
            assert valid_under(item.candidates[item.answer_index], query_rid)
            for idx, cand in enumerate(item.candidates):
                if idx != item.answer_index:
                    assert not valid_under(cand, query_rid)

        for slot in range(4):
            freq = sum(1 for i in items if i.answer_index == slot) / len(items)
            assert 0.20 <= freq <= 0.30, f"slot {slot}: {freq:.3f}"


def test_retrieval_exactness():
    with criterion("top-20 candidates and top-8 retrieval equal exhaustive scans"):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(25, 201))
            ids = sorted(f"src/rel{i:03d}" for i in range(n))
            index = {rid: rng.standard_normal(16) for rid in ids}
            query = ids[int(rng.integers(0, n))]
            got = top_k_candidates(query, index, k=20)
            brute = sorted(
                ((cosine(index[query], vec), rid) for rid, vec in index.items() if rid != query),
                key=lambda s: (-s[0], s[1]),
            )[:20]
            assert got.candidate_ids() == [rid for _, rid in brute], f"seed {seed}"

        embedder = HashedNgramEmbedder(dim=64)
        embed = embedder._vector
        for seed in range(100):
            rng = random.Random(1000 + seed)
            n = rng.randint(10, 200)
            pool = [
                Analogy(f"a{rng.randrange(999)}", f"b{i}", f"c{i}", f"d{rng.randrange(999)}",
                        SAME_RELATION, ("r",))
                for i in range(n)
            ]
            embedded = embed_analogies(pool, embed)
            query = (f"q{seed}", "mid", "tail")
            prompt = retrieve_topk_analogies(query, embedded, embed, k=8)
            qvec = embed(render_generation_query(*query))
            brute = sorted(
                ((cosine(qvec, vec), an.as_text(), an) for an, vec in embedded),
                key=lambda s: (-s[0], s[1]),
            )[: min(8, n)]
            assert list(prompt.exemplars) == [(a.a, a.b, a.c, a.d) for _, _, a in brute], f"seed {seed}"


def test_generation_metrics_hand_computed():
    with criterion("metrics match hand-computed 12-item fixture to 1e-9"):
        # gold ranks per item: 1,1,1,2,3,4,5,10,11(outside window),absent x3
        ranks = [1, 1, 1, 2, 3, 4, 5, 10, 11, None, None, None]
        preds, gold = [], []
        for i, rank in enumerate(ranks):
            depth = max(rank or 0, 11)
            outputs = [f"filler-{i}-{j}" for j in range(depth)]
            if rank is not None:
                outputs[rank - 1] = f"gold-{i}"
            preds.append(RankedPrediction(str(i), tuple(outputs)))
            gold.append(f"gold-{i}")

        expected_mrr = (3 * 1.0 + 1 / 2 + 1 / 3 + 1 / 4 + 1 / 5 + 1 / 10) / 12
        assert mrr(preds, gold) == pytest.approx(expected_mrr, abs=1e-9)
        assert mrr(preds[4:5], gold[4:5]) == pytest.approx(1 / 3, abs=1e-9)  # rank 3
        assert mrr(preds[8:9], gold[8:9]) == 0.0  # rank 11 is outside the window
        assert hit_at_k(preds, gold, 1) == pytest.approx(3 / 12, abs=1e-9)
        assert hit_at_k(preds, gold, 10) == pytest.approx(8 / 12, abs=1e-9)
        assert recall_at_k(preds, gold, 5) == pytest.approx(7 / 12, abs=1e-9)
        first_choice = [0 if r == 1 else 1 for r in ranks]
        assert accuracy_metric(first_choice, [0] * 12) == pytest.approx(3 / 12, abs=1e-9)


def test_offset_baseline_planted_fixture():
    with criterion("offset baseline 10/10 on planted fixture; scale x7 invariant"):
        vectors = {}
        items = []
        rng = random.Random(42)
        for i in range(10):
            # planted diff direction per item, distractors point elsewhere
            angle = rng.uniform(0, 2 * math.pi)
            direction = np.array([math.cos(angle), math.sin(angle), 0.0])
            vectors[f"q{i}a"] = np.zeros(3)
            vectors[f"q{i}b"] = direction
            vectors[f"p{i}a"] = np.array([0.1, 0.2, 0.3])
            vectors[f"p{i}b"] = vectors[f"p{i}a"] + 2.0 * direction
            for j, off in enumerate(
                [np.array([0.0, 0.0, 1.0]), -direction, np.cross(direction, [0, 0, 1.0])]
            ):
                vectors[f"d{i}{j}a"] = np.zeros(3)
                vectors[f"d{i}{j}b"] = off
            answer = i % 4
            cands = [(f"d{i}{j}a", f"d{i}{j}b") for j in range(3)]
            cands.insert(answer, (f"p{i}a", f"p{i}b"))
            items.append(
                McqaItem((f"q{i}a", f"q{i}b"), tuple(cands), answer, SAME_RELATION, ("r",))
            )

        base = WordVectors(vectors)
        scaled = WordVectors({k: 7.0 * v for k, v in vectors.items()})
        for item in items:
            assert offset_predict(item, base) == item.answer_index
            assert offset_predict(item, scaled) == item.answer_index


def test_fleiss_kappa_values():
    with criterion("Fleiss kappa: perfect table = 1.0; 6-item table to 1e-9"):
        assert fleiss_kappa([["accept", "accept"]] * 10) == 1.0
        tables = [
            ["accept", "accept"],
            ["accept", "accept"],
            ["accept", "reject"],
            ["reject", "accept"],
            ["reject", "reject"],
            ["accept", "accept"],
        ]
        # P_bar = 2/3, p_accept = 8/12, Pe = 5/9, kappa = (1/9) / (4/9) = 0.25
        assert fleiss_kappa(tables) == pytest.approx(0.25, abs=1e-9)


def test_overlap_planted_count(fixture_kb):
    with criterion("both-tuples overlap rule finds exactly the planted items"):
        planted = [
            ExternalItem("Tim Cook", "Apple", "Joe Biden", "USA"),
            ExternalItem("up", "down", "high", "low"),
            ExternalItem("Joe Biden", "USA", "Emmanuel Macron", "France"),
        ]
        clean = [
            ExternalItem("Tim Cook", "Apple", "unicorn", "rainbow"),
            ExternalItem("France", "Paris", "Barack Obama", "Michelle Obama"),
            ExternalItem("not", "in", "the", "kb"),
        ]
        rate, overlapping = compute_overlap(fixture_kb, planted + clean)
        assert overlapping == planted
        assert rate == pytest.approx(len(planted) / (len(planted) + len(clean)), abs=1e-12)
