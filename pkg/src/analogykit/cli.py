"""Pipeline orchestration. One subcommand per stage; stages hand off through
files so any stage can be rerun or tested in isolation."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import curation, dataset_gen, eval_harness, kb as kb_mod, kg_ingest, linker, llm_filter
from .config import PipelineConfig


def _require(path: str | Path, stage: str) -> Path:
    path = Path(path)
    if not path.exists():
        click.echo(f"error[{stage}]: missing predecessor artifact {path}", err=True)
        sys.exit(1)
    return path


def _emit(summary: dict) -> None:
    click.echo(json.dumps(summary, sort_keys=True))


def _config(config_path: str | None, out: str | None, seed: int | None) -> PipelineConfig:
    cfg = PipelineConfig.load(config_path)
    if out is not None:
        cfg.output_dir = out
    if seed is not None:
        cfg.seed = seed
    return cfg


@click.group()
def main():
    """Build and evaluate an analogy knowledge base from KG dump slices."""


@main.command()
@click.option("--conceptnet", type=click.Path(), default=None, help="ConceptNet assertion TSV (optionally .gz)")
@click.option("--wikidata", type=click.Path(), default=None, help="Wikidata slice TSV (optionally .gz)")
@click.option("--language", default="en", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def ingest(conceptnet, wikidata, language, config_path, out):
    """Parse KG dumps into a canonical triples file."""
    cfg = _config(config_path, out, None)
    conceptnet = conceptnet or cfg.conceptnet_path
    wikidata = wikidata or cfg.wikidata_path
    if not conceptnet and not wikidata:
        click.echo("error[ingest]: need --conceptnet and/or --wikidata", err=True)
        sys.exit(1)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.snapshot(out_dir)

    triples = []
    reports = {}
    if conceptnet:
        t, rep = kg_ingest.parse_conceptnet(
            _require(conceptnet, "ingest"), language_filter=language, weight_threshold=cfg.weight_threshold
        )
        triples.extend(t)
        reports["conceptnet"] = rep.to_dict()
    if wikidata:
        t, rep = kg_ingest.parse_wikidata(_require(wikidata, "ingest"))
        triples.extend(t)
        reports["wikidata"] = rep.to_dict()
    kg_ingest.write_triples(triples, out_dir / "triples.jsonl")
    _emit({"stage": "ingest", "triples": len(triples), "reports": reports})


@main.command()
@click.option("--triples", type=click.Path(), required=True)
@click.option("--k", type=int, default=None, help="candidates per relation")
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def link(triples, k, cache_dir, config_path, out):
    """Embed relation labels and emit top-k candidate sets per relation."""
    cfg = _config(config_path, out, None)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.snapshot(out_dir)
    k = k or cfg.candidate_k

    all_triples = kg_ingest.read_triples(_require(triples, "link"))
    ids = sorted({kb_mod.relation_id(t.relation_label, t.source) for t in all_triples})
    provider = linker.HashedNgramEmbedder(dim=cfg.embedding_dim)
    cache = linker.EmbeddingCache(cache_dir) if cache_dir else None
    # embed the surface label, not the source-prefixed id
    labels = {rid: rid.split("/", 1)[1] for rid in ids}
    vectors_by_label = linker.embed_relations(list(labels.values()), provider, cache)
    index = {rid: vectors_by_label[labels[rid]] for rid in ids}
    sets = [linker.top_k_candidates(rid, index, k=k) for rid in ids] if len(ids) > 1 else []
    linker.write_candidate_sets(sets, out_dir / "candidates.jsonl")
    _emit({"stage": "link", "relations": len(ids), "candidate_sets": len(sets), "k": k})


def _make_backend(cfg: PipelineConfig, transcript: str | None, record: str | None):
    kind = cfg.backend.get("kind", "replay")
    transcript = transcript or cfg.backend.get("transcript")
    if kind == "replay":
        if not transcript:
            click.echo("error[llm-filter]: replay backend needs --transcript", err=True)
            sys.exit(1)
        backend = llm_filter.ReplayBackend(_require(transcript, "llm-filter"))
    elif kind == "remote":
        backend = llm_filter.RemoteBackend(
            model=cfg.backend.get("model", ""),
            endpoint=cfg.backend.get("endpoint", ""),
            temperature=cfg.backend.get("temperature", 0.0),
        )
    else:
        click.echo(f"error[llm-filter]: unknown backend kind {kind}", err=True)
        sys.exit(1)
    if record:
        backend = llm_filter.RecordingBackend(backend, record, model=cfg.backend.get("model", kind))
    return backend


@main.command("llm-filter")
@click.option("--candidates", type=click.Path(), required=True)
@click.option("--transcript", type=click.Path(), default=None, help="replay transcript (JSONL)")
@click.option("--record", type=click.Path(), default=None, help="append live exchanges here")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def llm_filter_cmd(candidates, transcript, record, config_path, out):
    """Select analogous relations with the LLM backend and apply both rules."""
    cfg = _config(config_path, out, None)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.snapshot(out_dir)

    sets = linker.read_candidate_sets(_require(candidates, "llm-filter"))
    labels = {cs.query_relation: cs.query_relation.split("/", 1)[1] for cs in sets}
    backend = _make_backend(cfg, transcript, record)
    funnel, selections, _metas = llm_filter.run_filter_stage(sets, backend, labels=labels)
    llm_filter.write_pending_pairs(funnel.after_rule2, out_dir / "pending_pairs.jsonl")
    with open(out_dir / "selections.jsonl", "w", encoding="utf-8") as fh:
        for s in selections:
            fh.write(json.dumps(s.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    _emit({"stage": "llm-filter", "funnel": funnel.counts()})


@main.command("build-kb")
@click.option("--triples", type=click.Path(), required=True)
@click.option("--approved", type=click.Path(), default=None, help="approved analogous pairs (JSONL)")
@click.option("--approve-pending", is_flag=True, help="treat pending pairs in --approved as approved")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def build_kb_cmd(triples, approved, approve_pending, config_path, out):
    """Build the immutable KB directory from triples and approved pairs."""
    cfg = _config(config_path, out, None)
    out_dir = Path(cfg.output_dir)
    cfg.snapshot(out_dir)

    triples_path = _require(triples, "build-kb")
    all_triples = kg_ingest.read_triples(triples_path)
    pairs = []
    if approved:
        pairs = llm_filter.read_pairs(_require(approved, "build-kb"))
        if approve_pending:
            pairs = [
                kb_mod.AnalogousRelationPair(
                    p.rel_a, p.rel_b, p.meta_relation, p.provenance, kb_mod.STATUS_APPROVED
                )
                for p in pairs
            ]
        pairs = [p for p in pairs if p.status == kb_mod.STATUS_APPROVED]
    if not pairs:
        click.echo("warning[build-kb]: no approved analogous pairs; KB will only derive same-relation analogies", err=True)
    kb = kb_mod.build_kb(all_triples, pairs)
    kb = kb_mod.KB(kb.relations, kb.analogous_pairs, {"triples": kb_mod.file_sha256(triples_path)})
    kb_dir = out_dir / "kb"
    kb_mod.save_kb(kb, kb_dir)
    _emit({"stage": "build-kb", "kb_dir": str(kb_dir), "stats": kb_mod.kb_stats(kb)})


@main.command()
@click.option("--kb", "kb_dir", type=click.Path(), required=True)
def stats(kb_dir):
    """Print exact KB counts (analogy totals as closed-form sums)."""
    kb = kb_mod.load_kb(_require(kb_dir, "stats"))
    _emit({"stage": "stats", "stats": kb_mod.kb_stats(kb)})


@main.command("gen-data")
@click.option("--kb", "kb_dir", type=click.Path(), required=True)
@click.option("--n-same", type=int, default=100, show_default=True)
@click.option("--n-analogous", type=int, default=100, show_default=True)
@click.option("--n-generation", type=int, default=100, show_default=True)
@click.option("--exclude", "exclude_paths", type=click.Path(), multiple=True, help="external A:B::C:D test files to exclude")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def gen_data(kb_dir, n_same, n_analogous, n_generation, exclude_paths, seed, config_path, out):
    """Materialize MCQA and generation datasets from the KB."""
    cfg = _config(config_path, out, seed)
    out_dir = Path(cfg.output_dir)
    cfg.snapshot(out_dir)
    kb = kb_mod.load_kb(_require(kb_dir, "gen-data"))

    externals = []
    for path in exclude_paths:
        items, malformed = dataset_gen.load_external_items(_require(path, "gen-data"))
        if malformed:
            click.echo(f"warning[gen-data]: {malformed} malformed lines in {path}", err=True)
        externals.append(items)

    mcqa, mcqa_report = dataset_gen.make_recognition_dataset(kb, n_same, n_analogous, cfg.seed)
    gen, gen_report = dataset_gen.make_generation_dataset(kb, n_generation, cfg.seed)
    if externals:
        mcqa = dataset_gen.exclude_overlap(mcqa, externals)
        gen = dataset_gen.exclude_overlap(gen, externals)
    dataset_gen.write_jsonl(mcqa, out_dir / "recognition.jsonl")
    dataset_gen.write_jsonl(gen, out_dir / "generation.jsonl")
    _emit(
        {
            "stage": "gen-data",
            "recognition": {**mcqa_report.to_dict(), "after_exclusion": len(mcqa)},
            "generation": {**gen_report.to_dict(), "after_exclusion": len(gen)},
        }
    )


@main.command("eval")
@click.option("--predictions", type=click.Path(), required=True, help="JSONL {item_id, ranked_outputs}")
@click.option("--gold", type=click.Path(), required=True, help="generation dataset JSONL (targets)")
@click.option("--out", type=click.Path(), default=None)
def eval_cmd(predictions, gold, out):
    """Score ranked predictions against generation targets."""
    preds = eval_harness.read_predictions(_require(predictions, "eval"))
    targets = {}
    with open(_require(gold, "eval"), encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if line.strip():
                d = json.loads(line)
                targets[d.get("item_id", str(i))] = d["d"]
    gold_list = [targets.get(p.item_id, "") for p in preds]
    report = eval_harness.generation_report(preds, gold_list)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(eval_harness.format_report_table(report), err=True)
    _emit({"stage": "eval", "report": report})


@main.command()
@click.option("--kb", "kb_dir", type=click.Path(), required=True)
@click.option("--query", nargs=3, type=str, required=True, metavar="A B C")
@click.option("--k", type=int, default=None)
@click.option("--n-pool", type=int, default=500, show_default=True, help="analogies to index for retrieval")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def retrieve(kb_dir, query, k, n_pool, config_path):
    """Build a retrieval-augmented few-shot prompt for an A:B::C query."""
    cfg = _config(config_path, None, None)
    k = k if k is not None else cfg.retrieval_k
    kb = kb_mod.load_kb(_require(kb_dir, "retrieve"))
    pool = kb_mod.sample_analogies(kb, kb_mod.SAME_RELATION, n_pool // 2, seed=cfg.seed).analogies
    if kb.analogous_pairs:
        pool += kb_mod.sample_analogies(kb, kb_mod.ANALOGOUS_RELATIONS, n_pool // 2, seed=cfg.seed).analogies
    embedder = linker.HashedNgramEmbedder(dim=cfg.embedding_dim)
    embed = lambda text: embedder._vector(text)  # noqa: E731
    embedded = eval_harness.embed_analogies(pool, embed)
    prompt = eval_harness.retrieve_topk_analogies(tuple(query), embedded, embed, k=k)
    click.echo(prompt.rendered)


@main.command("curate-serve")
@click.option("--pending", type=click.Path(), required=True, help="pending pairs JSONL from llm-filter")
@click.option("--kb", "kb_dir", type=click.Path(), default=None)
@click.option("--candidates", type=click.Path(), default=None, help="candidate sets JSONL (gates add-pair)")
@click.option("--log", "log_path", type=click.Path(), required=True, help="append-only decision log")
@click.option("--static-dir", type=click.Path(), default=None, help="built review UI assets")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8712, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def curate_serve(pending, kb_dir, candidates, log_path, static_dir, host, port, config_path):
    """Serve the review queue JSON API (and the review UI when built)."""
    import uvicorn

    from .api import create_app

    cfg = _config(config_path, None, None)
    kb = kb_mod.load_kb(_require(kb_dir, "curate-serve")) if kb_dir else None
    cand_map = {}
    if candidates:
        for cs in linker.read_candidate_sets(_require(candidates, "curate-serve")):
            cand_map[cs.query_relation] = cs.candidate_ids()
    store = curation.ReviewStore(cfg.annotators, log_path=log_path, kb=kb, candidate_sets=cand_map)
    store.enqueue(llm_filter.read_pairs(_require(pending, "curate-serve")))
    app = create_app(store, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command("export-approved")
@click.option("--log", "log_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def export_approved(log_path, out, config_path):
    """Replay a decision log and write the approved pairs for build-kb."""
    cfg = _config(config_path, None, None)
    store = curation.ReviewStore(cfg.annotators, log_path=_require(log_path, "export-approved"))
    approved = store.export_approved()
    llm_filter.write_pending_pairs(approved, out)
    _emit({"stage": "export-approved", "approved": len(approved)})


if __name__ == "__main__":
    main()
