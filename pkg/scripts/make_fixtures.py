#!/usr/bin/env python3
"""Regenerate the committed desk-scale fixtures under tests/data/.

Outputs are deterministic; rerunning this script must be a no-op unless the
fixture definitions below change. The LLM transcript is produced by running
the real filter stage against a scripted backend and recording every
exchange, so replaying it covers exactly the prompts the pipeline emits.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from analogykit import kg_ingest, kb as kb_mod, linker, llm_filter  # noqa: E402

DATA = ROOT / "tests" / "data"
DATA.mkdir(parents=True, exist_ok=True)

EMBED_DIM = 256
CANDIDATE_K = 20


# ---------------------------------------------------------------------------
# ConceptNet fixture: 50 lines, exactly 12 kept (weight > 2.0, both endpoints
# English), one weight-2.0 boundary drop, a few malformed and non-English.

CN_KEPT = [
    ("Antonym", "up", "down", 3.5),
    ("Antonym", "high", "low", 3.2),
    ("Antonym", "hot", "cold", 3.0),
    ("Antonym", "left", "right", 2.8),
    ("Antonym", "big", "small", 2.6),
    ("Antonym", "fast", "slow", 2.4),
    ("IsA", "lion", "animal", 2.5),
    ("IsA", "apple", "fruit", 2.5),
    ("IsA", "rose", "flower", 2.2),
    ("IsA", "oak", "tree", 2.1),
    ("PartOf", "wheel", "car", 2.3),
    ("PartOf", "leaf", "tree", 2.2),
]

CN_LOW_WEIGHT = [
    ("Antonym", "wet", "dry", 2.0),  # boundary: "bigger than 2.0" is strict
    ("Antonym", "open", "closed", 1.9),
    ("Antonym", "light", "dark", 1.8),
    ("Antonym", "young", "old", 1.7),
    ("Antonym", "rich", "poor", 1.6),
    ("IsA", "sparrow", "bird", 1.5),
    ("IsA", "trout", "fish", 1.4),
    ("IsA", "maple", "tree", 1.3),
    ("IsA", "daisy", "flower", 1.2),
    ("IsA", "copper", "metal", 1.1),
    ("IsA", "wren", "bird", 1.0),
    ("IsA", "pine", "tree", 1.0),
    ("PartOf", "finger", "hand", 1.0),
    ("PartOf", "toe", "foot", 1.0),
    ("PartOf", "petal", "flower", 0.9),
    ("PartOf", "page", "book", 0.9),
    ("PartOf", "branch", "tree", 0.8),
    ("PartOf", "key", "keyboard", 0.8),
    ("PartOf", "button", "shirt", 0.7),
    ("PartOf", "lens", "camera", 0.7),
    ("HasA", "car", "engine", 0.6),
    ("HasA", "house", "roof", 0.6),
    ("HasA", "bird", "wing", 0.5),
    ("HasA", "tree", "bark", 0.5),
    ("HasA", "book", "cover", 0.5),
    ("HasA", "fish", "fin", 0.5),
    ("HasA", "dog", "tail", 0.5),
    ("HasA", "clock", "hand", 0.5),
    ("HasA", "shoe", "lace", 0.5),
    ("HasA", "door", "handle", 0.5),
]

CN_NON_ENGLISH = [
    ("/a/x", "/r/IsA", "/c/fr/lion", "/c/fr/animal", '{"weight": 4.0}'),
    ("/a/x", "/r/IsA", "/c/de/apfel", "/c/de/obst", '{"weight": 3.0}'),
    ("/a/x", "/r/Antonym", "/c/es/frio", "/c/es/caliente", '{"weight": 2.7}'),
    ("/a/x", "/r/IsA", "/c/en/cat", "/c/fr/animal", '{"weight": 2.9}'),
    ("/a/x", "/r/PartOf", "/c/ja/taiyo", "/c/ja/ginga", '{"weight": 2.5}'),
]

CN_MALFORMED = [
    "/a/broken\t/r/IsA\t/c/en/dog",  # too few columns
    '/a/x\t/r/IsA\t/c/en/cat\t/c/en/animal\t{"weight": "heavy"}',  # unparsable weight
    '/a/x\t/r/IsA\t/c/en/___\t/c/en/animal\t{"weight": 3.0}',  # empty concept
]


def cn_line(relation: str, start: str, end: str, weight: float) -> str:
    uri = f"/a/[/r/{relation}/,/c/en/{start}/,/c/en/{end}/]"
    return "\t".join(
        [uri, f"/r/{relation}", f"/c/en/{start}", f"/c/en/{end}", json.dumps({"weight": weight})]
    )


def write_conceptnet() -> Path:
    lines = [cn_line(*row) for row in CN_KEPT]
    lines += [cn_line(*row) for row in CN_LOW_WEIGHT]
    lines += ["\t".join(row) if isinstance(row, tuple) else row for row in CN_NON_ENGLISH + CN_MALFORMED]
    assert len(lines) == 50, len(lines)
    path = DATA / "conceptnet_fixture.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Wikidata slice: 13 relations, ~150 rows. Pageviews define popularity.

WD_ROWS = {
    "chief executive officer": [
        ("Tim Cook", "Apple", 900000),
        ("Satya Nadella", "Microsoft", 850000),
        ("Sundar Pichai", "Google", 800000),
        ("Andy Jassy", "Amazon", 600000),
        ("Mary Barra", "General Motors", 400000),
        ("Jane Fraser", "Citigroup", 250000),
        ("Lisa Su", "AMD", 240000),
        ("Pat Gelsinger", "Intel", 230000),
        ("Safra Catz", "Oracle", 210000),
        ("Shantanu Narayen", "Adobe", 200000),
        ("Arvind Krishna", "IBM", 190000),
        ("Chuck Robbins", "Cisco", 150000),
    ],
    "head of state": [
        ("Joe Biden", "USA", 950000),
        ("Emmanuel Macron", "France", 700000),
        ("Frank-Walter Steinmeier", "Germany", 300000),
        ("Sergio Mattarella", "Italy", 280000),
        ("Charles III", "United Kingdom", 650000),
        ("Andrzej Duda", "Poland", 260000),
        ("Katalin Novak", "Hungary", 150000),
        ("Alexander Van der Bellen", "Austria", 140000),
        ("Sauli Niinisto", "Finland", 130000),
        ("Halimah Yacob", "Singapore", 120000),
        ("Droupadi Murmu", "India", 340000),
        ("Luiz Inacio Lula da Silva", "Brazil", 520000),
    ],
    "head of government": [
        ("Rishi Sunak", "United Kingdom", 620000),
        ("Olaf Scholz", "Germany", 480000),
        ("Giorgia Meloni", "Italy", 450000),
        ("Justin Trudeau", "Canada", 560000),
        ("Fumio Kishida", "Japan", 420000),
        ("Anthony Albanese", "Australia", 380000),
        ("Pedro Sanchez", "Spain", 330000),
        ("Mark Rutte", "Netherlands", 270000),
        ("Narendra Modi", "India", 720000),
        ("Jacinda Ardern", "New Zealand", 310000),
        ("Mette Frederiksen", "Denmark", 160000),
        ("Leo Varadkar", "Ireland", 170000),
    ],
    "capital": [
        ("France", "Paris", 880000),
        ("Japan", "Tokyo", 860000),
        ("Italy", "Rome", 760000),
        ("Germany", "Berlin", 740000),
        ("Spain", "Madrid", 640000),
        ("Russia", "Moscow", 620000),
        ("Egypt", "Cairo", 430000),
        ("Canada", "Ottawa", 410000),
        ("Australia", "Canberra", 390000),
        ("Kenya", "Nairobi", 220000),
        ("Peru", "Lima", 210000),
        ("Norway", "Oslo", 230000),
    ],
    "currency": [
        ("Japan", "yen", 520000),
        ("United Kingdom", "pound sterling", 500000),
        ("USA", "United States dollar", 760000),
        ("Switzerland", "Swiss franc", 280000),
        ("India", "Indian rupee", 450000),
        ("Mexico", "Mexican peso", 260000),
        ("Sweden", "Swedish krona", 190000),
        ("South Korea", "South Korean won", 310000),
        ("Brazil", "Brazilian real", 290000),
        ("China", "renminbi", 540000),
        ("Turkey", "Turkish lira", 250000),
        ("Poland", "Polish zloty", 170000),
    ],
    "author": [
        ("Hamlet", "William Shakespeare", 830000),
        ("War and Peace", "Leo Tolstoy", 610000),
        ("Pride and Prejudice", "Jane Austen", 590000),
        ("Moby-Dick", "Herman Melville", 470000),
        ("Ulysses", "James Joyce", 360000),
        ("The Trial", "Franz Kafka", 340000),
        ("Don Quixote", "Miguel de Cervantes", 440000),
        ("Beloved", "Toni Morrison", 240000),
        ("The Great Gatsby", "F. Scott Fitzgerald", 530000),
        ("One Hundred Years of Solitude", "Gabriel Garcia Marquez", 410000),
        ("Mrs Dalloway", "Virginia Woolf", 230000),
        ("Invisible Man", "Ralph Ellison", 180000),
    ],
    "composer": [
        ("The Magic Flute", "Wolfgang Amadeus Mozart", 560000),
        ("Symphony No. 9", "Ludwig van Beethoven", 640000),
        ("The Rite of Spring", "Igor Stravinsky", 300000),
        ("Swan Lake", "Pyotr Ilyich Tchaikovsky", 480000),
        ("The Four Seasons", "Antonio Vivaldi", 420000),
        ("Carmen", "Georges Bizet", 330000),
        ("The Ring of the Nibelung", "Richard Wagner", 290000),
        ("Rhapsody in Blue", "George Gershwin", 270000),
        ("Clair de lune", "Claude Debussy", 350000),
        ("The Planets", "Gustav Holst", 210000),
        ("Requiem", "Giuseppe Verdi", 220000),
        ("Boléro", "Maurice Ravel", 260000),
    ],
    "lyrics by": [
        ("Yesterday", "Paul McCartney", 390000),
        ("Imagine", "John Lennon", 470000),
        ("Like a Rolling Stone", "Bob Dylan", 360000),
        ("Respect", "Otis Redding", 250000),
        ("Hallelujah", "Leonard Cohen", 380000),
        ("Purple Rain", "Prince", 320000),
        ("Thriller", "Rod Temperton", 300000),
        ("Bohemian Rhapsody", "Freddie Mercury", 520000),
        ("Hey Jude", "Paul McCartney", 410000),
        ("Blowin' in the Wind", "Bob Dylan", 270000),
    ],
    "discoverer": [
        ("penicillin", "Alexander Fleming", 450000),
        ("radium", "Marie Curie", 490000),
        ("oxygen", "Joseph Priestley", 260000),
        ("Neptune", "Johann Galle", 200000),
        ("X-rays", "Wilhelm Roentgen", 310000),
        ("electron", "J. J. Thomson", 280000),
        ("Pluto", "Clyde Tombaugh", 240000),
        ("insulin", "Frederick Banting", 230000),
        ("DNA structure", "Francis Crick", 330000),
        ("radioactivity", "Henri Becquerel", 220000),
    ],
    "inventor": [
        ("telephone", "Alexander Graham Bell", 480000),
        ("light bulb", "Thomas Edison", 540000),
        ("printing press", "Johannes Gutenberg", 430000),
        ("dynamite", "Alfred Nobel", 320000),
        ("World Wide Web", "Tim Berners-Lee", 500000),
        ("airplane", "Wright brothers", 460000),
        ("telegraph", "Samuel Morse", 250000),
        ("radio", "Guglielmo Marconi", 270000),
        ("sewing machine", "Elias Howe", 150000),
        ("saxophone", "Adolphe Sax", 160000),
    ],
    "director": [
        ("Jaws", "Steven Spielberg", 520000),
        ("Pulp Fiction", "Quentin Tarantino", 500000),
        ("Vertigo", "Alfred Hitchcock", 380000),
        ("Seven Samurai", "Akira Kurosawa", 340000),
        ("2001: A Space Odyssey", "Stanley Kubrick", 420000),
        ("The Godfather", "Francis Ford Coppola", 540000),
        ("Inception", "Christopher Nolan", 560000),
        ("Parasite", "Bong Joon-ho", 460000),
        ("Roma", "Alfonso Cuaron", 230000),
        ("Amelie", "Jean-Pierre Jeunet", 240000),
    ],
    "spouse": [
        ("Barack Obama", "Michelle Obama", 700000),
        ("John Lennon", "Yoko Ono", 380000),
        ("Marie Curie", "Pierre Curie", 330000),
        ("Beyonce", "Jay-Z", 520000),
        ("Victoria Beckham", "David Beckham", 340000),
        ("Frida Kahlo", "Diego Rivera", 310000),
        ("Bill Gates", "Melinda French Gates", 300000),
        ("Queen Victoria", "Prince Albert", 290000),
        ("Johnny Cash", "June Carter Cash", 220000),
        ("Percy Shelley", "Mary Shelley", 210000),
    ],
    "located in": [
        ("Eiffel Tower", "Paris", 690000),
        ("Statue of Liberty", "New York City", 660000),
        ("Colosseum", "Rome", 610000),
        ("Big Ben", "London", 580000),
        ("Taj Mahal", "Agra", 570000),
        ("Machu Picchu", "Peru", 460000),
        ("Great Wall", "China", 640000),
        ("Sydney Opera House", "Sydney", 430000),
        ("Red Square", "Moscow", 320000),
        ("Christ the Redeemer", "Rio de Janeiro", 410000),
    ],
}


def write_wikidata() -> Path:
    lines = ["subject\tproperty\tobject\tpageviews"]
    for prop, rows in WD_ROWS.items():
        for subj, obj, views in rows:
            lines.append(f"{subj}\t{prop}\t{obj}\t{views}")
    path = DATA / "wikidata_fixture.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Scripted LLM behaviour. Selection answers are keyed by query label; meta
# answers by the unordered label pair. The filter stage decides which prompts
# are actually issued; everything it asks is recorded into the transcript.

SELECTIONS = {
    # mutual pairs (survive Rule 1); "operator" is a deliberate non-candidate
    # token the parser must drop
    "chief executive officer": "head of state, head of government, operator",
    "head of state": "chief executive officer, head of government",
    "head of government": "chief executive officer, head of state",
    "author": "composer, lyrics by",
    "composer": "author, lyrics by",  # composer->lyrics by is one-way
    "lyrics by": "author",
    "discoverer": "inventor",
    "inventor": "discoverer",
    "capital": "currency",
    "currency": "capital",
    # one-way only: dropped by Rule 1
    "director": "spouse",
}

METAS = {
    frozenset({"chief executive officer", "head of state"}): "head of organization",
    frozenset({"chief executive officer", "head of government"}): "head of organization",
    frozenset({"head of government", "head of state"}): "leader of",
    frozenset({"author", "composer"}): "created by",
    frozenset({"author", "lyrics by"}): "created by",
    frozenset({"discoverer", "inventor"}): "found by",
    # Rule 2 drop: the model cannot induce a shared meta relation
    frozenset({"capital", "currency"}): "None",
}


class ScriptedBackend:
    """Answers selection/meta prompts from the tables above."""

    def complete(self, prompt: str) -> str:
        if prompt.startswith(llm_filter.SELECTION_TASK):
            query = prompt.rsplit("Given relation: ", 1)[1].split("\n", 1)[0]
            return SELECTIONS.get(query, "None")
        if prompt.startswith(llm_filter.META_TASK):
            tail = prompt.rsplit("The relation [", 1)[1]
            a = tail.split("]", 1)[0]
            b = tail.split("the relation [", 1)[1].split("]", 1)[0]
            return METAS.get(frozenset({a, b}), "None")
        raise AssertionError(f"unexpected prompt: {prompt[:80]}")


def build_pipeline_inputs():
    cn_triples, _ = kg_ingest.parse_conceptnet(DATA / "conceptnet_fixture.tsv")
    wd_triples, _ = kg_ingest.parse_wikidata(DATA / "wikidata_fixture.tsv")
    triples = cn_triples + wd_triples
    ids = sorted({kb_mod.relation_id(t.relation_label, t.source) for t in triples})
    labels = {rid: rid.split("/", 1)[1] for rid in ids}
    provider = linker.HashedNgramEmbedder(dim=EMBED_DIM)
    vectors = linker.embed_relations(list(labels.values()), provider)
    index = {rid: vectors[labels[rid]] for rid in ids}
    sets = [linker.top_k_candidates(rid, index, k=CANDIDATE_K) for rid in ids]
    return triples, sets, labels


def write_transcript_and_golden() -> None:
    _, sets, labels = build_pipeline_inputs()
    transcript = DATA / "transcript.jsonl"
    if transcript.exists():
        transcript.unlink()
    backend = llm_filter.RecordingBackend(ScriptedBackend(), transcript, model="scripted-fixture")
    funnel, _, _ = llm_filter.run_filter_stage(sets, backend, labels=labels)
    llm_filter.write_pending_pairs(funnel.after_rule2, DATA / "golden_pending_pairs.jsonl")
    # timestamps would churn the committed transcript on regeneration
    records = []
    for line in transcript.read_text(encoding="utf-8").splitlines():
        rec = json.loads(line)
        rec["timestamp"] = "1970-01-01T00:00:00Z"
        records.append(rec)
    transcript.write_text(
        "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records), encoding="utf-8"
    )
    print("funnel:", funnel.counts())
    print("pending pairs:", [p.key() for p in funnel.after_rule2])


def write_golden_embeddings() -> None:
    labels = ["antonym", "chief executive officer", "capital", "author", "located in"]
    provider = linker.HashedNgramEmbedder(dim=EMBED_DIM)
    vectors = provider.embed(labels)
    out = {label: vectors[label].tolist() for label in labels}
    (DATA / "golden_embeddings.json").write_text(
        json.dumps(out, indent=1) + "\n", encoding="utf-8"
    )


if __name__ == "__main__":
    write_conceptnet()
    write_wikidata()
    write_transcript_and_golden()
    write_golden_embeddings()
    print("fixtures written to", DATA)
