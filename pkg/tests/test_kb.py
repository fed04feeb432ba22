import itertools

import numpy as np
import pytest

from qelink.kb import (KbError, KnowledgeBase, EntityRecord, load_kb, load_kb_snapshot,
                       lookup_by_tokens, neighbors, save_kb)
from qelink.text import tokens_of


def write_kb_files(tmp_path, entities, triples, relations):
    ents = tmp_path / "entities.tsv"
    ents.write_text("".join("%s\n" % "\t".join(str(c) for c in row) for row in entities),
                    encoding="utf-8")
    trip = tmp_path / "triples.tsv"
    trip.write_text("".join("%s\t%s\t%s\n" % t for t in triples), encoding="utf-8")
    rel = tmp_path / "relations.tsv"
    rel.write_text("".join("%s\t%s\n" % r for r in relations), encoding="utf-8")
    return str(ents), str(trip), str(rel)


def make_kb(entities, triples=(), relations=()):
    kb = KnowledgeBase()
    for eid, label, freq, cls in entities:
        kb.entities[eid] = EntityRecord(eid, label, freq, cls)
    kb.triples = list(triples)
    kb.relation_labels = dict(relations)
    kb.validate()
    kb.rebuild_index()
    return kb


def test_load_single_entity_no_triples(tmp_path):
    paths = write_kb_files(tmp_path, [("Q1", "Thing", 5, "thing")], [], [("P1", "part of")])
    kb = load_kb(*paths)
    assert len(kb.entities) == 1 and kb.triples == []


def test_label_index_from_normalization_rule(tmp_path):
    paths = write_kb_files(tmp_path, [("Q462", "Taylor Swift", 8123, "person")], [],
                           [("P1", "performer")])
    kb = load_kb(*paths)
    assert kb.label_index["taylor"] == {"Q462"}
    assert kb.label_index["swift"] == {"Q462"}


def test_triple_with_unknown_entity_lists_offender(tmp_path):
    paths = write_kb_files(tmp_path, [("Q1", "A", 1, None)], [("Q1", "P1", "Q99")],
                           [("P1", "rel")])
    with pytest.raises(KbError, match="Q99"):
        load_kb(*paths)


def test_malformed_line_names_file_and_line(tmp_path):
    ents = tmp_path / "entities.tsv"
    ents.write_text("Q1\tA\t3\nQ2\n", encoding="utf-8")
    trip = tmp_path / "t.tsv"
    trip.write_text("", encoding="utf-8")
    rel = tmp_path / "r.tsv"
    rel.write_text("", encoding="utf-8")
    with pytest.raises(KbError, match=r"entities.tsv:2"):
        load_kb(str(ents), str(trip), str(rel))


def test_bad_frequency_raises(tmp_path):
    paths = write_kb_files(tmp_path, [("Q1", "A", "x", "")], [], [])
    with pytest.raises(KbError, match="frequency"):
        load_kb(*paths)


def test_lookup_unigram_matches_all_containing_labels():
    kb = make_kb([("Q76", "Barack Obama", 10, "person"),
                  ("Q13133", "Michelle Obama", 5, "person")])
    assert sorted(lookup_by_tokens(kb, ["obama"])) == ["Q13133", "Q76"]


def test_lookup_no_match_is_empty():
    kb = make_kb([("Q1", "Anything", 1, None)])
    assert lookup_by_tokens(kb, ["zzz"]) == []


def test_lookup_requires_contiguity():
    kb = make_kb([("Q1", "Iron Man", 1, None),
                  ("Q2", "Iron Maiden", 1, None),
                  ("Q3", "Man of Iron", 1, None)])
    assert lookup_by_tokens(kb, ["iron", "man"]) == ["Q1"]


def test_lookup_rejects_empty_query():
    kb = make_kb([("Q1", "A", 1, None)])
    with pytest.raises(ValueError):
        lookup_by_tokens(kb, [])


def test_neighbors_isolated_entity():
    kb = make_kb([("Q1", "A", 1, None)])
    assert neighbors(kb, "Q1") == ([], [])


def test_neighbors_enumerated_by_hand():
    kb = make_kb([("Q1", "A", 1, None), ("Q2", "B", 1, None), ("Q3", "C", 1, None)],
                 [("Q1", "P1", "Q2"), ("Q3", "P2", "Q1")],
                 [("P1", "r1"), ("P2", "r2")])
    rels, adj = neighbors(kb, "Q1")
    assert set(rels) == {"P1", "P2"} and set(adj) == {"Q2", "Q3"}


def test_neighbors_self_loop():
    kb = make_kb([("Q1", "A", 1, None)], [("Q1", "P1", "Q1")], [("P1", "r")])
    assert neighbors(kb, "Q1") == (["P1"], ["Q1"])


def test_neighbors_unknown_entity():
    kb = make_kb([("Q1", "A", 1, None)])
    with pytest.raises(KbError):
        neighbors(kb, "Q9")


def test_neighbors_symmetric_in_direction():
    kb = make_kb([("Q1", "A", 1, None), ("Q2", "B", 1, None)],
                 [("Q1", "P1", "Q2")], [("P1", "r")])
    assert neighbors(kb, "Q2") == (["P1"], ["Q1"])
    assert neighbors(kb, "Q1") == (["P1"], ["Q2"])


def _random_kb(rng, n_entities):
    vocab = ["alpha", "bravo", "india", "iron", "man", "new", "york", "x1", "zulu", "oscar"]
    rows = []
    for i in range(n_entities):
        k = rng.integers(1, 4)
        label = " ".join(rng.choice(vocab, size=k))
        rows.append(("Q%d" % i, label, int(rng.integers(0, 50)), None))
    return make_kb(rows), vocab


def _scan_oracle(kb, query):
    hits = []
    q = tuple(query)
    for eid in kb.entities:
        label = tuple(tokens_of(kb.entities[eid].label))
        if any(label[i:i + len(q)] == q for i in range(len(label) - len(q) + 1)):
            hits.append(eid)
    return sorted(hits)


def test_index_matches_linear_scan_on_random_kbs():
    rng = np.random.default_rng(7)
    for _ in range(25):
        kb, vocab = _random_kb(rng, int(rng.integers(5, 60)))
        for q in itertools.chain(((w,) for w in vocab),
                                 itertools.product(vocab, vocab)):
            assert sorted(lookup_by_tokens(kb, list(q))) == _scan_oracle(kb, q)


def test_snapshot_round_trip(tmp_path):
    kb = make_kb([("Q1", "Iron Man", 7, "product"), ("Q2", "Iron Maiden", 3, "organization")],
                 [("Q1", "P1", "Q2")], [("P1", "genre")])
    path = tmp_path / "kb.snap"
    save_kb(kb, str(path))
    kb2 = load_kb_snapshot(str(path))
    assert kb2.entities == kb.entities
    assert kb2.triples == kb.triples
    assert kb2.relation_labels == kb.relation_labels
    assert kb2.label_index == kb.label_index
    assert lookup_by_tokens(kb2, ["iron"]) == lookup_by_tokens(kb, ["iron"])


def test_snapshot_rejects_bad_magic(tmp_path):
    path = tmp_path / "junk"
    path.write_bytes(b"NOPE")
    with pytest.raises(KbError, match="magic"):
        load_kb_snapshot(str(path))
