import numpy as np
import pytest

from qelink.kge import (KgEmbeddings, _init_embeddings, _sgd_step, load_kge, margin_eval,
                        rank_accuracy, save_kge, train_transe, transe_score)
from tests.test_kb import make_kb


def chain_kb(n=5):
    ents = [("E%d" % i, "entity %d" % i, 1, None) for i in range(n)]
    triples = [("E%d" % i, "next", "E%d" % (i + 1)) for i in range(n - 1)]
    return make_kb(ents, triples, [("next", "next")])


def test_score_zero_when_translation_exact():
    h = np.array([0.3, -0.2])
    r = np.array([0.1, 0.5])
    assert transe_score(h, r, h + r) == 0.0


def test_score_hand_norm():
    assert np.isclose(transe_score([1.0, 0.0], [0.0, 1.0], [0.0, 0.0]), np.sqrt(2))


def test_score_invariant_under_joint_rotation():
    rng = np.random.default_rng(0)
    h, r, t = rng.standard_normal((3, 3))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta), 0],
                    [np.sin(theta), np.cos(theta), 0],
                    [0, 0, 1.0]])
    assert np.isclose(transe_score(h, r, t), transe_score(rot @ h, rot @ r, rot @ t))


def test_score_dimension_mismatch():
    with pytest.raises(ValueError):
        transe_score([1.0], [1.0, 2.0], [1.0])


def test_empty_kb_rejected():
    kb = make_kb([("Q1", "A", 1, None)])
    with pytest.raises(ValueError):
        train_transe(kb, dim=4)


def test_single_triple_beats_all_corruptions_by_margin():
    kb = make_kb([("A", "a", 1, None), ("B", "b", 1, None), ("C", "c", 1, None)],
                 [("A", "r", "B")], [("r", "rel")])
    emb, _ = train_transe(kb, dim=8, margin=1.0, epochs=400, lr=0.05, seed=3)
    pos = transe_score(emb.entity_vector("A"), emb.relation_vector("r"), emb.entity_vector("B"))
    for corrupt in [("C", "r", "B"), ("B", "r", "B"), ("A", "r", "A"), ("A", "r", "C")]:
        neg = transe_score(emb.entity_vector(corrupt[0]), emb.relation_vector("r"),
                           emb.entity_vector(corrupt[2]))
        assert pos + 1.0 <= neg + 1e-9, corrupt


def test_disconnected_components_do_not_couple_in_one_step():
    kb = make_kb([("A1", "a1", 1, None), ("A2", "a2", 1, None),
                  ("B1", "b1", 1, None), ("B2", "b2", 1, None)],
                 [("A1", "r", "A2"), ("B1", "r", "B2")], [("r", "rel")])
    emb = _init_embeddings(kb, 6, np.random.default_rng(0))
    before = emb.entity_vecs.copy()
    # A step on the A-component triple, corrupted within the A component.
    _sgd_step(emb, ("A1", "r", "A2"), ("A2", "r", "A2"), lr=0.1, margin=1.0)
    b1 = emb.entity_row["B1"]
    b2 = emb.entity_row["B2"]
    assert np.array_equal(emb.entity_vecs[b1], before[b1])
    assert np.array_equal(emb.entity_vecs[b2], before[b2])


def test_chain_graph_rank_accuracy():
    # Margin 0.5: self-loop corruptions score ||r||, which a unit-sphere
    # embedding cannot push a full 1.0 above the true triples on this graph.
    kb = chain_kb()
    emb, _ = train_transe(kb, dim=8, margin=0.5, epochs=300, lr=0.02, seed=3)
    assert rank_accuracy(emb, kb) >= 0.95


def test_unit_norms_after_every_epoch():
    kb = chain_kb()
    norms_ok = []

    def hook(epoch, emb):
        norms = np.linalg.norm(emb.entity_vecs, axis=1)
        norms_ok.append(np.all(np.abs(norms - 1.0) < 1e-6))

    train_transe(kb, dim=8, epochs=30, lr=0.05, seed=1, epoch_hook=hook)
    assert len(norms_ok) == 30 and all(norms_ok)


def test_margin_eval_nonincreasing_on_chain():
    kb = chain_kb()
    losses = []

    def hook(epoch, emb):
        losses.append(margin_eval(emb, kb, margin=0.5))

    train_transe(kb, dim=16, margin=0.5, epochs=60, lr=0.02, seed=7, epoch_hook=hook)
    for prev, cur in zip(losses, losses[1:]):
        assert cur <= prev + 1e-6


def test_same_seed_bit_identical():
    kb = chain_kb()
    a, _ = train_transe(kb, dim=8, epochs=20, lr=0.05, seed=11)
    b, _ = train_transe(kb, dim=8, epochs=20, lr=0.05, seed=11)
    assert a.entity_vecs.tobytes() == b.entity_vecs.tobytes()
    assert a.relation_vecs.tobytes() == b.relation_vecs.tobytes()


def test_unknown_ids_map_to_zero_vectors():
    emb = KgEmbeddings(["A"], ["r"], np.ones((1, 4)), np.ones((1, 4)))
    assert np.array_equal(emb.entity_vector("missing"), np.zeros(4))
    assert np.array_equal(emb.relation_vector("missing"), np.zeros(4))


def test_save_load_round_trip(tmp_path):
    kb = chain_kb()
    emb, _ = train_transe(kb, dim=8, epochs=5, lr=0.05, seed=2)
    path = str(tmp_path / "kge.bin")
    save_kge(emb, path)
    loaded = load_kge(path)
    assert loaded.entity_ids == emb.entity_ids
    assert np.array_equal(loaded.entity_vecs, emb.entity_vecs)
    assert np.array_equal(loaded.relation_vecs, emb.relation_vecs)
