"""Translation-based knowledge graph embeddings trained on the KB triples.

A triple (head, relation, tail) is scored by the L2 distance of head +
relation to tail; training pushes true triples below corrupted ones by a
margin. Entity rows are kept on the unit sphere throughout.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import load_tensors, save_tensors


@dataclass
class KgEmbeddings:
    entity_ids: list
    relation_ids: list
    entity_vecs: np.ndarray      # (n_entities, dim), unit L2 rows
    relation_vecs: np.ndarray    # (n_relations, dim)
    entity_row: dict = field(default_factory=dict)
    relation_row: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.entity_row:
            self.entity_row = {e: i for i, e in enumerate(self.entity_ids)}
        if not self.relation_row:
            self.relation_row = {r: i for i, r in enumerate(self.relation_ids)}

    @property
    def dim(self):
        return self.entity_vecs.shape[1]

    def entity_vector(self, entity_id):
        """Embedding row for an entity; zeros when the id is unknown."""
        row = self.entity_row.get(entity_id)
        return self.entity_vecs[row] if row is not None else np.zeros(self.dim)

    def relation_vector(self, relation_id):
        row = self.relation_row.get(relation_id)
        return self.relation_vecs[row] if row is not None else np.zeros(self.dim)


def transe_score(h, r, t):
    """Implausibility of a triple: ||h + r - t||_2 (lower is better)."""
    h = np.asarray(h, float)
    r = np.asarray(r, float)
    t = np.asarray(t, float)
    if not h.shape == r.shape == t.shape:
        raise ValueError("dimension mismatch: %s, %s, %s" % (h.shape, r.shape, t.shape))
    return float(np.linalg.norm(h + r - t))


def _init_embeddings(kb, dim, rng):
    entity_ids = sorted(kb.entities)
    relation_ids = sorted(kb.relation_labels)
    bound = 6.0 / np.sqrt(dim)
    ent = rng.uniform(-bound, bound, size=(len(entity_ids), dim))
    ent /= np.linalg.norm(ent, axis=1, keepdims=True)
    rel = rng.uniform(-bound, bound, size=(len(relation_ids), dim))
    rel /= np.linalg.norm(rel, axis=1, keepdims=True)
    return KgEmbeddings(entity_ids, relation_ids, ent, rel)


def _corrupt(triple, entity_ids, true_set, rng):
    """Replace head or tail uniformly; resample while the result is a true triple."""
    head, rel, tail = triple
    for _ in range(100):
        replace_head = rng.integers(0, 2) == 0
        other = entity_ids[rng.integers(0, len(entity_ids))]
        cand = (other, rel, tail) if replace_head else (head, rel, other)
        if cand not in true_set and cand != triple:
            return cand
    raise RuntimeError("could not sample a corrupted triple; KB too dense")


def _sgd_step(emb, triple, corrupted, lr, margin):
    """One hinge update on a (true, corrupted) pair; renormalizes touched entities."""
    e_row = emb.entity_row
    r_row = emb.relation_row
    h, r, t = triple
    h2, _, t2 = corrupted
    hv = emb.entity_vecs[e_row[h]]
    tv = emb.entity_vecs[e_row[t]]
    rv = emb.relation_vecs[r_row[r]]
    h2v = emb.entity_vecs[e_row[h2]]
    t2v = emb.entity_vecs[e_row[t2]]

    pos_diff = hv + rv - tv
    neg_diff = h2v + rv - t2v
    pos = np.linalg.norm(pos_diff)
    neg = np.linalg.norm(neg_diff)
    loss = margin + pos - neg
    if loss <= 0.0:
        return 0.0
    # d||x||/dx = x/||x||; zero-norm differences contribute no gradient.
    g_pos = pos_diff / pos if pos > 1e-12 else np.zeros_like(pos_diff)
    g_neg = neg_diff / neg if neg > 1e-12 else np.zeros_like(neg_diff)

    grads = {}
    for key, g in (((0, e_row[h]), g_pos), ((0, e_row[t]), -g_pos), ((1, r_row[r]), g_pos),
                   ((0, e_row[h2]), -g_neg), ((0, e_row[t2]), g_neg), ((1, r_row[r]), -g_neg)):
        grads[key] = grads.get(key, 0.0) + g
    for (kind, row), g in grads.items():
        mat = emb.entity_vecs if kind == 0 else emb.relation_vecs
        mat[row] -= lr * g
    for row in {e_row[h], e_row[t], e_row[h2], e_row[t2]}:
        norm = np.linalg.norm(emb.entity_vecs[row])
        if norm > 1e-12:
            emb.entity_vecs[row] /= norm
    return float(loss)


def train_transe(kb, dim=50, margin=1.0, epochs=200, lr=0.01, seed=13, epoch_hook=None):
    """Train embeddings on the KB triples; returns (embeddings, per-epoch loss).

    epoch_hook, when given, is called with (epoch_index, embeddings) after
    each epoch (useful for monitoring a fixed evaluation loss).
    """
    if not kb.triples:
        raise ValueError("cannot train graph embeddings on a KB without triples")
    if dim < 1:
        raise ValueError("embedding dimension must be >= 1")
    rng = np.random.default_rng(seed)
    emb = _init_embeddings(kb, dim, rng)
    triples = [tuple(t) for t in kb.triples]
    true_set = set(triples)
    trace = []
    for epoch in range(epochs):
        order = rng.permutation(len(triples))
        total = 0.0
        for idx in order:
            triple = triples[idx]
            corrupted = _corrupt(triple, emb.entity_ids, true_set, rng)
            total += _sgd_step(emb, triple, corrupted, lr, margin)
        trace.append(total / len(triples))
        if epoch_hook is not None:
            epoch_hook(epoch, emb)
    return emb, trace


def margin_eval(emb, kb, margin=1.0):
    """Average hinge over all (triple, corruption) pairs; deterministic."""
    true_set = {tuple(t) for t in kb.triples}
    total = 0.0
    count = 0
    for h, r, t in true_set:
        pos = transe_score(emb.entity_vector(h), emb.relation_vector(r), emb.entity_vector(t))
        for other in emb.entity_ids:
            for cand in ((other, r, t), (h, r, other)):
                if cand in true_set or cand == (h, r, t):
                    continue
                neg = transe_score(emb.entity_vector(cand[0]), emb.relation_vector(r),
                                   emb.entity_vector(cand[2]))
                total += max(0.0, margin + pos - neg)
                count += 1
    return total / max(1, count)


def rank_accuracy(emb, kb):
    """Fraction of (triple, corruption) pairs where the true triple scores lower."""
    true_set = {tuple(t) for t in kb.triples}
    wins = 0
    count = 0
    for h, r, t in true_set:
        pos = transe_score(emb.entity_vector(h), emb.relation_vector(r), emb.entity_vector(t))
        for other in emb.entity_ids:
            for cand in ((other, r, t), (h, r, other)):
                if cand in true_set or cand == (h, r, t):
                    continue
                neg = transe_score(emb.entity_vector(cand[0]), emb.relation_vector(r),
                                   emb.entity_vector(cand[2]))
                wins += pos < neg
                count += 1
    return wins / max(1, count)


def save_kge(emb, path):
    """Tensor checkpoint plus a JSON sidecar with the id-to-row maps."""
    save_tensors({"entities": emb.entity_vecs, "relations": emb.relation_vecs}, path)
    with open(path + ".ids.json", "w", encoding="utf-8") as fh:
        json.dump({"entity_ids": emb.entity_ids, "relation_ids": emb.relation_ids},
                  fh, sort_keys=True)


def load_kge(path):
    tensors = load_tensors(path)
    with open(path + ".ids.json", encoding="utf-8") as fh:
        ids = json.load(fh)
    return KgEmbeddings(ids["entity_ids"], ids["relation_ids"],
                        tensors["entities"], tensors["relations"])
