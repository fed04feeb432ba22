"""Annotated question data and word-vector files."""

import json
from dataclasses import dataclass, field

import numpy as np

from .text import tokenize, tokens_of


class DataError(Exception):
    pass


@dataclass
class GoldEntity:
    entity_id: str
    entity_class: str | None = None
    is_main: bool = False
    span: tuple | None = None   # half-open char interval of the mention, if known


@dataclass
class AnnotatedQuestion:
    id: str
    text: str
    gold: list
    tokens: list = field(default_factory=list)  # (token, char_start, char_end)

    def __post_init__(self):
        if not self.gold:
            raise DataError("question %r has no gold entities" % self.id)
        if sum(1 for g in self.gold if g.is_main) > 1:
            raise DataError("question %r has more than one main entity" % self.id)
        if not self.tokens:
            self.tokens = tokenize(self.text)

    def gold_ids(self):
        return {g.entity_id for g in self.gold}

    def main_entity(self):
        for g in self.gold:
            if g.is_main:
                return g
        return None


def load_questions(path):
    """Read a dataset of annotated questions from JSON lines."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError("%s:%d: %s" % (path, lineno, exc))
            try:
                gold = [GoldEntity(e["id"], e.get("class"), bool(e.get("main", False)),
                                   tuple(e["span"]) if e.get("span") else None)
                        for e in row["entities"]]
                out.append(AnnotatedQuestion(str(row["id"]), row["text"], gold))
            except (KeyError, DataError) as exc:
                raise DataError("%s:%d: %s" % (path, lineno, exc))
    return out


def save_questions(questions, path):
    with open(path, "w", encoding="utf-8") as fh:
        for q in questions:
            row = {"id": q.id, "text": q.text, "entities": []}
            for g in q.gold:
                ent = {"id": g.entity_id}
                if g.entity_class:
                    ent["class"] = g.entity_class
                if g.is_main:
                    ent["main"] = True
                if g.span:
                    ent["span"] = list(g.span)
                row["entities"].append(ent)
            fh.write(json.dumps(row, sort_keys=True) + "\n")


class Vocabulary:
    """Token-to-row map for the word embedding matrix; row 0 is the UNK token."""

    UNK = 0

    def __init__(self, tokens):
        self.tokens = ["<unk>"] + list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def row(self, token):
        return self.index.get(token, self.UNK)

    def rows(self, tokens):
        return [self.row(t) for t in tokens]


def load_word_vectors(path):
    """Read a text word-vector file: token then space-separated decimals.

    Returns (Vocabulary, matrix) with an all-zero UNK row prepended.
    """
    tokens = []
    vectors = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                raise DataError("%s:%d: expected token and vector" % (path, lineno))
            if dim is None:
                dim = len(parts) - 1
            elif len(parts) - 1 != dim:
                raise DataError("%s:%d: inconsistent vector size" % (path, lineno))
            tokens.append(parts[0])
            try:
                vectors.append([float(v) for v in parts[1:]])
            except ValueError:
                raise DataError("%s:%d: non-numeric vector component" % (path, lineno))
    if not tokens:
        raise DataError("%s: empty word-vector file" % path)
    vocab = Vocabulary(tokens)
    matrix = np.vstack([np.zeros((1, dim)), np.asarray(vectors, float)])
    return vocab, matrix


def save_word_vectors(vocab_tokens, matrix, path):
    with open(path, "w", encoding="utf-8") as fh:
        for token, row in zip(vocab_tokens, matrix):
            fh.write(token + " " + " ".join("%.6f" % v for v in row) + "\n")


def build_fallback_vocabulary(questions, kb, d_w, seed):
    """Vocabulary and random vectors from dataset tokens and relation labels.

    Used when no pretrained word-vector file is supplied.
    """
    tokens = set()
    for q in questions:
        tokens.update(t for t, _, _ in q.tokens)
    for label in kb.relation_labels.values():
        tokens.update(tokens_of(label))
    vocab = Vocabulary(sorted(tokens))
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((len(vocab), d_w)) * 0.1
    matrix[0] = 0.0
    return vocab, matrix
