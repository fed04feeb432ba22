"""Knowledge base store: entity records, relation triples and a label token index.

The KB is loaded once from TSV files, validated, and is immutable afterwards.
Lookups answer "which entities contain these tokens contiguously in their label".
"""

import json
from dataclasses import dataclass, field

from .text import tokens_of

SNAPSHOT_MAGIC = b"QEKB"
SNAPSHOT_VERSION = 1


class KbError(Exception):
    """Raised for malformed KB files or references to unknown ids."""


@dataclass
class EntityRecord:
    id: str
    label: str
    frequency: int
    entity_class: str | None = None

    def __post_init__(self):
        if not self.label:
            raise KbError("entity %r has an empty label" % self.id)
        if self.frequency < 0:
            raise KbError("entity %r has negative frequency" % self.id)


@dataclass
class KnowledgeBase:
    entities: dict = field(default_factory=dict)          # id -> EntityRecord
    triples: list = field(default_factory=list)           # (head, relation, tail)
    relation_labels: dict = field(default_factory=dict)   # relation id -> label
    label_index: dict = field(default_factory=dict)       # token -> set of entity ids
    # Derived caches, rebuilt on load.
    label_tokens: dict = field(default_factory=dict)      # id -> tuple of normalized tokens
    adjacency: dict = field(default_factory=dict)         # id -> list of (relation, other)

    def rebuild_index(self):
        """Rebuild the inverted label index and derived caches from raw fields."""
        self.label_index = {}
        self.label_tokens = {}
        for eid, rec in self.entities.items():
            toks = tuple(tokens_of(rec.label))
            self.label_tokens[eid] = toks
            for t in toks:
                self.label_index.setdefault(t, set()).add(eid)
        self.adjacency = {eid: [] for eid in self.entities}
        for head, rel, tail in self.triples:
            self.adjacency[head].append((rel, tail))
            if tail != head:
                self.adjacency[tail].append((rel, head))

    def validate(self):
        """Check referential integrity of triples; raise listing all offenders."""
        bad_entities = []
        bad_relations = []
        for head, rel, tail in self.triples:
            if head not in self.entities:
                bad_entities.append(head)
            if tail not in self.entities:
                bad_entities.append(tail)
            if rel not in self.relation_labels:
                bad_relations.append(rel)
        problems = []
        if bad_entities:
            problems.append("unknown entities: %s" % ", ".join(sorted(set(bad_entities))))
        if bad_relations:
            problems.append("unknown relations: %s" % ", ".join(sorted(set(bad_relations))))
        if problems:
            raise KbError("; ".join(problems))


def _parse_tsv(path, min_cols, max_cols):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if not (min_cols <= len(cols) <= max_cols):
                raise KbError("%s:%d: expected %d-%d tab-separated columns, got %d"
                              % (path, lineno, min_cols, max_cols, len(cols)))
            rows.append((lineno, cols))
    return rows


def load_kb(entities_path, triples_path, relation_labels_path):
    """Load a knowledge base from the three TSV files and build its index.

    entities: id<TAB>label<TAB>frequency[<TAB>class]
    triples: head<TAB>relation<TAB>tail
    relation labels: relation-id<TAB>label
    """
    kb = KnowledgeBase()
    for lineno, cols in _parse_tsv(entities_path, 3, 4):
        eid, label = cols[0], cols[1]
        try:
            freq = int(cols[2])
        except ValueError:
            raise KbError("%s:%d: frequency %r is not an integer" % (entities_path, lineno, cols[2]))
        cls = cols[3] if len(cols) == 4 and cols[3] else None
        if eid in kb.entities:
            raise KbError("%s:%d: duplicate entity id %r" % (entities_path, lineno, eid))
        try:
            kb.entities[eid] = EntityRecord(eid, label, freq, cls)
        except KbError as exc:
            raise KbError("%s:%d: %s" % (entities_path, lineno, exc))
    for lineno, cols in _parse_tsv(relation_labels_path, 2, 2):
        kb.relation_labels[cols[0]] = cols[1]
    for lineno, cols in _parse_tsv(triples_path, 3, 3):
        kb.triples.append((cols[0], cols[1], cols[2]))
    kb.validate()
    kb.rebuild_index()
    return kb


def lookup_by_tokens(kb, tokens):
    """Entity ids whose normalized label tokens contain `tokens` contiguously.

    Result order is unspecified (candidate generation imposes its own order).
    """
    tokens = list(tokens)
    if not tokens:
        raise ValueError("token query must be nonempty")
    # Intersect the per-token postings, then verify contiguity on the label.
    postings = kb.label_index.get(tokens[0], set())
    for t in tokens[1:]:
        postings = postings & kb.label_index.get(t, set())
        if not postings:
            return []
    if len(tokens) == 1:
        return list(postings)
    query = tuple(tokens)
    k = len(query)
    hits = []
    for eid in postings:
        label = kb.label_tokens[eid]
        if any(label[i:i + k] == query for i in range(len(label) - k + 1)):
            hits.append(eid)
    return hits


def neighbors(kb, entity_id):
    """Relations on the entity's triples and the entities at the other end.

    Both lists are deduplicated and ordered by first occurrence in the KB
    triple list (direction-agnostic: the entity may be head or tail).
    """
    if entity_id not in kb.entities:
        raise KbError("unknown entity %r" % entity_id)
    relations = []
    adjacent = []
    seen_r = set()
    seen_e = set()
    for rel, other in kb.adjacency[entity_id]:
        if rel not in seen_r:
            seen_r.add(rel)
            relations.append(rel)
        if other not in seen_e:
            seen_e.add(other)
            adjacent.append(other)
    return relations, adjacent


def save_kb(kb, path):
    """Persist the KB as a versioned snapshot (header + canonical JSON payload)."""
    payload = {
        "entities": [[r.id, r.label, r.frequency, r.entity_class]
                     for r in (kb.entities[k] for k in sorted(kb.entities))],
        "triples": kb.triples,
        "relation_labels": sorted(kb.relation_labels.items()),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(bytes([SNAPSHOT_VERSION]))
        fh.write(blob)


def load_kb_snapshot(path):
    """Load a KB snapshot written by save_kb and rebuild its index."""
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise KbError("%s: not a KB snapshot (bad magic)" % path)
        version = fh.read(1)
        if not version or version[0] != SNAPSHOT_VERSION:
            raise KbError("%s: unsupported snapshot version" % path)
        payload = json.loads(fh.read().decode("utf-8"))
    kb = KnowledgeBase()
    for eid, label, freq, cls in payload["entities"]:
        kb.entities[eid] = EntityRecord(eid, label, freq, cls)
    kb.triples = [tuple(t) for t in payload["triples"]]
    kb.relation_labels = dict(payload["relation_labels"])
    kb.validate()
    kb.rebuild_index()
    return kb
