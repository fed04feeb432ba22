"""Per-entity precision/recall/F1 in micro, macro and main-entity settings."""

from dataclasses import dataclass, field

UNKNOWN_CLASS = "unknown"


def prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def score_sets(gold, predicted):
    """Per-entity counts: an extracted entity is correct iff it is in gold."""
    gold = set(gold)
    predicted = set(predicted)
    tp = len(gold & predicted)
    return tp, len(predicted) - tp, len(gold) - tp


@dataclass
class EvalReport:
    micro: tuple = (0.0, 0.0, 0.0)
    macro: tuple = (0.0, 0.0, 0.0)
    per_class: dict = field(default_factory=dict)   # class -> (P, R, F1)
    main: tuple | None = None
    counts: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "micro": dict(zip("precision recall f1".split(), self.micro)),
            "macro": dict(zip("precision recall f1".split(), self.macro)),
            "per_class": {k: dict(zip("precision recall f1".split(), v))
                          for k, v in sorted(self.per_class.items())},
            "counts": self.counts,
        }
        if self.main is not None:
            out["main_entity"] = dict(zip("precision recall f1".split(), self.main))
        return out

    def table(self):
        """Aligned plain-text table of all reported scores."""
        rows = [("micro", *self.micro), ("macro", *self.macro)]
        rows += [(name, *vals) for name, vals in sorted(self.per_class.items())]
        if self.main is not None:
            rows.append(("main entity", *self.main))
        name_w = max(len(r[0]) for r in rows)
        lines = ["%-*s  %9s %9s %9s" % (name_w, "", "P", "R", "F1")]
        for name, p, r, f in rows:
            lines.append("%-*s  %9.4f %9.4f %9.4f" % (name_w, name, p, r, f))
        return "\n".join(lines)


def _entity_class(kb, entity_id):
    if kb is not None and entity_id in kb.entities:
        return kb.entities[entity_id].entity_class or UNKNOWN_CLASS
    return UNKNOWN_CLASS


def micro_macro(pairs, kb=None):
    """Micro and macro scores over (question gold list, predicted id set) pairs.

    `pairs` holds (gold, predicted) where gold is a list of GoldEntity and
    predicted is a set of entity ids. Macro scores pool counts per entity
    class and average over the classes present in gold; predicted entities
    take their KB class, falling back to "unknown".
    """
    if not pairs:
        raise ValueError("nothing to evaluate")
    tp = fp = fn = 0
    class_counts = {}

    def bump(cls, kind, amount=1):
        cur = class_counts.setdefault(cls, [0, 0, 0])
        cur[kind] += amount

    gold_classes = set()
    for gold, predicted in pairs:
        gold_ids = {g.entity_id for g in gold}
        cls_of = {}
        for g in gold:
            cls_of[g.entity_id] = g.entity_class or _entity_class(kb, g.entity_id)
        q_tp, q_fp, q_fn = score_sets(gold_ids, predicted)
        tp += q_tp
        fp += q_fp
        fn += q_fn
        gold_classes.update(cls_of.values())
        for eid in gold_ids:
            if eid in predicted:
                bump(cls_of[eid], 0)
            else:
                bump(cls_of[eid], 2)
        for eid in predicted - gold_ids:
            bump(_entity_class(kb, eid), 1)

    per_class = {}
    for cls in sorted(gold_classes):
        c_tp, c_fp, c_fn = class_counts.get(cls, [0, 0, 0])
        per_class[cls] = prf(c_tp, c_fp, c_fn)
    n = len(per_class)
    macro = tuple(sum(v[i] for v in per_class.values()) / n for i in range(3)) if n else (0.0,) * 3
    report = EvalReport(micro=prf(tp, fp, fn), macro=macro, per_class=per_class)
    report.counts = {"questions": len(pairs), "tp": tp, "fp": fp, "fn": fn}
    return report


def spans_overlap(a, b):
    """At least one shared character between two half-open intervals."""
    return a[0] < b[1] and b[0] < a[1]


def main_entity_eval(questions, results):
    """Scores for the single main entity of each question.

    A predicted mention is the true positive iff its entity id equals the
    main entity and its character span overlaps the annotated span by at
    least one character; every other predicted mention counts against
    precision. Questions without a main-entity span are skipped and counted.
    """
    by_id = {r.question_id: r for r in results}
    tp = fp = fn = 0
    skipped = 0
    for q in questions:
        main = q.main_entity()
        if main is None or main.span is None:
            skipped += 1
            continue
        mentions = by_id[q.id].mentions if q.id in by_id else []
        matched = False
        for m in mentions:
            if (not matched and m.entity_id == main.entity_id
                    and spans_overlap(m.char_span, main.span)):
                matched = True
            else:
                fp += 1
        if matched:
            tp += 1
        else:
            fn += 1
    return prf(tp, fp, fn), skipped
