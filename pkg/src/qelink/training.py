"""Training-label construction and the optimization loop."""

import logging
from dataclasses import dataclass

import numpy as np

from .autograd import Adam
from .candidates import build_candidate_sets
from .decoding import link_question
from .metrics import micro_macro, spans_overlap
from .model import composite_loss_terms

logger = logging.getLogger("qelink")


class TrainingError(Exception):
    pass


@dataclass
class TrainingInstance:
    question_id: str
    tokens: list                 # question tokens with offsets, capped
    ngram: object
    candidates: list             # capped candidate ids
    mention_target: int          # 1 iff this n-gram is a correct mention
    gold_index: int | None       # index of the gold candidate when target is 1


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_f1: float | None = None


def make_training_instances(question, kb, config, rng):
    """Labeled instances for one question; empty when no gold is linkable.

    An n-gram is a positive mention for a gold entity only if no strictly
    longer overlapping n-gram also carries that entity among its (capped)
    candidates, so each gold is taught at its maximal span. Negatives are
    downsampled to config.negative_ratio per positive.
    """
    tokens = question.tokens[:config.question_token_cap]
    clists = build_candidate_sets(kb, tokens, config.max_ngram_len)
    capped = [(c.ngram, c.candidates[:config.candidate_cap]) for c in clists]
    gold_ids = question.gold_ids()

    positives = []
    negatives = []
    for ngram, cands in capped:
        length = ngram.span[1] - ngram.span[0]
        eligible = []
        for gold in gold_ids:
            if gold not in cands:
                continue
            shadowed = any(
                other.span[1] - other.span[0] > length
                and spans_overlap(other.span, ngram.span)
                and gold in other_cands
                for other, other_cands in capped)
            if not shadowed:
                eligible.append(cands.index(gold))
        inst = TrainingInstance(question.id, tokens, ngram, cands, 0, None)
        if eligible:
            inst.mention_target = 1
            inst.gold_index = min(eligible)
            positives.append(inst)
        else:
            negatives.append(inst)

    if not positives:
        return []
    keep = min(len(negatives), config.negative_ratio * len(positives))
    if keep < len(negatives):
        chosen = sorted(rng.choice(len(negatives), size=keep, replace=False))
        negatives = [negatives[i] for i in chosen]
    out = positives + negatives
    out.sort(key=lambda inst: inst.ngram.span)
    return out


def question_loss(model, leaves, instances, config, cache=None):
    """Composite loss graph over one question's instances."""
    if cache is None:
        cache = {}
    items = []
    for inst in instances:
        prob, scores = model.forward(leaves, inst.tokens, inst.ngram,
                                     inst.candidates, cache)
        items.append((inst.mention_target, prob, inst.gold_index, scores,
                      len(inst.candidates)))
    return composite_loss_terms(items, config.alpha, config.margin, config.loss_m_once)


def predict_sets(model, kb, questions):
    """(gold, predicted id set) pairs by running the full linker per question."""
    pairs = []
    results = []
    for q in questions:
        result = link_question(kb, model, q.text, q.id)
        results.append(result)
        pairs.append((q.gold, {m.entity_id for m in result.mentions}))
    return pairs, results


def micro_f1(model, kb, questions):
    pairs, _ = predict_sets(model, kb, questions)
    return micro_macro(pairs, kb).micro[2]


def train(model, questions, config, dev=None, epoch_hook=None):
    """Optimize the model on the questions; returns (epoch stats, skipped count).

    Deterministic given config.seed. When a dev split is given the
    parameters giving the best dev micro F1 are restored at the end.
    epoch_hook(epoch, model) may return True to stop early.
    """
    rng = np.random.default_rng(config.seed)
    usable = []
    skipped = 0
    for q in questions:
        instances = make_training_instances(q, model.kb, config, rng)
        if instances:
            usable.append(instances)
        else:
            skipped += 1
    if skipped:
        logger.warning("skipped %d question(s) with no linkable gold entity", skipped)
    if not usable:
        raise TrainingError("no trainable questions (every gold entity unlinkable)")

    optimizer = Adam(config.lr)
    trainable = set(model.trainable_names())
    trace = []
    best = None
    for epoch in range(config.epochs):
        order = rng.permutation(len(usable))
        total = 0.0
        for qi in order:
            instances = usable[qi]
            leaves = model.make_leaves(for_training=True)
            loss = question_loss(model, leaves, instances, config)
            if not np.isfinite(loss.values):
                raise TrainingError("non-finite loss on question %r"
                                    % instances[0].question_id)
            loss.backward()
            grads = {name: leaves[name].grad for name in trainable
                     if leaves[name].grad is not None}
            optimizer.step(model.params, grads)
            total += loss.item()
        stats = EpochStats(epoch, total / len(usable))
        if dev is not None:
            stats.dev_f1 = micro_f1(model, model.kb, dev)
            if best is None or stats.dev_f1 > best[0]:
                best = (stats.dev_f1, {n: a.copy() for n, a in model.params.items()})
        trace.append(stats)
        if epoch_hook is not None and epoch_hook(epoch, model):
            break
    if best is not None:
        for name, arr in best[1].items():
            model.params[name] = arr
    return trace, skipped
