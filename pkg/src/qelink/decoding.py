"""Mention thresholding and global non-overlapping assignment.

Thresholded n-grams are arranged into the non-overlapping subset with the
highest probability under an independent-Bernoulli reading of the mention
scores: kept mentions contribute log p, dropped ones log(1 - p). That
objective decomposes over token spans sorted by end index, so an exact
interval-scheduling dynamic program finds the optimum.
"""

import json
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .candidates import build_candidate_sets

_FAR = (math.inf, math.inf)


@dataclass
class ScoredMention:
    ngram: object
    mention_prob: float
    candidates: list
    scores: np.ndarray

    @property
    def best_candidate(self):
        # argmax takes the first maximum, so ties go to the shortest label.
        return self.candidates[int(np.argmax(self.scores))]


@dataclass
class LinkedMention:
    token_span: tuple
    char_span: tuple
    entity_id: str
    mention_prob: float


@dataclass
class LinkingResult:
    question_id: str
    mentions: list


def filter_mentions(scored, threshold=0.5):
    """Keep mentions strictly above the probability threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    return [m for m in scored if m.mention_prob > threshold]


def _span_set_key(spans, width):
    """Sorted span tuple padded with sentinels for lexicographic comparison.

    Padding with +infinity makes the order consistent under appending a
    later span to both sides, which the dynamic program relies on.
    """
    spans = sorted(spans)
    return tuple(spans) + (_FAR,) * (width - len(spans))


def global_assignment(mentions):
    """Highest-probability pairwise non-overlapping subset of the mentions.

    Ties on probability prefer the lexicographically earliest span set.
    Returns the chosen mentions sorted by span start.
    """
    if not mentions:
        return []
    order = sorted(range(len(mentions)),
                   key=lambda i: (mentions[i].ngram.span[1], mentions[i].ngram.span[0]))
    spans = [mentions[i].ngram.span for i in order]
    ends = [s[1] for s in spans]
    width = len(mentions)
    # Taking a mention adds log p - log(1 - p) on top of the constant
    # sum of log(1 - p) over everything.
    weights = []
    for i in order:
        p = mentions[i].mention_prob
        if not 0.0 < p < 1.0:
            raise ValueError("mention probability %r outside (0, 1)" % p)
        weights.append(math.log(p) - math.log(1.0 - p))

    # best[k]: (score, chosen index tuple, span key) over the first k spans.
    best = [(0.0, (), _span_set_key((), width))]
    for k, (start, end) in enumerate(spans):
        skip = best[k]
        prev = best[bisect_right(ends, start, hi=k)]
        take_spans = tuple(spans[i] for i in prev[1]) + ((start, end),)
        take = (prev[0] + weights[k], prev[1] + (k,), _span_set_key(take_spans, width))
        if take[0] > skip[0] or (take[0] == skip[0] and take[2] < skip[2]):
            best.append(take)
        else:
            best.append(skip)
    chosen = [mentions[order[i]] for i in best[-1][1]]
    return sorted(chosen, key=lambda m: m.ngram.span)


def brute_force_assignment(mentions):
    """Reference implementation: enumerate every subset (exponential)."""
    if not mentions:
        return []
    n = len(mentions)
    width = n
    spans = [m.ngram.span for m in mentions]
    logits = [math.log(m.mention_prob) - math.log(1.0 - m.mention_prob) for m in mentions]
    best = None
    for mask in range(1 << n):
        chosen = [i for i in range(n) if mask >> i & 1]
        ok = all(not (spans[a][0] < spans[b][1] and spans[b][0] < spans[a][1])
                 for ai, a in enumerate(chosen) for b in chosen[ai + 1:])
        if not ok:
            continue
        score = sum(logits[i] for i in chosen)
        key = _span_set_key([spans[i] for i in chosen], width)
        if best is None or score > best[0] or (score == best[0] and key < best[1]):
            best = (score, key, chosen)
    return sorted((mentions[i] for i in best[2]), key=lambda m: m.ngram.span)


def link_question(kb, model, text, question_id="q"):
    """Full pipeline for one raw question: candidates, scoring, assignment."""
    from .text import tokenize

    if not text.strip():
        raise ValueError("empty question")
    config = model.config
    tokens = tokenize(text)[:config.question_token_cap]
    if not tokens:
        raise ValueError("question %r has no tokens" % text)
    clists = build_candidate_sets(kb, tokens, config.max_ngram_len)
    if not clists:
        return LinkingResult(question_id, [])
    scored = []
    for clist, (prob, scores) in zip(clists, model.score_question(tokens, clists)):
        scored.append(ScoredMention(clist.ngram, prob,
                                    clist.candidates[:config.candidate_cap], scores))
    kept = global_assignment(filter_mentions(scored, config.threshold))
    mentions = [LinkedMention(m.ngram.span, m.ngram.char_span, m.best_candidate,
                              m.mention_prob) for m in kept]
    return LinkingResult(question_id, mentions)


def result_to_json(result):
    return json.dumps({
        "id": result.question_id,
        "mentions": [{"tokens": list(m.token_span), "chars": list(m.char_span),
                      "entity": m.entity_id, "score": m.mention_prob}
                     for m in result.mentions],
    }, sort_keys=True)


def result_from_json(line):
    row = json.loads(line)
    return LinkingResult(str(row["id"]),
                         [LinkedMention(tuple(m["tokens"]), tuple(m["chars"]),
                                        m["entity"], float(m["score"]))
                          for m in row["mentions"]])
