"""Candidate generation: enumerate question n-grams and retrieve entity candidates."""

from dataclasses import dataclass, field

from .kb import lookup_by_tokens

RETRIEVAL_CUTOFF = 1000


@dataclass(frozen=True)
class NGram:
    tokens: tuple          # normalized question tokens covered by the n-gram
    span: tuple            # half-open [start, end) token interval
    char_span: tuple       # half-open character interval into the raw question


@dataclass
class CandidateList:
    ngram: NGram
    candidates: list = field(default_factory=list)  # entity ids, shortest label first


def extract_ngrams(tokens, max_len):
    """All contiguous n-grams of length 1..max_len in (start, length) order.

    `tokens` is a list of (token, char_start, char_end) triples as produced by
    text.tokenize.
    """
    if not tokens:
        raise ValueError("cannot extract n-grams from an empty token list")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    out = []
    n = len(tokens)
    for start in range(n):
        for length in range(1, min(max_len, n - start) + 1):
            end = start + length
            out.append(NGram(
                tokens=tuple(t for t, _, _ in tokens[start:end]),
                span=(start, end),
                char_span=(tokens[start][1], tokens[end - 1][2]),
            ))
    return out


def retrieve_candidates(kb, ngram):
    """Entity candidates for one n-gram: label matches sorted short-label-first.

    Sorting by label character length puts exact matches at the head of the
    list; ties break on entity id. The list is cut after RETRIEVAL_CUTOFF.
    """
    hits = lookup_by_tokens(kb, list(ngram.tokens))
    hits.sort(key=lambda eid: (len(kb.entities[eid].label), eid))
    return CandidateList(ngram=ngram, candidates=hits[:RETRIEVAL_CUTOFF])


def build_candidate_sets(kb, tokens, max_len):
    """One CandidateList per n-gram that matched at least one entity.

    N-grams with no candidates are dropped: they have nothing to link to and
    cannot influence any score.
    """
    out = []
    for ngram in extract_ngrams(tokens, max_len):
        clist = retrieve_candidates(kb, ngram)
        if clist.candidates:
            out.append(clist)
    return out
