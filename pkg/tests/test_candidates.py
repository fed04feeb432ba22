import numpy as np
import pytest

from qelink.candidates import NGram, build_candidate_sets, extract_ngrams, retrieve_candidates
from qelink.text import tokenize
from tests.test_kb import make_kb


def test_single_token():
    out = extract_ngrams(tokenize("a"), 3)
    assert [g.tokens for g in out] == [("a",)]


def test_counting_formula_four_tokens_max_two():
    out = extract_ngrams(tokenize("w x y z"), 2)
    assert len(out) == 7  # 4 unigrams + 3 bigrams


def test_order_is_start_then_length():
    out = extract_ngrams(tokenize("a b c"), 2)
    assert [g.span for g in out] == [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]


def test_char_spans_cover_the_ngram():
    text = "what are taylor swift's albums"
    out = extract_ngrams(tokenize(text), 2)
    spans = {g.tokens: g.char_span for g in out}
    s, e = spans[("taylor", "swift")]
    assert text[s:e] == "taylor swift"


def test_gold_mentions_present_for_figure_question():
    grams = {g.tokens for g in extract_ngrams(tokenize("what are taylor swift's albums?"), 4)}
    assert ("taylor", "swift") in grams
    assert ("albums",) in grams


def test_empty_tokens_rejected():
    with pytest.raises(ValueError):
        extract_ngrams([], 2)


def _ngram(tokens):
    return NGram(tokens=tuple(tokens), span=(0, len(tokens)), char_span=(0, 1))


def test_retrieval_sorts_by_label_length():
    kb = make_kb([("Q76", "Barack Obama", 10, None), ("Q100", "Obama", 2, None)])
    out = retrieve_candidates(kb, _ngram(["obama"]))
    assert out.candidates == ["Q100", "Q76"]


def test_retrieval_empty_when_no_match():
    kb = make_kb([("Q1", "Something", 1, None)])
    assert retrieve_candidates(kb, _ngram(["missing"])).candidates == []


def test_retrieval_cutoff_keeps_1000_shortest():
    rows = [("Q%04d" % i, "shared %0*d" % (1 + i % 7, i), 1, None) for i in range(1500)]
    kb = make_kb(rows)
    out = retrieve_candidates(kb, _ngram(["shared"]))
    assert len(out.candidates) == 1000
    oracle = sorted(kb.entities, key=lambda e: (len(kb.entities[e].label), e))[:1000]
    assert out.candidates == oracle


def test_ties_break_on_entity_id():
    kb = make_kb([("Q2", "Iron Man", 1, None), ("Q1", "Iron Man", 1, None)])
    out = retrieve_candidates(kb, _ngram(["iron", "man"]))
    assert out.candidates == ["Q1", "Q2"]


def test_build_sets_drops_empty_ngrams():
    kb = make_kb([("Q462", "Taylor Swift", 5, None), ("Q2", "albums", 3, None)])
    out = build_candidate_sets(kb, tokenize("what are taylor swift's albums?"), 4)
    grams = {c.ngram.tokens for c in out}
    assert ("taylor", "swift") in grams
    assert ("albums",) in grams
    assert all(c.candidates for c in out)


def test_no_matches_anywhere_gives_empty_list():
    kb = make_kb([("Q1", "unrelated", 1, None)])
    assert build_candidate_sets(kb, tokenize("nothing here"), 3) == []


def test_build_sets_matches_bruteforce_on_random_kbs():
    rng = np.random.default_rng(11)
    vocab = ["red", "blue", "iron", "man", "city", "york"]
    for _ in range(20):
        rows = [("Q%d" % i, " ".join(rng.choice(vocab, size=rng.integers(1, 3))),
                 int(rng.integers(0, 9)), None) for i in range(rng.integers(2, 30))]
        kb = make_kb(rows)
        text = " ".join(rng.choice(vocab, size=rng.integers(1, 6)))
        toks = tokenize(text)
        got = build_candidate_sets(kb, toks, 3)
        brute = [retrieve_candidates(kb, g) for g in extract_ngrams(toks, 3)]
        brute = [b for b in brute if b.candidates]
        assert [(c.ngram, c.candidates) for c in got] == [(c.ngram, c.candidates) for c in brute]
        assert len(got) <= len(extract_ngrams(toks, 3))


def test_determinism():
    kb = make_kb([("Q1", "iron man", 1, None), ("Q2", "iron maiden", 1, None)])
    toks = tokenize("iron man vs iron maiden")
    a = build_candidate_sets(kb, toks, 3)
    b = build_candidate_sets(kb, toks, 3)
    assert [(c.ngram, c.candidates) for c in a] == [(c.ngram, c.candidates) for c in b]
