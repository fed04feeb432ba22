"""Joint mention detection and entity disambiguation network.

For every question n-gram and its candidate list the model produces a
mention probability and one ranking score per candidate. Four context
components feed a shared aggregation stack:

  * token context: the whole question, word + span-position embeddings
    through a dilated-conv encoder;
  * character context: the mention string (one flanking token on each
    side) and, with the same encoder parameters, each candidate's label;
  * KB structure: pooled transformed embeddings of the candidate's
    relations and neighbor entities, plus the candidate's own embedding;
  * KB lexical: pooled word embeddings of the candidate's relation labels.

Per-candidate vectors are max-pooled into a summary vector so each score
sees the whole candidate set.
"""

import json

import numpy as np

from . import autograd as ag
from .checkpoint import load_tensors, save_tensors
from .config import RunConfig
from .data import Vocabulary
from .kb import neighbors
from .layers import DcnnBlock, Dense
from .text import tokens_of

POS_BEFORE, POS_INSIDE, POS_AFTER = 0, 1, 2

# Character vocabulary: printable ASCII plus a catch-all row at index 0.
CHAR_VOCAB_SIZE = 96


def char_row(ch):
    code = ord(ch)
    return code - 31 if 32 <= code <= 126 else 0


class LinkerModel:
    """Scoring network plus everything needed to run it against a KB."""

    def __init__(self, config, kb, vocab, word_matrix, kge=None, seed=None):
        if word_matrix.shape != (len(vocab), config.d_w):
            raise ValueError("word matrix shape %s does not match vocabulary %d x d_w %d"
                             % (word_matrix.shape, len(vocab), config.d_w))
        if kge is not None and kge.dim != config.d_e:
            raise ValueError("graph embedding size %d does not match d_e %d"
                             % (kge.dim, config.d_e))
        if config.use_kb_structure and kge is None:
            raise ValueError("KB structure component enabled but no graph embeddings given")
        self.config = config
        self.kb = kb
        self.vocab = vocab
        self.kge = kge
        rng = np.random.default_rng(config.seed if seed is None else seed)

        c = config
        self.token_dcnn = DcnnBlock("token_dcnn", c.d_w + c.d_p, c.filters, c.filters,
                                    c.dilations)
        self.char_dcnn = DcnnBlock("char_dcnn", c.d_z + c.d_p, c.filters, c.filters,
                                   c.dilations)
        self.rel_dense = Dense("rel_dense", c.d_r, c.d_r)
        self.ent_dense = Dense("ent_dense", c.d_e, c.d_e)
        self.rel_text_dense = Dense("rel_text_dense", c.d_w, c.d_w)

        agg_in = 3 * c.filters + c.d_r + 2 * c.d_e + c.d_w
        self.agg_stack = []
        for i, width in enumerate(c.agg_dims):
            self.agg_stack.append(Dense("agg%d" % i, agg_in, width))
            agg_in = width
        self.agg_out = agg_in
        mention_in = 2 * c.filters
        self.mention_stack = []
        for i, width in enumerate(c.mention_dims):
            self.mention_stack.append(Dense("mention%d" % i, mention_in, width))
            mention_in = width
        self.cand_head = Dense("cand_head", self.agg_out + self.agg_out, 1,
                               activation="linear")
        self.mention_head = Dense("mention_head", mention_in + self.agg_out, 1,
                                  activation="linear")

        self.params = {}
        self.params["words"] = np.array(word_matrix, dtype=float)
        self.params["word_pos"] = rng.standard_normal((3, c.d_p)) * 0.1
        self.params["chars"] = rng.standard_normal((CHAR_VOCAB_SIZE, c.d_z)) * 0.1
        self.params["char_pos"] = rng.standard_normal((c.char_len_max, c.d_p)) * 0.1
        if kge is not None:
            self.params["kg_entities"] = np.array(kge.entity_vecs, dtype=float)
            self.params["kg_relations"] = np.array(kge.relation_vecs, dtype=float)
        for layer in self._layers():
            layer.init(self.params, rng)

    def _layers(self):
        return ([self.token_dcnn, self.char_dcnn, self.rel_dense, self.ent_dense,
                 self.rel_text_dense] + self.agg_stack + self.mention_stack +
                [self.cand_head, self.mention_head])

    def trainable_names(self):
        frozen = set()
        if not self.config.fine_tune_words:
            frozen.add("words")
        if not self.config.fine_tune_kg:
            frozen.update(("kg_entities", "kg_relations"))
        return [n for n in self.params if n not in frozen]

    def make_leaves(self, for_training):
        """Wrap parameter arrays as graph nodes; frozen tensors become constants."""
        if not for_training:
            return {n: ag.constant(a) for n, a in self.params.items()}
        trainable = set(self.trainable_names())
        return {n: (ag.leaf(a) if n in trainable else ag.constant(a))
                for n, a in self.params.items()}

    # -- context components ------------------------------------------------

    def encode_token_context(self, leaves, tokens, span):
        """Question tokens with span-position marks through the token encoder."""
        if not tokens:
            raise ValueError("cannot encode an empty question")
        start, end = span
        if not (0 <= start < end <= len(tokens)):
            raise ValueError("span %s out of range for %d tokens" % ((start, end), len(tokens)))
        rows = self.vocab.rows([t for t, _, _ in tokens])
        pos = [POS_BEFORE if i < start else POS_INSIDE if i < end else POS_AFTER
               for i in range(len(tokens))]
        words = ag.gather_rows(leaves["words"], rows)
        marks = ag.gather_rows(leaves["word_pos"], pos)
        return self.token_dcnn(leaves, ag.hstack_cols(words, marks))

    def encode_chars(self, leaves, text):
        """Character-level encoding shared by mention strings and entity labels."""
        text = text[:self.config.char_len_max]
        if not text:
            raise ValueError("cannot encode an empty string")
        rows = [char_row(ch) for ch in text]
        chars = ag.gather_rows(leaves["chars"], rows)
        positions = ag.gather_rows(leaves["char_pos"], list(range(len(rows))))
        return self.char_dcnn(leaves, ag.hstack_cols(chars, positions))

    def encode_kb_structure(self, leaves, candidate, cache):
        """Pooled relation and neighbor-entity vectors plus the candidate's own."""
        relations, adjacent = neighbors(self.kb, candidate)
        rel_vecs = [self._relation_vec(leaves, r, cache) for r in relations]
        ent_vecs = [self._entity_vec(leaves, e, cache) for e in adjacent]
        zero_r = ag.constant(np.zeros(self.config.d_r))
        zero_e = ag.constant(np.zeros(self.config.d_e))
        pooled_r = ag.max_rows(rel_vecs) if rel_vecs else zero_r
        pooled_e = ag.max_rows(ent_vecs) if ent_vecs else zero_e
        own = self._entity_vec(leaves, candidate, cache)
        return pooled_r, pooled_e, own

    def _relation_vec(self, leaves, relation_id, cache):
        key = ("rel", relation_id)
        if key not in cache:
            row = self.kge.relation_row.get(relation_id)
            base = (ag.pick_row(leaves["kg_relations"], row) if row is not None
                    else ag.constant(np.zeros(self.config.d_r)))
            cache[key] = self.rel_dense(leaves, base)
        return cache[key]

    def _entity_vec(self, leaves, entity_id, cache):
        key = ("ent", entity_id)
        if key not in cache:
            row = self.kge.entity_row.get(entity_id)
            base = (ag.pick_row(leaves["kg_entities"], row) if row is not None
                    else ag.constant(np.zeros(self.config.d_e)))
            cache[key] = self.ent_dense(leaves, base)
        return cache[key]

    def encode_kb_lexical(self, leaves, candidate, cache):
        """Pooled word embeddings of the candidate's relation labels."""
        relations, _ = neighbors(self.kb, candidate)
        vecs = []
        for rel in relations:
            key = ("rel_text", rel)
            if key not in cache:
                toks = tokens_of(self.kb.relation_labels.get(rel, ""))
                if not toks:
                    cache[key] = None
                else:
                    emb = ag.gather_rows(leaves["words"], self.vocab.rows(toks))
                    pooled = ag.max_rows([ag.pick_row(emb, i) for i in range(len(toks))])
                    cache[key] = self.rel_text_dense(leaves, pooled)
            if cache[key] is not None:
                vecs.append(cache[key])
        if not vecs:
            return ag.constant(np.zeros(self.config.d_w))
        return ag.max_rows(vecs)

    def _label_string(self, entity_id):
        return " ".join(self.kb.label_tokens[entity_id])

    def _mention_string(self, tokens, span):
        start, end = span
        lo = max(0, start - 1)
        hi = min(len(tokens), end + 1)
        return " ".join(t for t, _, _ in tokens[lo:hi])

    # -- scoring -------------------------------------------------------------

    def forward(self, leaves, tokens, ngram, candidates, cache=None):
        """Mention probability and per-candidate ranking scores for one n-gram.

        Disabled components contribute zero vectors of their nominal size, so
        the aggregation input layout never changes.
        """
        if not candidates:
            raise ValueError("forward needs a nonempty candidate list")
        if cache is None:
            cache = {}
        c = self.config
        zero_f = ag.constant(np.zeros(c.filters))

        ctx_tokens = (self.encode_token_context(leaves, tokens, ngram.span)
                      if c.use_token else zero_f)
        mention_chars = (self.encode_chars(leaves, self._mention_string(tokens, ngram.span))
                         if c.use_char else zero_f)

        combined = []
        for cand in candidates:
            if c.use_char:
                key = ("label", cand)
                if key not in cache:
                    cache[key] = self.encode_chars(leaves, self._label_string(cand))
                label_chars = cache[key]
            else:
                label_chars = zero_f
            if c.use_kb_structure:
                pooled_r, pooled_e, own = self.encode_kb_structure(leaves, cand, cache)
            else:
                pooled_r = ag.constant(np.zeros(c.d_r))
                pooled_e = ag.constant(np.zeros(c.d_e))
                own = ag.constant(np.zeros(c.d_e))
            rel_text = (self.encode_kb_lexical(leaves, cand, cache)
                        if c.use_kb_lexical else ag.constant(np.zeros(c.d_w)))
            h = ag.concat([ctx_tokens, mention_chars, label_chars,
                           pooled_r, pooled_e, own, rel_text])
            for layer in self.agg_stack:
                h = layer(leaves, h)
            combined.append(h)

        summary = ag.max_rows(combined) if len(combined) > 1 else combined[0]
        scores = ag.concat([self.cand_head(leaves, ag.concat([h, summary]))
                            for h in combined])

        h = ag.concat([ctx_tokens, mention_chars])
        for layer in self.mention_stack:
            h = layer(leaves, h)
        logit = self.mention_head(leaves, ag.concat([h, summary]))
        mention_prob = ag.sigmoid(ag.pick(logit, 0))
        return mention_prob, scores

    def score_question(self, tokens, clists):
        """Inference over prebuilt candidate lists: [(p_n, scores array)]."""
        leaves = self.make_leaves(for_training=False)
        cache = {}
        out = []
        for clist in clists:
            cands = clist.candidates[:self.config.candidate_cap]
            prob, scores = self.forward(leaves, tokens, clist.ngram, cands, cache)
            out.append((float(prob.values), np.array(scores.values)))
        return out

    # -- persistence ---------------------------------------------------------

    def save(self, path):
        """Tensor checkpoint plus a JSON sidecar describing the run setup."""
        save_tensors(self.params, path)
        sidecar = {
            "config": self.config.to_dict(),
            "vocab": self.vocab.tokens[1:],  # UNK row is implicit
            "kge_entity_ids": self.kge.entity_ids if self.kge else None,
            "kge_relation_ids": self.kge.relation_ids if self.kge else None,
        }
        with open(path + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, sort_keys=True)

    @classmethod
    def load(cls, path, kb):
        from .kge import KgEmbeddings

        tensors = load_tensors(path)
        with open(path + ".meta.json", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        config = RunConfig.from_dict(sidecar["config"])
        vocab = Vocabulary(sidecar["vocab"])
        kge = None
        if sidecar["kge_entity_ids"] is not None:
            kge = KgEmbeddings(sidecar["kge_entity_ids"], sidecar["kge_relation_ids"],
                               tensors["kg_entities"], tensors["kg_relations"])
        model = cls(config, kb, vocab, tensors["words"], kge)
        for name, arr in tensors.items():
            if name not in model.params:
                raise ValueError("checkpoint tensor %r does not belong to this model" % name)
            if model.params[name].shape != arr.shape:
                raise ValueError("checkpoint tensor %r has shape %s, expected %s"
                                 % (name, arr.shape, model.params[name].shape))
            model.params[name] = arr
        return model


# -- loss pieces (shared by the full and the feature-based models) ------------


def mention_loss(target, prob, negative_weight):
    """Weighted binary cross-entropy on the mention probability.

    `prob` may be a float or a graph node; it is clamped away from 0 and 1
    before the logarithms.
    """
    p = ag.clip(prob, 1e-12, 1.0 - 1e-12)
    if target not in (0, 1):
        raise ValueError("mention target must be 0 or 1")
    if target == 1:
        return ag.scale(ag.log(p), -1.0)
    one_minus = ag.sub(ag.constant(1.0), p)
    return ag.scale(ag.log(one_minus), -negative_weight)


def disambiguation_loss(gold_index, scores, margin):
    """Mean hinge of the margin violations against the gold candidate.

    The gold-vs-itself term contributes the constant margin and no gradient.
    """
    n = scores.shape[0]
    if not 0 <= gold_index < n:
        raise IndexError("gold index %d out of range for %d candidates" % (gold_index, n))
    gold = ag.pick(scores, gold_index)
    violations = ag.hinge(ag.add_scalar(scores, ag.sub(ag.constant(margin), gold)))
    return ag.scale(ag.vsum(violations), 1.0 / n)


def composite_loss_terms(items, negative_weight, margin, m_once=False):
    """Total loss over one question's scored n-grams.

    `items` is a list of (mention_target, mention_prob, gold_index, scores,
    n_candidates). Following the objective as printed, the mention term is
    counted once per candidate unless m_once is set.
    """
    parts = []
    for target, prob, gold_index, scores, n_cands in items:
        m = mention_loss(target, prob, negative_weight)
        weight = 1.0 if m_once else float(n_cands)
        parts.append(ag.scale(m, weight))
        if target == 1:
            d = disambiguation_loss(gold_index, scores, margin)
            parts.append(ag.scale(d, weight))
    return ag.tsum(parts)
