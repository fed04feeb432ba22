"""End-to-end gradient verification of the full scoring network.

Builds a deliberately small setup (3 candidate-bearing n-grams, at most 4
candidates each) and compares the analytic gradient of the composite loss
against central finite differences over every trainable tensor. Dimensions
are reduced because finite differences evaluate the loss twice per scalar
parameter; the arithmetic being checked is identical at any size.
"""

import dataclasses

import numpy as np

from .autograd import grad_check
from .config import RunConfig
from .data import AnnotatedQuestion, GoldEntity, build_fallback_vocabulary
from .kb import EntityRecord, KnowledgeBase
from .kge import train_transe
from .model import LinkerModel
from .training import make_training_instances, question_loss

CHECK_DIMS = dict(d_w=6, d_z=4, d_e=6, d_r=6, d_p=2, filters=5, dilations=(1, 2),
                  agg_dims=(8, 6), mention_dims=(6, 6), char_len_max=24,
                  candidate_cap=4)


def check_config(base=None, **overrides):
    base = base or RunConfig()
    values = dataclasses.asdict(base)
    values.update(CHECK_DIMS)
    values.update(overrides)
    return RunConfig.from_dict(values)


def build_check_setup(config=None, seed=5):
    """Tiny KB, one annotated question and a freshly initialized model."""
    config = config or check_config()
    kb = KnowledgeBase()
    for eid, label, freq in [("E1", "red fox", 9), ("E2", "fox", 7), ("E3", "red", 5),
                             ("E4", "lazy dog", 3), ("E5", "dog", 2)]:
        kb.entities[eid] = EntityRecord(eid, label, freq, None)
    kb.triples = [("E1", "P1", "E2"), ("E3", "P1", "E1"), ("E4", "P2", "E5")]
    kb.relation_labels = {"P1": "colour of", "P2": "kind of"}
    kb.validate()
    kb.rebuild_index()

    question = AnnotatedQuestion("check-0", "red fox jumps",
                                 [GoldEntity("E1", None, True, (0, 7))])
    kge, _ = train_transe(kb, dim=config.d_e, margin=0.5, epochs=20, lr=0.05, seed=seed)
    vocab, words = build_fallback_vocabulary([question], kb, config.d_w, seed)
    model = LinkerModel(config, kb, vocab, words, kge, seed=seed)
    rng = np.random.default_rng(seed)
    instances = make_training_instances(question, kb, config, rng)
    assert len(instances) == 3, "check fixture must yield exactly 3 n-grams"
    assert all(len(inst.candidates) <= 4 for inst in instances)
    return model, instances, config


def run_gradient_check(config=None, epsilon=1e-5, seed=5):
    """Max relative gradient error of the composite loss over trainable tensors."""
    model, instances, config = build_check_setup(config, seed)
    trainable = {name: model.params[name] for name in model.trainable_names()}
    frozen = {name: arr for name, arr in model.params.items() if name not in trainable}

    def loss_fn(leaves):
        from . import autograd as ag

        merged = dict(leaves)
        for name, arr in frozen.items():
            merged[name] = ag.constant(arr)
        return question_loss(model, merged, instances, config)

    return grad_check(loss_fn, trainable, epsilon)
