"""Run configuration: hyperparameters, ablation switches and file paths."""

import dataclasses
import json
from dataclasses import dataclass


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    # Embedding and filter sizes (the published best configuration).
    d_w: int = 50              # word embedding size
    d_z: int = 25              # character embedding size
    d_e: int = 50              # entity embedding size
    d_r: int = 50              # relation embedding size
    d_p: int = 5               # position embedding size
    filters: int = 64          # conv output channels in both sequence encoders
    alpha: float = 0.5         # negative-class weight in the mention loss
    margin: float = 0.5        # hinge margin of the disambiguation loss
    threshold: float = 0.5     # mention probability cutoff at decoding time

    # Candidate handling.
    max_ngram_len: int = 4
    candidate_cap: int = 32    # candidates scored per n-gram (retrieval keeps 1000)
    negative_ratio: int = 5    # downsampled negatives per positive instance

    # Network shape knobs.
    dilations: tuple = (1, 2, 4)
    agg_dims: tuple = (128, 64)      # aggregation stack widths
    mention_dims: tuple = (64, 64)   # mention stack widths
    char_len_max: int = 50
    question_token_cap: int = 32

    # Training.
    lr: float = 1e-3
    epochs: int = 50
    seed: int = 13
    fine_tune_words: bool = True
    fine_tune_kg: bool = False
    loss_m_once: bool = False  # count the mention loss once per n-gram instead
                               # of once per candidate

    # Graph embedding training.
    kge_margin: float = 1.0
    kge_epochs: int = 200
    kge_lr: float = 0.01

    # Ablation switches.
    use_token: bool = True
    use_char: bool = True
    use_kb_structure: bool = True
    use_kb_lexical: bool = True

    # Paths (used by the command line driver; optional for library use).
    entities_path: str = ""
    triples_path: str = ""
    relation_labels_path: str = ""
    kb_path: str = ""
    kge_path: str = ""
    embeddings_path: str = ""
    train_path: str = ""
    dev_path: str = ""
    out_path: str = ""

    def __post_init__(self):
        self.dilations = tuple(self.dilations)
        self.agg_dims = tuple(self.agg_dims)
        self.mention_dims = tuple(self.mention_dims)
        for name in ("d_w", "d_z", "d_e", "d_r", "d_p", "filters"):
            if getattr(self, name) < 1:
                raise ConfigError("%s must be positive" % name)
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("threshold must be in (0, 1)")

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["dilations"] = list(self.dilations)
        d["agg_dims"] = list(self.agg_dims)
        d["mention_dims"] = list(self.mention_dims)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(unknown))
        return cls(**data)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("%s: %s" % (path, exc))
        if not isinstance(data, dict):
            raise ConfigError("%s: config must be a JSON object" % path)
        return cls.from_dict(data)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
