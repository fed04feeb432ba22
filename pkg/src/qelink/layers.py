"""Network building blocks: dense layers and stacked dilated convolutions.

Layers do not own their weights; every tensor lives in a flat name -> ndarray
dict so checkpoints and the optimizer see one namespace. Layer objects hold
names and shapes and build graph nodes from a dict of leaf tensors.
"""

import numpy as np

from . import autograd as ag


def glorot(rng, shape, fan_in):
    return rng.standard_normal(shape) / np.sqrt(max(1, fan_in))


class Dense:
    """Affine layer with an optional ReLU, y = act(W x + b)."""

    def __init__(self, name, d_in, d_out, activation="relu"):
        if activation not in ("relu", "linear"):
            raise ValueError("unknown activation %r" % activation)
        self.name = name
        self.d_in = d_in
        self.d_out = d_out
        self.activation = activation

    def init(self, store, rng):
        store[self.name + ".w"] = glorot(rng, (self.d_out, self.d_in), self.d_in)
        store[self.name + ".b"] = np.zeros(self.d_out)

    def param_names(self):
        return [self.name + ".w", self.name + ".b"]

    def __call__(self, leaves, x):
        y = ag.affine(leaves[self.name + ".w"], leaves[self.name + ".b"], x)
        return ag.relu(y) if self.activation == "relu" else y


def dense_forward(weights, bias, x, activation="linear"):
    """One-off dense evaluation on raw arrays (returns a graph node)."""
    y = ag.affine(weights, bias, x)
    return ag.relu(y) if activation == "relu" else y


class DcnnBlock:
    """Stack of width-3 convolutions with strictly increasing dilations.

    Each layer is ReLU-activated and keeps the sequence length ("same"
    zero padding). The outputs are averaged over the true positions and
    projected by a dense layer.
    """

    def __init__(self, name, d_in, channels, d_out, dilations=(1, 2, 4)):
        if list(dilations) != sorted(set(dilations)):
            raise ValueError("dilations must be strictly increasing")
        self.name = name
        self.d_in = d_in
        self.channels = channels
        self.dilations = tuple(dilations)
        self.projection = Dense(name + ".proj", channels, d_out, activation="linear")
        self.d_out = d_out

    def init(self, store, rng):
        c_in = self.d_in
        for i, _ in enumerate(self.dilations):
            store["%s.conv%d.w" % (self.name, i)] = glorot(
                rng, (3, c_in, self.channels), 3 * c_in)
            store["%s.conv%d.b" % (self.name, i)] = np.zeros(self.channels)
            c_in = self.channels
        self.projection.init(store, rng)

    def param_names(self):
        names = []
        for i, _ in enumerate(self.dilations):
            names += ["%s.conv%d.w" % (self.name, i), "%s.conv%d.b" % (self.name, i)]
        return names + self.projection.param_names()

    def __call__(self, leaves, x, n_true=None):
        """Encode a (T, d_in) sequence into a d_out vector.

        If the sequence carries padded rows past position n_true, the average
        is restricted to the true positions so padding cannot leak in.
        """
        if x.shape[0] < 1:
            raise ValueError("cannot encode an empty sequence")
        h = x
        for i, dilation in enumerate(self.dilations):
            h = ag.relu(ag.dilated_conv1d(
                leaves["%s.conv%d.w" % (self.name, i)],
                leaves["%s.conv%d.b" % (self.name, i)],
                h, dilation))
            # Padded rows would otherwise acquire relu(bias) and leak into
            # the next conv layer through its off-center taps.
            if n_true is not None and n_true < h.shape[0]:
                h = ag.zero_tail_rows(h, n_true)
        avg = ag.mean_rows(h, n_true)
        return self.projection(leaves, avg)


def max_pool_rows(rows):
    """Componentwise maximum of a nonempty list of vectors."""
    return ag.max_rows(rows)
