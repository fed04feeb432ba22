import numpy as np
import pytest

from qelink import autograd as ag
from qelink.autograd import constant, grad_check, leaf
from qelink.layers import DcnnBlock, Dense, dense_forward, max_pool_rows


def test_dense_forward_identity():
    y = dense_forward(np.eye(3), np.zeros(3), np.array([1.0, -2.0, 3.0]))
    assert np.allclose(y.values, [1, -2, 3])


def test_dense_forward_hand_value():
    y = dense_forward(np.array([[1.0, 2.0], [3.0, 4.0]]), np.zeros(2), np.array([1.0, 1.0]))
    assert np.allclose(y.values, [3, 7])


def test_dense_forward_relu():
    y = dense_forward(np.eye(2), np.zeros(2), np.array([-1.0, 2.0]), activation="relu")
    assert np.allclose(y.values, [0, 2])


def test_dense_rejects_unknown_activation():
    with pytest.raises(ValueError):
        Dense("d", 2, 2, activation="tanh")


def test_max_pool_rows_is_componentwise_max():
    out = max_pool_rows([constant([1.0, 5.0]), constant([3.0, 2.0])])
    assert np.allclose(out.values, [3, 5])


def _make_block(rng, d_in=3, channels=4, d_out=2, dilations=(1, 2)):
    block = DcnnBlock("blk", d_in, channels, d_out, dilations)
    store = {}
    block.init(store, rng)
    return block, store


def _straight_line_dcnn(store, x, dilations, n_true=None):
    """Independent re-implementation of the block arithmetic with plain numpy."""
    h = np.asarray(x, float)
    t_len = h.shape[0]
    for i, d in enumerate(dilations):
        k = store["blk.conv%d.w" % i]
        b = store["blk.conv%d.b" % i]
        out = np.zeros((t_len, k.shape[2]))
        for t in range(t_len):
            acc = b.copy()
            for tap, off in ((0, -d), (1, 0), (2, d)):
                src = t + off
                if 0 <= src < t_len:
                    acc = acc + h[src] @ k[tap]
            out[t] = acc
        h = np.maximum(out, 0.0)
        if n_true is not None:
            h[n_true:] = 0.0
    avg = h[:n_true].mean(axis=0) if n_true is not None else h.mean(axis=0)
    return store["blk.proj.w"] @ avg + store["blk.proj.b"]


def test_dcnn_matches_straight_line_oracle():
    rng = np.random.default_rng(42)
    block, store = _make_block(rng)
    x = rng.standard_normal((4, 3))
    got = block({k: constant(v) for k, v in store.items()}, constant(x)).values
    want = _straight_line_dcnn(store, x, block.dilations)
    assert np.allclose(got, want, atol=1e-12)


def test_dcnn_length_one_input():
    rng = np.random.default_rng(1)
    block, store = _make_block(rng)
    x = rng.standard_normal((1, 3))
    got = block({k: constant(v) for k, v in store.items()}, constant(x)).values
    assert got.shape == (2,)
    assert np.allclose(got, _straight_line_dcnn(store, x, block.dilations))


def test_dcnn_zero_input_zero_bias_gives_projection_bias():
    rng = np.random.default_rng(2)
    block, store = _make_block(rng)
    for name in list(store):
        if name.endswith(".b"):
            store[name] = np.zeros_like(store[name])
    got = block({k: constant(v) for k, v in store.items()}, constant(np.zeros((3, 3)))).values
    assert np.allclose(got, 0.0)


def test_dcnn_masked_average_ignores_appended_padding():
    rng = np.random.default_rng(9)
    block, store = _make_block(rng)
    leaves = {k: constant(v) for k, v in store.items()}
    x = rng.standard_normal((5, 3))
    plain = block(leaves, constant(x)).values
    padded = np.vstack([x, np.zeros((3, 3))])
    masked = block(leaves, constant(padded), n_true=5).values
    assert np.allclose(plain, masked, atol=1e-14)


def test_dcnn_empty_sequence_rejected():
    rng = np.random.default_rng(3)
    block, store = _make_block(rng)
    with pytest.raises(ValueError):
        block({k: constant(v) for k, v in store.items()}, constant(np.zeros((0, 3))))


def test_dcnn_requires_increasing_dilations():
    with pytest.raises(ValueError):
        DcnnBlock("b", 3, 4, 2, dilations=(2, 2))


def test_dcnn_gradients_pass_grad_check():
    rng = np.random.default_rng(12)
    block, store = _make_block(rng, d_in=2, channels=3, d_out=2)
    x = rng.standard_normal((4, 2))

    def f(lv):
        return ag.vsum(block(lv, constant(x)))

    assert grad_check(f, store) < 1e-4


def test_dense_layer_gradients_pass_grad_check():
    rng = np.random.default_rng(13)
    layer = Dense("d", 3, 2, activation="relu")
    store = {}
    layer.init(store, rng)
    x = rng.standard_normal(3)

    def f(lv):
        return ag.vsum(layer(lv, constant(x)))

    assert grad_check(f, store) < 1e-4
