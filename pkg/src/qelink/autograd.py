"""Minimal reverse-mode autodiff over float64 numpy arrays.

Only the operations the scoring network needs are provided: affine layers,
width-3 dilated 1-d convolutions, ReLU/sigmoid, pooling, concatenation,
embedding-row gathers and the hinge/log pieces of the losses. Graphs are
built per forward pass; backward() walks the tape once.
"""

import numpy as np


class Tensor:
    """A value in the computation graph.

    `parents` holds (tensor, grad_fn) pairs where grad_fn maps the upstream
    gradient to this parent's gradient contribution.
    """

    __slots__ = ("values", "grad", "parents", "requires_grad")

    def __init__(self, values, parents=(), requires_grad=False):
        self.values = np.asarray(values, dtype=np.float64)
        self.parents = tuple(parents)
        self.requires_grad = requires_grad or any(p.requires_grad for p, _ in parents)
        self.grad = None

    @property
    def shape(self):
        return self.values.shape

    def item(self):
        return float(self.values)

    def backward(self):
        """Accumulate gradients of this scalar into every requires_grad node."""
        if self.values.shape != ():
            raise ValueError("backward() requires a scalar, got shape %s" % (self.values.shape,))
        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent, _ in node.parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones(())
        for node in reversed(order):
            if node.grad is None:
                continue
            for parent, grad_fn in node.parents:
                if not parent.requires_grad:
                    continue
                contrib = grad_fn(node.grad)
                if parent.grad is None:
                    parent.grad = np.zeros_like(parent.values)
                parent.grad = parent.grad + contrib


def constant(values):
    return Tensor(values)


def leaf(values):
    """A trainable leaf sharing storage with `values`."""
    return Tensor(values, requires_grad=True)


def _t(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def add(a, b):
    a, b = _t(a), _t(b)
    if a.shape != b.shape:
        raise ValueError("add: shape mismatch %s vs %s" % (a.shape, b.shape))
    return Tensor(a.values + b.values, [(a, lambda g: g), (b, lambda g: g)])


def sub(a, b):
    a, b = _t(a), _t(b)
    if a.shape != b.shape:
        raise ValueError("sub: shape mismatch %s vs %s" % (a.shape, b.shape))
    return Tensor(a.values - b.values, [(a, lambda g: g), (b, lambda g: -g)])


def mul(a, b):
    a, b = _t(a), _t(b)
    if a.shape != b.shape:
        raise ValueError("mul: shape mismatch %s vs %s" % (a.shape, b.shape))
    return Tensor(a.values * b.values,
                  [(a, lambda g: g * b.values), (b, lambda g: g * a.values)])


def scale(a, s):
    a = _t(a)
    s = float(s)
    return Tensor(a.values * s, [(a, lambda g: g * s)])


def matvec(w, x):
    """w (m,n) @ x (n,) -> (m,)."""
    w, x = _t(w), _t(x)
    if w.values.ndim != 2 or x.values.ndim != 1 or w.shape[1] != x.shape[0]:
        raise ValueError("matvec: shape mismatch %s vs %s" % (w.shape, x.shape))
    return Tensor(w.values @ x.values,
                  [(w, lambda g: np.outer(g, x.values)), (x, lambda g: w.values.T @ g)])


def affine(w, b, x):
    """w @ x + b."""
    return add(matvec(w, x), b)


def relu(x):
    x = _t(x)
    mask = x.values > 0.0
    return Tensor(x.values * mask, [(x, lambda g: g * mask)])


def sigmoid(x):
    x = _t(x)
    y = 1.0 / (1.0 + np.exp(-x.values))
    return Tensor(y, [(x, lambda g: g * y * (1.0 - y))])


def log(x):
    x = _t(x)
    return Tensor(np.log(x.values), [(x, lambda g: g / x.values)])


def clip(x, lo, hi):
    """Clamp values; gradient passes through only where unclipped."""
    x = _t(x)
    mask = (x.values > lo) & (x.values < hi)
    return Tensor(np.clip(x.values, lo, hi), [(x, lambda g: g * mask)])


def concat(parts):
    """Concatenate 1-d tensors."""
    parts = [_t(p) for p in parts]
    sizes = [p.values.shape[0] for p in parts]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    parents = []
    for i, p in enumerate(parts):
        lo, hi = int(offsets[i]), int(offsets[i + 1])
        parents.append((p, lambda g, lo=lo, hi=hi: g[lo:hi]))
    return Tensor(np.concatenate([p.values for p in parts]), parents)


def pick_row(m, index):
    """Row of a matrix as a vector; gradient scatters back into that row."""
    m = _t(m)
    i = int(index)

    def grad_fn(g):
        out = np.zeros_like(m.values)
        out[i] = g
        return out

    return Tensor(m.values[i], [(m, grad_fn)])


def gather_rows(m, indices):
    """Select rows of a matrix; gradients scatter-add back into the matrix."""
    m = _t(m)
    idx = np.asarray(indices, dtype=np.intp)

    def grad_fn(g):
        out = np.zeros_like(m.values)
        np.add.at(out, idx, g)
        return out

    return Tensor(m.values[idx], [(m, grad_fn)])


def add_scalar(x, s):
    """Add a scalar tensor to every element of a vector."""
    x, s = _t(x), _t(s)
    if s.values.shape != ():
        raise ValueError("add_scalar expects a scalar, got shape %s" % (s.values.shape,))
    return Tensor(x.values + s.values, [(x, lambda g: g), (s, lambda g: g.sum())])


def hstack_cols(a, b):
    """Column-concatenate two matrices with equal row counts."""
    a, b = _t(a), _t(b)
    na = a.shape[1]
    return Tensor(np.concatenate([a.values, b.values], axis=1),
                  [(a, lambda g: g[:, :na]), (b, lambda g: g[:, na:])])


def mean_rows(x, n_rows=None):
    """Mean over the first n_rows rows of a (T, C) matrix (all rows if None).

    Masking the average to the true positions makes the result independent of
    any zero rows appended past n_rows.
    """
    x = _t(x)
    total = x.shape[0] if n_rows is None else int(n_rows)
    if total < 1:
        raise ValueError("mean_rows needs at least one row")

    def grad_fn(g):
        out = np.zeros_like(x.values)
        out[:total] = g / total
        return out

    return Tensor(x.values[:total].mean(axis=0), [(x, grad_fn)])


def zero_tail_rows(x, n_keep):
    """Zero all rows at positions >= n_keep (forward and backward)."""
    x = _t(x)
    n = int(n_keep)
    out = x.values.copy()
    out[n:] = 0.0

    def grad_fn(g):
        gg = g.copy()
        gg[n:] = 0.0
        return gg

    return Tensor(out, [(x, grad_fn)])


def max_rows(rows):
    """Elementwise max over a list of equal-length vectors.

    Gradient routes to the first row attaining each maximum.
    """
    rows = [_t(r) for r in rows]
    if not rows:
        raise ValueError("max_rows needs at least one row")
    stacked = np.stack([r.values for r in rows])
    winner = np.argmax(stacked, axis=0)
    out = stacked[winner, np.arange(stacked.shape[1])]
    parents = []
    for i, r in enumerate(rows):
        mask = winner == i
        parents.append((r, lambda g, mask=mask: g * mask))
    return Tensor(out, parents)


def dilated_conv1d(kernel, bias, x, dilation):
    """Width-3 1-d convolution with dilation and zero padding at the ends.

    kernel (3, c_in, c_out), bias (c_out,), x (T, c_in) -> (T, c_out):
    y[t] = W_0 . x[t-d] + W_1 . x[t] + W_2 . x[t+d] + bias.
    """
    kernel, bias, x = _t(kernel), _t(bias), _t(x)
    if dilation < 1:
        raise ValueError("dilation must be >= 1")
    if kernel.values.ndim != 3 or kernel.shape[0] != 3 or kernel.shape[1] != x.shape[1]:
        raise ValueError("dilated_conv1d: kernel %s does not fit input %s"
                         % (kernel.shape, x.shape))
    t_len = x.shape[0]
    d = int(dilation)

    def shifted(values, offset):
        out = np.zeros_like(values)
        if offset > 0:       # x[t + offset]
            out[:t_len - offset] = values[offset:]
        elif offset < 0:     # x[t + offset]
            out[-offset:] = values[:t_len + offset]
        else:
            out[:] = values
        return out

    xv = x.values
    taps = [shifted(xv, -d), xv, shifted(xv, d)]
    y = taps[0] @ kernel.values[0] + taps[1] @ kernel.values[1] + taps[2] @ kernel.values[2]
    y = y + bias.values

    def grad_kernel(g):
        return np.stack([taps[0].T @ g, taps[1].T @ g, taps[2].T @ g])

    def grad_x(g):
        # Transpose of the shift: contribution of W_k flows back shifted oppositely.
        out = g @ kernel.values[1].T
        out += shifted(g @ kernel.values[0].T, d)
        out += shifted(g @ kernel.values[2].T, -d)
        return out

    return Tensor(y, [(kernel, grad_kernel), (bias, lambda g: g.sum(axis=0)), (x, grad_x)])


def tsum(parts):
    """Sum of scalar tensors."""
    parts = [_t(p) for p in parts]
    total = sum(p.values for p in parts)
    return Tensor(total, [(p, lambda g: g) for p in parts])


def hinge(x):
    """max(0, x) elementwise; gradient is 0 at and below the kink."""
    x = _t(x)
    mask = x.values > 0.0
    return Tensor(x.values * mask, [(x, lambda g: g * mask)])


def vsum(x):
    """Sum of a vector to a scalar."""
    x = _t(x)
    return Tensor(x.values.sum(), [(x, lambda g: np.full_like(x.values, g))])


def pick(x, index):
    """Scalar element of a vector."""
    x = _t(x)
    i = int(index)
    if not 0 <= i < x.shape[0]:
        raise IndexError("pick: index %d out of range for length %d" % (i, x.shape[0]))

    def grad_fn(g):
        out = np.zeros_like(x.values)
        out[i] = g
        return out

    return Tensor(x.values[i], [(x, grad_fn)])


def grad_check(f, params, epsilon=1e-5):
    """Max relative error between analytic and central-difference gradients.

    `f` maps a dict of name -> leaf Tensor to a scalar Tensor; `params` is the
    dict of name -> ndarray being checked. Every entry of every array is
    perturbed. The relative error is |a - n| / max(1e-8, |a| + |n|).
    """
    leaves = {name: leaf(arr) for name, arr in params.items()}
    out = f(leaves)
    if not np.isfinite(out.values):
        raise ValueError("loss is not finite at the given parameters")
    out.backward()
    analytic = {name: (np.zeros_like(params[name]) if leaves[name].grad is None
                       else np.array(leaves[name].grad))
                for name in params}
    worst = 0.0
    for name, arr in params.items():
        flat = arr.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + epsilon
            hi = f({n: constant(a) for n, a in params.items()}).item()
            flat[i] = original - epsilon
            lo = f({n: constant(a) for n, a in params.items()}).item()
            flat[i] = original
            numeric = (hi - lo) / (2.0 * epsilon)
            a = analytic[name].reshape(-1)[i]
            err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, err)
    return worst


class Adam:
    """Adam optimizer over a dict of named parameter arrays."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {}
        self.v = {}

    def step(self, params, grads):
        """Update params in place given grads for a subset of names."""
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("non-finite gradient for parameter %r" % name)
        self.step_count += 1
        t = self.step_count
        for name, g in grads.items():
            if name not in self.m:
                self.m[name] = np.zeros_like(params[name])
                self.v[name] = np.zeros_like(params[name])
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1 ** t)
            v_hat = v / (1.0 - self.beta2 ** t)
            params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
