"""Reverse-mode autodiff over dense 64-bit matrices.

Tensors form the tape: each op returns a Tensor holding its value, its
parent Tensors, and a closure that routes the incoming gradient to those
parents. Subtrees without any gradient-requiring leaf are pruned at
construction, so prediction-only passes cost no tape bookkeeping.

The relational aggregation op (rel_aggregate) fuses the per-relation
basis-combined message passing sum_r A_r @ (sum_b c_rb (H @ V_b)) into one
node; its backward recovers exactly the gradients of that composition while
touching each sparse matrix once.
"""

import numpy as np

from ..errors import UsageError, NumericError


class Tensor:
    __slots__ = ("value", "grad", "parents", "bwd", "requires_grad")

    def __init__(self, value, requires_grad=False, parents=(), bwd=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self.bwd = bwd
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.value.shape

    def accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.value)
        self.grad += g


def parameter(value):
    return Tensor(value, requires_grad=True)


def constant(value):
    return Tensor(value)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(value, parents, bwd):
    if any(p.requires_grad for p in parents):
        return Tensor(value, requires_grad=True, parents=tuple(parents), bwd=bwd)
    return Tensor(value)


def backward(loss, params=None):
    """Run reverse-mode accumulation from a scalar loss.

    Gradients land on every reachable Tensor's .grad (zeroed first). When
    ``params`` is given, returns their gradients in order, with zeros for
    parameters the loss never touched.
    """
    if loss.value.size != 1:
        raise UsageError(f"backward needs a scalar loss, got shape {loss.shape}")
    topo, seen = [], set()
    stack = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    for node in topo:
        node.grad = None
    loss.grad = np.ones_like(loss.value)
    for node in reversed(topo):
        if node.bwd is not None and node.grad is not None:
            node.bwd(node.grad)
    if params is not None:
        return [p.grad if p.grad is not None else np.zeros_like(p.value) for p in params]
    return None


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.value @ b.value

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g @ b.value.T)
        if b.requires_grad:
            b.accumulate(a.value.T @ g)

    return _node(out, (a, b), bwd)


def _unbroadcast(g, shape):
    # sum the gradient back down to the operand's broadcast shape
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.value + b.value

    def bwd(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.value.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g, b.value.shape))

    return _node(out, (a, b), bwd)


def scale(a, c):
    a = _as_tensor(a)
    c = float(c)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * c)

    return _node(a.value * c, (a,), bwd)


def sub(a, b):
    return add(a, scale(b, -1.0))


def mul(a, b):
    """Elementwise product with numpy broadcasting."""
    a, b = _as_tensor(a), _as_tensor(b)
    out = a.value * b.value

    def bwd(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g * b.value, a.value.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g * a.value, b.value.shape))

    return _node(out, (a, b), bwd)


def tanh(a):
    a = _as_tensor(a)
    y = np.tanh(a.value)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * (1.0 - y * y))

    return _node(y, (a,), bwd)


def prelu(x, slope):
    """y = x for x > 0, slope * x otherwise; slope is a (learnable) scalar."""
    x, slope = _as_tensor(x), _as_tensor(slope)
    a = float(np.asarray(slope.value).reshape(-1)[0])
    pos = x.value > 0
    y = np.where(pos, x.value, a * x.value)

    def bwd(g):
        if x.requires_grad:
            x.accumulate(g * np.where(pos, 1.0, a))
        if slope.requires_grad:
            slope.accumulate(np.array(np.sum(g * np.where(pos, 0.0, x.value))).reshape(slope.value.shape))

    return _node(y, (x, slope), bwd)


def relu(x):
    return prelu(x, constant(0.0))


def softmax(logits):
    """Row-wise softmax of a raw array (prediction helper, no tape)."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits, labels, sample_weight=None):
    """Mean cross-entropy of row-wise softmax against integer labels."""
    lg = _as_tensor(logits)
    y = np.asarray(labels, dtype=np.int64)
    if lg.value.ndim != 2 or y.shape != (lg.value.shape[0],):
        raise UsageError("softmax_cross_entropy expects (m,K) logits and (m,) labels")
    m = lg.value.shape[0]
    if sample_weight is None:
        w = np.full(m, 1.0 / m)
    else:
        w = np.asarray(sample_weight, dtype=np.float64)
        w = w / w.sum()
    probs = softmax(lg.value)
    eps = 1e-300  # guards log(0) only; gradients use probs directly
    loss = -(w * np.log(probs[np.arange(m), y] + eps)).sum()

    def bwd(g):
        if lg.requires_grad:
            d = probs.copy()
            d[np.arange(m), y] -= 1.0
            lg.accumulate(float(g) * d * w[:, None])

    return _node(np.array(loss), (lg,), bwd)


def l1_norm(a):
    """Row-wise L1 norm -> (m, 1); subgradient uses sign(0) = 0."""
    a = _as_tensor(a)
    y = np.abs(a.value).sum(axis=1, keepdims=True)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * np.sign(a.value))

    return _node(y, (a,), bwd)


def gather_rows(x, idx):
    x = _as_tensor(x)
    idx = np.asarray(idx, dtype=np.int64)

    def bwd(g):
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.value)
            np.add.at(x.grad, idx, g)

    return _node(x.value[idx], (x,), bwd)


def scatter_add_rows(x, idx, n_rows):
    """Rows of x summed into a (n_rows, d) output at positions idx."""
    x = _as_tensor(x)
    idx = np.asarray(idx, dtype=np.int64)
    out = np.zeros((n_rows, x.value.shape[1]))
    np.add.at(out, idx, x.value)

    def bwd(g):
        if x.requires_grad:
            x.accumulate(g[idx])

    return _node(out, (x,), bwd)


def mean(a):
    a = _as_tensor(a)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(np.full_like(a.value, float(g) / a.value.size))

    return _node(np.array(a.value.mean()), (a,), bwd)


def rowdot(a, b):
    """Row-wise dot product -> (m, 1)."""
    a, b = _as_tensor(a), _as_tensor(b)
    y = (a.value * b.value).sum(axis=1, keepdims=True)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * b.value)
        if b.requires_grad:
            b.accumulate(g * a.value)

    return _node(y, (a, b), bwd)


def concat_rows(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    na = a.value.shape[0]

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g[:na])
        if b.requires_grad:
            b.accumulate(g[na:])

    return _node(np.concatenate([a.value, b.value], axis=0), (a, b), bwd)


class StackedAdjacency:
    """All per-relation adjacencies as one tagged edge list.

    The sparsity pattern never changes during training, only the mixing
    coefficients do, so the row-major and column-major edge orders are
    computed once. A per-basis matrix sum_r coeffs[r, b] * A_r is then a
    CSR with the fixed pattern and a freshly scaled data vector, which
    turns the aggregation into B sparse products instead of R dense
    mixing passes.
    """

    def __init__(self, mats):
        from scipy import sparse as _sp
        if not mats:
            raise UsageError("StackedAdjacency needs at least one relation matrix")
        self._sp = _sp
        self.n = mats[0].shape[0]
        self.n_relations = len(mats)
        coos = [m.tocoo() for m in mats]
        rows = np.concatenate([c.row.astype(np.int64) for c in coos])
        cols = np.concatenate([c.col.astype(np.int64) for c in coos])
        data = np.concatenate([c.data.astype(np.float64) for c in coos])
        tags = np.concatenate([np.full(c.nnz, r, dtype=np.int64)
                               for r, c in enumerate(coos)])
        fwd = np.lexsort((cols, rows))
        self.rows, self.cols = rows[fwd], cols[fwd]
        self.w, self.tag = data[fwd], tags[fwd]
        self.indptr = np.concatenate(
            [[0], np.cumsum(np.bincount(self.rows, minlength=self.n))])
        bwd = np.lexsort((rows, cols))
        self.cols_t = rows[bwd]
        self.w_t, self.tag_t = data[bwd], tags[bwd]
        self.indptr_t = np.concatenate(
            [[0], np.cumsum(np.bincount(cols[bwd], minlength=self.n))])

    def combine(self, edge_scale):
        """CSR of sum over relations with per-edge scale (forward pattern)."""
        return self._sp.csr_matrix((edge_scale * self.w, self.cols, self.indptr),
                                   shape=(self.n, self.n))

    def combine_t(self, edge_scale_t):
        """CSR of the transposed combination (column-major pattern)."""
        return self._sp.csr_matrix((edge_scale_t * self.w_t, self.cols_t, self.indptr_t),
                                   shape=(self.n, self.n))


def rel_aggregate(h, bases, coeffs, adjacency):
    """Fused per-relation aggregation sum_r A_r @ (sum_b coeffs[r,b] (H @ V_b)).

    ``adjacency`` is a StackedAdjacency (or a list of per-relation scipy
    CSR matrices, converted on the fly); ``bases`` is the list of B basis
    Tensors and ``coeffs`` the (R, B) mixing Tensor. Equivalent to
    composing matmul, scale, add, and sparse products, but evaluated as
    one sparse product per basis over the relation-stacked edge list.
    """
    h = _as_tensor(h)
    bases = [_as_tensor(v) for v in bases]
    coeffs = _as_tensor(coeffs)
    adj = adjacency if isinstance(adjacency, StackedAdjacency) else StackedAdjacency(adjacency)
    R, B = adj.n_relations, len(bases)
    if coeffs.value.shape != (R, B):
        raise UsageError(f"rel_aggregate: coeffs shape {coeffs.value.shape} != ({R}, {B})")
    n, d_out = adj.n, bases[0].value.shape[1]
    if h.value.shape[0] != n:
        raise UsageError(f"rel_aggregate: h has {h.value.shape[0]} rows, adjacency expects {n}")
    ys = [h.value @ v.value for v in bases]  # cached for backward
    c = coeffs.value
    out = np.zeros((n, d_out))
    for b in range(B):
        out += adj.combine(c[adj.tag, b]) @ ys[b]

    def bwd(g):
        need_y = h.requires_grad or any(v.requires_grad for v in bases)
        if coeffs.requires_grad and coeffs.grad is None:
            coeffs.grad = np.zeros_like(coeffs.value)
        for b in range(B):
            if coeffs.requires_grad:
                # per-edge contraction g_i . y_j, summed into relation bins
                e = np.einsum("ij,ij->i", g[adj.rows], ys[b][adj.cols]) * adj.w
                coeffs.grad[:, b] += np.bincount(adj.tag, weights=e, minlength=R)
            if need_y:
                grad_y = adj.combine_t(c[adj.tag_t, b]) @ g
                if bases[b].requires_grad:
                    bases[b].accumulate(h.value.T @ grad_y)
                if h.requires_grad:
                    h.accumulate(grad_y @ bases[b].value.T)

    return _node(out, tuple([h] + bases + [coeffs]), bwd)


def check_finite(x, context):
    if not np.all(np.isfinite(x)):
        raise NumericError(f"non-finite values in {context}")
    return x
