"""Graph embeddings from random walks plus a CBOW skip-less word2vec.

Walks alternate node and predicate tokens. Every entity starts a fixed
number of walks; a walk stops early at nodes without outgoing edges. The
CBOW model averages the input-side embeddings of the context tokens and
scores the center token against sampled noise tokens drawn from the
unigram distribution raised to 0.75.
"""

import numpy as np

from ..autodiff import (parameter, constant, backward, AdamState, adam_step,
                        matmul, mul, gather_rows, scatter_add_rows, rowdot,
                        concat_rows, softmax_cross_entropy)
from ..errors import UsageError
from .compile import CompiledEntityGraph, compile_entity_graph, strip_literal_triples
from .train_config import TrainConfig


def _walk_token_array(compiled, walks, depth, rng):
    """All walks as one int matrix, -1 padding after early stops.

    Tokens 0..n_entities-1 are nodes; n_entities..n_entities+R-1 are
    predicates. Row layout: node, pred, node, pred, ... (2*depth+1 wide).
    """
    n = compiled.n_entities
    starts = np.repeat(np.arange(n, dtype=np.int64), walks)
    total = starts.size
    toks = np.full((total, 2 * depth + 1), -1, dtype=np.int64)
    toks[:, 0] = starts
    cur = starts.copy()
    alive = np.ones(total, dtype=bool)
    deg = np.diff(compiled.out_indptr)
    for step in range(depth):
        alive = alive & (deg[cur] > 0)
        if not alive.any():
            break
        c = cur[alive]
        pick = rng.integers(0, deg[c])
        edge = compiled.out_indptr[c] + pick
        toks[alive, 2 * step + 1] = compiled.out_pred[edge] + n
        toks[alive, 2 * step + 2] = compiled.out_tail[edge]
        cur[alive] = compiled.out_tail[edge]
    return toks


def random_walks(graph, config=None):
    """Random walk corpus over the literal-free graph, as string tokens.

    Returns a list of tuples; each tuple alternates entity IRIs and
    predicate IRIs, starting at the walk's source node.
    """
    cfg = (config or TrainConfig()).validate()
    compiled = compile_entity_graph(strip_literal_triples(graph))
    rng = np.random.default_rng(cfg.seed)
    toks = _walk_token_array(compiled, cfg.walks, cfg.depth, rng)
    names = [e.value for e in compiled.entities] + list(compiled.relations)
    out = []
    for row in toks:
        stop = np.argmax(row < 0) if (row < 0).any() else row.size
        out.append(tuple(names[t] for t in row[:stop]))
    return out


def _windows_from_walks(toks, window):
    """(target, contexts, owner) triples for every position of every walk.

    Returns target ids (M,), a flat context id vector with an owner map
    back to windows, and per-window context counts.
    """
    total, length = toks.shape
    targets, ctx_flat, owner = [], [], []
    counts = []
    wid = 0
    # column-wise assembly keeps this vectorized over the walk axis
    for pos in range(length):
        t_col = toks[:, pos]
        valid = t_col >= 0
        if not valid.any():
            break
        ctx_cols = [c for c in range(max(0, pos - window), min(length, pos + window + 1))
                    if c != pos]
        ctx = toks[:, ctx_cols]
        ctx_ok = (ctx >= 0) & valid[:, None]
        n_ctx = ctx_ok.sum(axis=1)
        keep = valid & (n_ctx > 0)
        k = int(keep.sum())
        if k == 0:
            continue
        targets.append(t_col[keep])
        counts.append(n_ctx[keep])
        sel = ctx_ok[keep]
        rows = np.nonzero(sel)[0]
        ctx_flat.append(ctx[keep][sel])
        owner.append(rows + wid)
        wid += k
    if wid == 0:
        raise UsageError("walk corpus produced no context windows")
    return (np.concatenate(targets), np.concatenate(ctx_flat),
            np.concatenate(owner), np.concatenate(counts))


class CbowModel:
    """Input-side embedding table keyed by token id, with the vocab."""

    def __init__(self, vocab, emb, epoch_losses):
        self.vocab = list(vocab)
        self.token_index = {t: i for i, t in enumerate(self.vocab)}
        self.emb = emb
        self.epoch_losses = epoch_losses

    def vector(self, token):
        return self.emb[self.token_index[token]]


def cbow_train(walks, config=None):
    """Train CBOW embeddings over a corpus of token sequences.

    Accepts the string walks produced by random_walks (or any iterable of
    token tuples). Returns a CbowModel holding input-side embeddings.
    """
    cfg = (config or TrainConfig()).validate()
    vocab = sorted({t for w in walks for t in w})
    index = {t: i for i, t in enumerate(vocab)}
    length = max((len(w) for w in walks), default=0)
    if length == 0:
        raise UsageError("cannot train CBOW on an empty walk corpus")
    toks = np.full((len(walks), length), -1, dtype=np.int64)
    for i, w in enumerate(walks):
        toks[i, :len(w)] = [index[t] for t in w]
    emb, losses = _cbow_core(toks, len(vocab), cfg)
    return CbowModel(vocab, emb, losses)


def _cbow_core(toks, n_tokens, cfg):
    """Negative-sampling CBOW over an int token matrix."""
    rng = np.random.default_rng(cfg.seed)
    targets, ctx_flat, owner, counts = _windows_from_walks(toks, cfg.window)
    m_all = targets.size
    if m_all > cfg.max_windows:
        keep = np.sort(rng.choice(m_all, size=cfg.max_windows, replace=False))
        sel = np.zeros(m_all, dtype=bool)
        sel[keep] = True
        ctx_keep = sel[owner]
        remap = np.cumsum(sel) - 1
        targets = targets[keep]
        counts = counts[keep]
        ctx_flat = ctx_flat[ctx_keep]
        owner = remap[owner[ctx_keep]]
        m_all = targets.size

    freq = np.bincount(targets, minlength=n_tokens).astype(np.float64)
    noise = freq ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    emb_in = parameter(rng.normal(0.0, 0.5 / np.sqrt(cfg.dim), size=(n_tokens, cfg.dim)))
    emb_out = parameter(np.zeros((n_tokens, cfg.dim)))
    state = AdamState(lr=cfg.lr, weight_decay=0.0)
    two_col = constant(np.array([[1.0, 0.0]]))
    k = cfg.cbow_negatives

    # window -> contiguous slice of its contexts, for cheap batch slicing
    order = np.argsort(owner, kind="stable")
    ctx_sorted = ctx_flat[order]
    bounds = np.concatenate([[0], np.cumsum(np.bincount(owner, minlength=m_all))])

    losses = []
    for _ in range(cfg.epochs):
        perm = rng.permutation(m_all)
        total = 0.0
        for start in range(0, m_all, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            b = idx.size
            n_ctx = counts[idx]
            local_owner = np.repeat(np.arange(b), n_ctx)
            # ragged gather: expand each window's [bounds[i], bounds[i]+len) range
            seg_start = np.repeat(bounds[idx], n_ctx)
            seg_off = np.arange(n_ctx.sum()) - np.repeat(np.cumsum(n_ctx) - n_ctx, n_ctx)
            gather_idx = ctx_sorted[seg_start + seg_off]
            inv = constant((1.0 / n_ctx).reshape(-1, 1))

            h = mul(scatter_add_rows(gather_rows(emb_in, gather_idx), local_owner, b), inv)
            neg = np.searchsorted(noise_cum, rng.random(b * k))
            s_pos = rowdot(h, gather_rows(emb_out, targets[idx]))
            h_rep = gather_rows(h, np.repeat(np.arange(b), k))
            s_neg = rowdot(h_rep, gather_rows(emb_out, neg))
            logits = matmul(concat_rows(s_pos, s_neg), two_col)
            labels = np.concatenate([np.zeros(b, dtype=np.int64),
                                     np.ones(b * k, dtype=np.int64)])
            loss = softmax_cross_entropy(logits, labels)
            grads = backward(loss, [emb_in, emb_out])
            adam_step([emb_in, emb_out], grads, state)
            total += float(loss.value) * b
        losses.append(total / m_all)
    return emb_in.value, losses


class Rdf2VecModel:
    """Entity embeddings learned from walk co-occurrence."""

    def __init__(self, compiled, emb, epoch_losses):
        self.entities = compiled.entities
        self.entity_index = compiled.entity_index
        self.relations = compiled.relations
        self.emb = emb
        self.patient_rows = compiled.patient_rows
        self.patient_ids = compiled.patient_ids
        self.epoch_losses = epoch_losses

    def vector(self, entity):
        return self.emb[self.entity_index[entity]]

    def patient_matrix(self):
        return self.emb[self.patient_rows]


def rdf2vec_train(graph, config=None):
    """Walks + CBOW in one step, on the literal-free view of a graph."""
    cfg = (config or TrainConfig()).validate()
    compiled = (graph if isinstance(graph, CompiledEntityGraph)
                else compile_entity_graph(strip_literal_triples(graph)))
    rng = np.random.default_rng(cfg.seed)
    toks = _walk_token_array(compiled, cfg.walks, cfg.depth, rng)
    n_tokens = compiled.n_entities + compiled.n_relations
    emb, losses = _cbow_core(toks, n_tokens, cfg)
    return Rdf2VecModel(compiled, emb[:compiled.n_entities], losses)
