"""Translation-based knowledge graph embeddings.

Entities and relations share one vector space; a triple (h, r, t) is
scored by the L1 distance between h + r and t, and training pushes each
observed triple below corrupted variants by a fixed margin.
"""

import numpy as np

from ..autodiff import (parameter, constant, backward, AdamState, adam_step,
                        add, sub, gather_rows, l1_norm, relu, mean)
from .compile import CompiledEntityGraph, compile_entity_graph, strip_literal_triples
from .train_config import TrainConfig


def transe_score(h, r, t):
    """L1 distance ||h + r - t||_1 for single vectors or batches (rows)."""
    h = np.atleast_2d(np.asarray(h, dtype=np.float64))
    r = np.atleast_2d(np.asarray(r, dtype=np.float64))
    t = np.atleast_2d(np.asarray(t, dtype=np.float64))
    d = np.abs(h + r - t).sum(axis=1)
    return float(d[0]) if d.size == 1 else d


class TransEModel:
    """Trained embedding tables plus the index maps to read them."""

    def __init__(self, compiled, entity_emb, relation_emb, epoch_losses):
        self.entities = compiled.entities
        self.entity_index = compiled.entity_index
        self.relations = compiled.relations
        self.entity_emb = entity_emb
        self.relation_emb = relation_emb
        self.patient_rows = compiled.patient_rows
        self.patient_ids = compiled.patient_ids
        self.epoch_losses = epoch_losses

    def score_triple(self, s, p, o):
        h = self.entity_emb[self.entity_index[s]]
        r = self.relation_emb[self.relations.index(p)]
        t = self.entity_emb[self.entity_index[o]]
        return transe_score(h, r, t)

    def patient_matrix(self):
        """Embedding rows for patient nodes, ordered like patient_ids."""
        return self.entity_emb[self.patient_rows]


def _margin_loss(ent, rel, h, r, t, h_neg, t_neg, margin):
    """margin + d(pos) - d(neg), hinged at zero, averaged over the batch."""
    pos = l1_norm(sub(add(gather_rows(ent, h), gather_rows(rel, r)),
                      gather_rows(ent, t)))
    neg = l1_norm(sub(add(gather_rows(ent, h_neg), gather_rows(rel, r)),
                      gather_rows(ent, t_neg)))
    m = constant(np.full(pos.value.shape, margin))
    return mean(relu(add(m, sub(pos, neg))))


def transe_train(graph, config=None):
    """Fit TransE embeddings on the entity-to-entity triples of a graph.

    Literal-object triples are dropped before training. Each positive
    triple is paired with one corruption (head or tail replaced by a
    uniform random entity); entity rows are renormalized to unit L2 after
    every epoch. Returns a TransEModel with per-epoch mean losses.
    """
    cfg = (config or TrainConfig()).validate()
    compiled = (graph if isinstance(graph, CompiledEntityGraph)
                else compile_entity_graph(strip_literal_triples(graph)))
    rng = np.random.default_rng(cfg.seed)
    n, d = compiled.n_entities, cfg.dim

    bound = 6.0 / np.sqrt(d)
    ent = parameter(rng.uniform(-bound, bound, size=(n, d)))
    rel = parameter(rng.uniform(-bound, bound, size=(compiled.n_relations, d)))
    norms = np.linalg.norm(rel.value, axis=1, keepdims=True)
    rel.value /= np.maximum(norms, 1e-12)

    state = AdamState(lr=cfg.lr, weight_decay=0.0)
    m = compiled.heads.size
    epoch_losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(m)
        total = 0.0
        for start in range(0, m, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            h, r, t = compiled.heads[idx], compiled.rels[idx], compiled.tails[idx]
            k = cfg.transe_negatives
            if k > 1:
                h, r, t = np.repeat(h, k), np.repeat(r, k), np.repeat(t, k)
            corrupt_head = rng.random(h.size) < 0.5
            repl = rng.integers(0, n, size=h.size)
            h_neg = np.where(corrupt_head, repl, h)
            t_neg = np.where(corrupt_head, t, repl)

            loss = _margin_loss(ent, rel, h, r, t, h_neg, t_neg, cfg.margin)
            grads = backward(loss, [ent, rel])
            adam_step([ent, rel], grads, state)
            total += float(loss.value) * idx.size
        epoch_losses.append(total / m)
        norms = np.linalg.norm(ent.value, axis=1, keepdims=True)
        ent.value /= np.maximum(norms, 1e-12)

    return TransEModel(compiled, ent.value, rel.value, epoch_losses)
