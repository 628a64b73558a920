"""Relational graph convolutional network over entity and literal nodes.

Each layer averages neighbor states per relation, mixes relations through
a shared basis decomposition, adds a self-connection, and applies PReLU
between layers. Literal nodes enter through a one-value tanh encoder;
patient rows of the final layer are the class logits. Training is
transductive: one forward pass covers the whole graph, the loss reads
only the training patients.
"""

from dataclasses import dataclass, field

import numpy as np

from ..autodiff import (Tensor, parameter, constant, backward, AdamState, adam_step,
                        matmul, add, tanh, prelu, softmax, softmax_cross_entropy,
                        gather_rows, concat_rows, rel_aggregate, check_finite)
from ..errors import UsageError, NumericError
from ..rdf import Graph
from .compile import compile_rgcn_graph, strip_literal_triples


@dataclass
class RGCNConfig:
    """Architecture and optimization knobs.

    width is the input embedding dimension d0. hidden gives the output
    widths of all layers except the last (which always emits n_classes);
    when omitted it defaults to the 0.64/0.32 taper of the full-scale
    setup, repeated at the smallest width for deeper networks.
    """

    layers: int = 3
    width: int = 100
    hidden: tuple = None
    n_classes: int = 3
    bases: int = 4
    epochs: int = 200
    patience: int = 20
    seed: int = 0
    lr: float = 3e-3
    weight_decay: float = 2e-3
    use_literals: bool = True
    entity_init: float = 0.1

    def layer_dims(self):
        """[(d_in, d_out)] per layer; last layer always ends at n_classes.

        A hidden tuple shorter than layers-1 repeats its last width for the
        remaining layers, so one setting works across network depths.
        """
        if self.layers < 1:
            raise UsageError("RGCNConfig.layers must be >= 1")
        hidden = self.hidden
        if hidden is None:
            taper = [max(self.n_classes + 1, round(self.width * 0.64)),
                     max(self.n_classes + 1, round(self.width * 0.32))]
            hidden = (taper + [taper[-1]] * self.layers)[:self.layers - 1]
        hidden = tuple(hidden)
        if hidden and len(hidden) < self.layers - 1:
            hidden = hidden + (hidden[-1],) * (self.layers - 1 - len(hidden))
        if len(hidden) != self.layers - 1:
            raise UsageError(
                f"RGCNConfig.hidden needs {self.layers - 1} entries for "
                f"{self.layers} layers, got {len(hidden)}")
        dims = []
        d = self.width
        for out in list(hidden) + [self.n_classes]:
            dims.append((d, int(out)))
            d = int(out)
        return dims


@dataclass
class RGCNLayerParams:
    bases: list
    coeffs: Tensor
    w0: Tensor
    slope: Tensor


@dataclass
class RGCNParams:
    """All learnable state, plus the relation order it was built against."""

    entity_table: Tensor
    lit_w: Tensor
    lit_b: Tensor
    layers: list = field(default_factory=list)
    relations: list = field(default_factory=list)

    def tensors(self):
        out = [self.entity_table, self.lit_w, self.lit_b]
        for layer in self.layers:
            out.extend(layer.bases)
            out.extend([layer.coeffs, layer.w0, layer.slope])
        return out

    def snapshot(self):
        return [t.value.copy() for t in self.tensors()]

    def restore(self, snap):
        for t, v in zip(self.tensors(), snap):
            t.value[...] = v


def init_rgcn_params(compiled, config):
    """Random initial parameters sized for a compiled graph.

    Basis count is clamped to the relation count so tiny graphs stay
    valid. The final layer starts near zero so initial patient logits are
    close to uniform.
    """
    rng = np.random.default_rng(config.seed)
    d0 = config.width
    ent = parameter(rng.normal(0.0, config.entity_init, size=(compiled.n_entities, d0)))
    lit_w = parameter(rng.normal(0.0, 1.0, size=(1, d0)))
    # spread the tanh offsets so the literal bank covers distinct soft
    # thresholds from the first epoch instead of all bending at zero
    lit_b = parameter(rng.uniform(-1.5, 1.5, size=(1, d0)))
    n_rel = compiled.n_relations
    n_bases = min(config.bases, n_rel) if n_rel else config.bases
    layers = []
    dims = config.layer_dims()
    for li, (d_in, d_out) in enumerate(dims):
        glorot = np.sqrt(2.0 / (d_in + d_out))
        if li == len(dims) - 1:
            glorot *= 0.3
        bases = [parameter(rng.normal(0.0, glorot, size=(d_in, d_out)))
                 for _ in range(n_bases)]
        coeffs = parameter(rng.normal(0.0, 1.0 / np.sqrt(n_bases), size=(n_rel, n_bases)))
        w0 = parameter(rng.normal(0.0, glorot, size=(d_in, d_out)))
        slope = parameter(np.array(0.25))
        layers.append(RGCNLayerParams(bases, coeffs, w0, slope))
    return RGCNParams(ent, lit_w, lit_b, layers, list(compiled.relations))


def encode_literal(values, lit_w, lit_b):
    """tanh(W v + b) rows for a vector of literal values.

    Accepts a scalar, a (m,) vector, or an (m, 1) column; returns a
    Tensor of shape (m, d0) with gradients flowing to W and b.
    """
    arr = np.asarray(values, dtype=np.float64)
    check_finite(arr, "literal values")
    col = constant(arr.reshape(-1, 1))
    return tanh(add(matmul(col, lit_w), lit_b))


def _input_block(compiled, params):
    if compiled.n_literals == 0:
        return params.entity_table
    lit = encode_literal(compiled.literal_inputs, params.lit_w, params.lit_b)
    return concat_rows(params.entity_table, lit)


def _forward_logits(compiled, params, initial=None):
    h = initial if initial is not None else _input_block(compiled, params)
    if not isinstance(h, Tensor):
        h = constant(h)
    if h.value.shape[0] != compiled.n_nodes:
        raise UsageError(
            f"initial embeddings have {h.value.shape[0]} rows, "
            f"graph has {compiled.n_nodes} nodes")
    last = len(params.layers) - 1
    for li, layer in enumerate(params.layers):
        msg = rel_aggregate(h, layer.bases, layer.coeffs, compiled.stacked)
        h = add(msg, matmul(h, layer.w0))
        if li != last:
            h = prelu(h, layer.slope)
    return gather_rows(h, compiled.patient_rows)


def rgcn_forward(graph, params, initial=None):
    """Class probabilities for every patient node, in patient_ids order."""
    compiled = compile_rgcn_graph(graph) if isinstance(graph, Graph) else graph
    logits = _forward_logits(compiled, params, initial)
    return softmax(logits.value)


class RGCNModel:
    """Trained parameters plus the per-patient probabilities at the best epoch."""

    def __init__(self, params, config, patient_ids, probs, history, best_epoch):
        self.params = params
        self.config = config
        self.patient_ids = patient_ids
        self.probs = probs
        self.history = history
        self.best_epoch = best_epoch
        self.entities = []  # entity-node names aligned with the embedding table

    def entity_embeddings(self):
        return self.params.entity_table.value


def _label_vector(compiled, labels):
    """(positions, classes) arrays from a patient_id -> class mapping."""
    index = {pid: i for i, pid in enumerate(compiled.patient_ids)}
    pos, cls = [], []
    for pid, y in labels.items():
        if pid not in index:
            raise UsageError(f"label given for non-patient node {pid!r}")
        pos.append(index[pid])
        cls.append(int(y))
    order = np.argsort(pos)
    return np.asarray(pos, dtype=np.int64)[order], np.asarray(cls, dtype=np.int64)[order]


def rgcn_train(graph, labels, config=None, val_labels=None):
    """Fit the network transductively; labels cover the training patients.

    val_labels, when given, drive model selection: the parameters from the
    epoch with the best validation macro-AUC are kept, and training stops
    once the score fails to improve for `patience` consecutive epochs.
    AUC is preferred over argmax-based scores here because it is
    threshold-free and much less noisy on small validation splits.
    Without val_labels the training loss plays that role.
    """
    from ..evalharness.metrics import auc_ovr_macro

    cfg = config or RGCNConfig()
    if isinstance(graph, Graph):
        g = graph if cfg.use_literals else strip_literal_triples(graph)
        compiled = compile_rgcn_graph(g)
    else:
        compiled = graph
    params = init_rgcn_params(compiled, cfg)
    train_pos, train_y = _label_vector(compiled, labels)
    if val_labels:
        val_pos, val_y = _label_vector(compiled, val_labels)
    state = AdamState(lr=cfg.lr, weight_decay=cfg.weight_decay)
    tensors = params.tensors()

    best_score, best_epoch, best_snap, best_probs = -np.inf, -1, None, None
    history = []
    stale = 0
    for epoch in range(cfg.epochs):
        logits = _forward_logits(compiled, params)
        loss = softmax_cross_entropy(gather_rows(logits, train_pos), train_y)
        if not np.isfinite(loss.value):
            raise NumericError(f"training loss became non-finite at epoch {epoch}")
        probs = softmax(logits.value)
        if val_labels:
            score = auc_ovr_macro(val_y, probs[val_pos])
        else:
            score = -float(loss.value)
        history.append({"epoch": epoch, "loss": float(loss.value), "score": score})
        if score > best_score:
            best_score, best_epoch = score, epoch
            best_snap = params.snapshot()
            best_probs = probs
            stale = 0
        else:
            stale += 1
            if stale > cfg.patience:
                break
        grads = backward(loss, tensors)
        adam_step(tensors, grads, state)

    params.restore(best_snap)
    model = RGCNModel(params, cfg, list(compiled.patient_ids), best_probs,
                      history, best_epoch)
    model.entities = [n.value for n in compiled.entities]
    return model
