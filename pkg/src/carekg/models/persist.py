"""Checkpoint files and embedding export for trained models.

Checkpoint layout (numpy .npz, version 1):
    meta          0-d unicode array holding a JSON document with the keys
                  "version", "kind" (one of "transe", "rdf2vec", "rgcn"),
                  and kind-specific metadata (entity names, relation names,
                  patient ids, model config, ...).
    <arrays>      float64 parameter arrays named per kind:
                  transe:  entity_emb, relation_emb, epoch_losses
                  rdf2vec: emb, epoch_losses
                  rgcn:    entity_table, lit_w, lit_b, probs, and per layer
                           layer{i}_basis{b}, layer{i}_coeffs, layer{i}_w0,
                           layer{i}_slope

Embedding export is a CSV with header ``entity,dim_0,...,dim_{d-1}``, one
row per entity IRI, floats written with repr so a reload is bit-exact.
"""

import csv
import dataclasses
import json

import numpy as np

from ..errors import UsageError
from ..autodiff import parameter
from .transe import TransEModel
from .rdf2vec import Rdf2VecModel
from .rgcn import RGCNModel, RGCNConfig, RGCNParams, RGCNLayerParams

CHECKPOINT_VERSION = 1


class _EntityTableView:
    """Entity/relation bookkeeping of a restored embedding model.

    Entities are stored in checkpoints by IRI string, so the restored
    index is keyed by string rather than by term object.
    """

    def __init__(self, meta):
        self.entities = list(meta["entities"])
        self.entity_index = {e: i for i, e in enumerate(self.entities)}
        self.relations = list(meta["relations"])
        self.patient_rows = np.asarray(meta["patient_rows"], dtype=np.int64)
        self.patient_ids = list(meta["patient_ids"])


def _embedding_meta(model, kind):
    entities = [e if isinstance(e, str) else e.value for e in model.entities]
    return {
        "version": CHECKPOINT_VERSION,
        "kind": kind,
        "entities": entities,
        "relations": list(model.relations),
        "patient_rows": [int(r) for r in model.patient_rows],
        "patient_ids": list(model.patient_ids),
    }


def save_checkpoint(model, path):
    """Write a trained model to ``path`` as a versioned .npz dump."""
    if isinstance(model, TransEModel):
        meta = _embedding_meta(model, "transe")
        arrays = {
            "entity_emb": model.entity_emb,
            "relation_emb": model.relation_emb,
            "epoch_losses": np.asarray(model.epoch_losses, dtype=np.float64),
        }
    elif isinstance(model, Rdf2VecModel):
        meta = _embedding_meta(model, "rdf2vec")
        arrays = {
            "emb": model.emb,
            "epoch_losses": np.asarray(model.epoch_losses, dtype=np.float64),
        }
    elif isinstance(model, RGCNModel):
        meta = {
            "version": CHECKPOINT_VERSION,
            "kind": "rgcn",
            "config": dataclasses.asdict(model.config),
            "entities": list(model.entities),
            "relations": list(model.params.relations),
            "patient_ids": list(model.patient_ids),
            "best_epoch": int(model.best_epoch),
            "n_bases": [len(layer.bases) for layer in model.params.layers],
        }
        arrays = {
            "entity_table": model.params.entity_table.value,
            "lit_w": model.params.lit_w.value,
            "lit_b": model.params.lit_b.value,
            "probs": model.probs,
        }
        for i, layer in enumerate(model.params.layers):
            for b, basis in enumerate(layer.bases):
                arrays[f"layer{i}_basis{b}"] = basis.value
            arrays[f"layer{i}_coeffs"] = layer.coeffs.value
            arrays[f"layer{i}_w0"] = layer.w0.value
            arrays[f"layer{i}_slope"] = layer.slope.value
    else:
        raise UsageError(f"cannot checkpoint object of type {type(model).__name__}")

    with open(path, "wb") as f:
        np.savez(f, meta=np.array(json.dumps(meta)), **arrays)
    return path


def load_checkpoint(path):
    """Rebuild the model saved at ``path``.

    Returns a TransEModel, Rdf2VecModel, or RGCNModel. Restored index maps
    are keyed by IRI string (see _EntityTableView).
    """
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        arrays = {k: data[k] for k in data.files if k != "meta"}

    version = meta.get("version")
    if version != CHECKPOINT_VERSION:
        raise UsageError(f"unsupported checkpoint version {version!r}")
    kind = meta.get("kind")

    if kind == "transe":
        view = _EntityTableView(meta)
        return TransEModel(view, arrays["entity_emb"], arrays["relation_emb"],
                           list(arrays["epoch_losses"]))
    if kind == "rdf2vec":
        view = _EntityTableView(meta)
        return Rdf2VecModel(view, arrays["emb"], list(arrays["epoch_losses"]))
    if kind == "rgcn":
        config = RGCNConfig(**{k: tuple(v) if isinstance(v, list) else v
                               for k, v in meta["config"].items()})
        layers = []
        for i, nb in enumerate(meta["n_bases"]):
            layers.append(RGCNLayerParams(
                bases=[parameter(arrays[f"layer{i}_basis{b}"]) for b in range(nb)],
                coeffs=parameter(arrays[f"layer{i}_coeffs"]),
                w0=parameter(arrays[f"layer{i}_w0"]),
                slope=parameter(arrays[f"layer{i}_slope"]),
            ))
        params = RGCNParams(
            entity_table=parameter(arrays["entity_table"]),
            lit_w=parameter(arrays["lit_w"]),
            lit_b=parameter(arrays["lit_b"]),
            layers=layers,
            relations=list(meta["relations"]),
        )
        model = RGCNModel(params, config, list(meta["patient_ids"]),
                          arrays["probs"], history=None,
                          best_epoch=meta["best_epoch"])
        model.entities = list(meta["entities"])
        return model
    raise UsageError(f"unknown checkpoint kind {kind!r}")


def export_embeddings(model, path):
    """Write entity embeddings as CSV rows of IRI plus vector components."""
    if isinstance(model, TransEModel):
        names, matrix = model.entities, model.entity_emb
    elif isinstance(model, Rdf2VecModel):
        names, matrix = model.entities, model.emb
    elif isinstance(model, RGCNModel):
        names, matrix = model.entities, model.params.entity_table.value
    else:
        raise UsageError(f"cannot export embeddings from {type(model).__name__}")
    names = [n if isinstance(n, str) else n.value for n in names]
    if len(names) != matrix.shape[0]:
        raise UsageError(
            f"{len(names)} entities but {matrix.shape[0]} embedding rows")

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["entity"] + [f"dim_{j}" for j in range(matrix.shape[1])])
        for name, row in zip(names, matrix):
            writer.writerow([name] + [repr(float(v)) for v in row])
    return path
