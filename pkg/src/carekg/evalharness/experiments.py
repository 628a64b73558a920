"""Experiment drivers: cells of (model, representation) over repeated splits.

An experiment spec names a cohort configuration, a repetition count, and a
list of cells. Each repetition re-splits the cohort with seed base+rep and
retrains the cell's model from that seed. Graph builds, graph compiles,
and finished cells are cached across experiments within one invocation, so
a variant shared by two tables is trained once per repetition and reported
in both.
"""

import csv
import hashlib
import json
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..baselines import encode_tabular, train_logreg, train_rf, train_nn
from ..errors import ConfigurationError
from ..kg.builder import (SchemaVariant, build_cohort_graph,
                          cohort_timestamp_quantiles)
from ..models import (TrainConfig, transe_train, rdf2vec_train,
                      RGCNConfig, rgcn_train)
from ..models.compile import compile_rgcn_graph, compile_entity_graph, strip_literal_triples
from ..pathway.config import CohortConfig
from ..pathway.generate import generate_cohort
from ..pathway.vocab import OUTCOMES
from .metrics import classification_report
from .splits import make_split

METRIC_COLUMNS = ("f1_backhome", "f1_rehab", "f1_death",
                  "f1_macro", "f1_weighted", "accuracy", "auc")
CSV_COLUMNS = ("experiment", "model", "kg_variant", "repetition") + METRIC_COLUMNS

TABULAR_MODELS = ("LR", "RF", "NN")
_RGCN_NAME = re.compile(r"^RGCN(\d+)(\+lit)?$")


def _class_of(outcome):
    return OUTCOMES.index(outcome)


@dataclass
class ExperimentSpec:
    """One table's worth of cells plus the cohort they run against."""

    name: str
    cohort_config: dict
    cells: list
    n_patients: int = 2000
    repetitions: int = 10
    base_seed: int = 100
    model_params: dict = field(default_factory=dict)

    def validate(self):
        if not self.name:
            raise ConfigurationError("experiment spec needs a name")
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        for cell in self.cells:
            model, variant = cell.get("model"), cell.get("kg_variant")
            if model not in TABULAR_MODELS and not _RGCN_NAME.match(model or "") \
                    and model not in ("TransE", "RDF2Vec"):
                raise ConfigurationError(f"unknown model name {model!r}")
            if model in TABULAR_MODELS:
                if variant != "tabular":
                    raise ConfigurationError(
                        f"model {model} expects kg_variant 'tabular', got {variant!r}")
            else:
                SchemaVariant.parse(variant)
        return self

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        cohort_cfg = doc.get("cohort_config")
        if isinstance(cohort_cfg, str):
            path = cohort_cfg if os.path.isabs(cohort_cfg) else os.path.join(base_dir, cohort_cfg)
            try:
                with open(path, encoding="utf-8") as f:
                    cohort_cfg = json.load(f)
            except FileNotFoundError:
                raise ConfigurationError(f"cohort config file not found: {path}") from None
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"cohort config {path} is not valid JSON: {e}") from None
        if not isinstance(cohort_cfg, dict):
            raise ConfigurationError("experiment spec needs cohort_config (path or object)")
        try:
            spec = cls(
                name=doc["name"],
                cohort_config=cohort_cfg,
                cells=list(doc["cells"]),
                n_patients=int(doc.get("n_patients", 2000)),
                repetitions=int(doc.get("repetitions", 10)),
                base_seed=int(doc.get("base_seed", 100)),
                model_params=dict(doc.get("model_params", {})),
            )
        except KeyError as e:
            raise ConfigurationError(f"experiment spec: missing field {e}") from None
        return spec.validate()

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as f:
                doc = json.load(f)
        except FileNotFoundError:
            raise ConfigurationError(f"experiment spec file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"experiment spec {path} is not valid JSON: {e}") from None
        return cls.from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


class _CohortContext:
    """Everything derived from one cohort: labels, splits, graphs, compiles."""

    def __init__(self, spec):
        overrides = {"n_patients": spec.n_patients}
        config = CohortConfig.from_dict({**spec.cohort_config, **overrides})
        self.config = config
        self.cohort = generate_cohort(config)
        self.y = np.array([_class_of(r.outcome) for r in self.cohort], dtype=np.int64)
        self.ids = [r.id for r in self.cohort]
        self.quantiles = cohort_timestamp_quantiles(self.cohort)
        self._graphs = {}
        self._rgcn_compiled = {}
        self._entity_compiled = {}
        self._splits = {}
        self._tabular = None

    def split(self, seed):
        if seed not in self._splits:
            self._splits[seed] = make_split(self.y, seed)
        return self._splits[seed]

    def tabular(self):
        if self._tabular is None:
            self._tabular = encode_tabular(self.cohort, self.config)
        return self._tabular

    def graph(self, variant):
        variant = SchemaVariant.parse(variant)
        if variant not in self._graphs:
            self._graphs[variant] = build_cohort_graph(
                self.cohort, variant, timestamp_quantiles=self.quantiles)
        return self._graphs[variant]

    def rgcn_compiled(self, variant, use_literals=True):
        variant = SchemaVariant.parse(variant)
        key = (variant, use_literals)
        if key not in self._rgcn_compiled:
            graph = self.graph(variant)
            if not use_literals:
                graph = strip_literal_triples(graph)
            compiled = compile_rgcn_graph(graph)
            if compiled.patient_ids != self.ids:
                raise ConfigurationError(
                    "patient order in compiled graph does not match cohort order")
            self._rgcn_compiled[key] = compiled
        return self._rgcn_compiled[key]

    def entity_compiled(self, variant):
        variant = SchemaVariant.parse(variant)
        if variant not in self._entity_compiled:
            compiled = compile_entity_graph(strip_literal_triples(self.graph(variant)))
            if compiled.patient_ids != self.ids:
                raise ConfigurationError(
                    "patient order in compiled graph does not match cohort order")
            self._entity_compiled[variant] = compiled
        return self._entity_compiled[variant]


def _merged(defaults, overrides):
    out = dict(defaults)
    out.update(overrides or {})
    return out


class ExperimentRunner:
    """Runs cells with caching keyed by (cohort, params, model, variant, seed).

    Cohorts are shared between experiments with identical cohort configs,
    so the expensive graph builds happen once. Cell results are reused only
    when the model_params match too, since those change training outcomes.
    """

    def __init__(self):
        self._contexts = {}
        self._cells = {}

    def _context(self, spec):
        key = json.dumps({"config": spec.cohort_config, "n": spec.n_patients},
                         sort_keys=True)
        if key not in self._contexts:
            self._contexts[key] = _CohortContext(spec)
        return key, self._contexts[key]

    def cell_metrics(self, spec, model, variant, rep):
        ckey, ctx = self._context(spec)
        seed = spec.base_seed + rep
        pkey = json.dumps(spec.model_params, sort_keys=True)
        cache_key = (ckey, pkey, model, variant, seed)
        if cache_key not in self._cells:
            self._cells[cache_key] = self._run_cell(spec, ctx, model, variant, seed)
        return self._cells[cache_key]

    def _run_cell(self, spec, ctx, model, variant, seed):
        split = ctx.split(seed)
        mp = spec.model_params
        if model in TABULAR_MODELS:
            return self._run_tabular(ctx, model, mp, split, seed)
        if model in ("TransE", "RDF2Vec"):
            return self._run_embedding(ctx, model, variant, mp, split, seed)
        m = _RGCN_NAME.match(model)
        if m:
            return self._run_rgcn(ctx, int(m.group(1)), m.group(2) is not None,
                                  variant, mp, split, seed)
        raise ConfigurationError(f"unknown model name {model!r}")

    def _run_tabular(self, ctx, model, mp, split, seed):
        tab = ctx.tabular()
        X, _ = tab.standardized(split.train)
        y = tab.y
        if model == "LR":
            p = _merged({"epochs": 500, "lr": 0.01, "l2": 1e-4}, mp.get("lr"))
            fitted = train_logreg(X[split.train], y[split.train], seed=seed, **p)
        elif model == "RF":
            p = _merged({"trees": 100, "min_leaf": 2}, mp.get("rf"))
            fitted = train_rf(X[split.train], y[split.train], seed=seed, **p)
        else:
            p = _merged({"epochs": 200, "patience": 20}, mp.get("nn"))
            fitted = train_nn(X[split.train], y[split.train], seed=seed,
                              X_val=X[split.val], y_val=y[split.val], **p)
        probs = fitted.predict_proba(X[split.test])
        return classification_report(y[split.test], probs.argmax(axis=1), probs)

    def _embedding_config(self, model, mp, seed):
        defaults = {"dim": mp.get("dim", 100), "seed": seed}
        if model == "TransE":
            defaults.update({"epochs": 30, "batch_size": 4096})
            defaults.update(mp.get("transe") or {})
        else:
            defaults.update({"epochs": 2, "batch_size": 8192})
            defaults.update(mp.get("rdf2vec") or {})
        return TrainConfig(**defaults)

    def _run_embedding(self, ctx, model, variant, mp, split, seed):
        compiled = ctx.entity_compiled(variant)
        cfg = self._embedding_config(model, mp, seed)
        fitted = transe_train(compiled, cfg) if model == "TransE" else rdf2vec_train(compiled, cfg)
        emb = fitted.patient_matrix()
        y = ctx.y
        head_params = _merged({"epochs": 200, "patience": 20}, mp.get("nn"))
        head = train_nn(emb[split.train], y[split.train], seed=seed,
                        X_val=emb[split.val], y_val=y[split.val], **head_params)
        probs = head.predict_proba(emb[split.test])
        return classification_report(y[split.test], probs.argmax(axis=1), probs)

    def _run_rgcn(self, ctx, n_layers, use_literals, variant, mp, split, seed):
        compiled = ctx.rgcn_compiled(variant, use_literals)
        p = _merged({"epochs": 200, "patience": 20, "width": mp.get("dim", 100)},
                    mp.get("rgcn"))
        cfg = RGCNConfig(layers=n_layers, seed=seed, use_literals=use_literals, **p)
        y = ctx.y
        labels = {ctx.ids[i]: int(y[i]) for i in split.train}
        val_labels = {ctx.ids[i]: int(y[i]) for i in split.val}
        model = rgcn_train(compiled, labels, cfg, val_labels=val_labels)
        probs = model.probs[split.test]
        return classification_report(y[split.test], probs.argmax(axis=1), probs)


def run_experiments(specs, out_dir, runner=None):
    """Run experiment specs, write metrics.csv / summary.json, return summary."""
    runner = runner or ExperimentRunner()
    rows = []
    summary = {"tool_version": __version__, "experiments": []}
    for spec in specs:
        seeds = [spec.base_seed + r for r in range(spec.repetitions)]
        exp_entry = {"name": spec.name, "seeds": seeds, "cells": []}
        for cell in spec.cells:
            model, variant = cell["model"], cell["kg_variant"]
            raw = {m: [] for m in METRIC_COLUMNS}
            for rep in range(spec.repetitions):
                metrics = runner.cell_metrics(spec, model, variant, rep)
                rows.append((spec.name, model, variant, rep) +
                            tuple(metrics[m] for m in METRIC_COLUMNS))
                for m in METRIC_COLUMNS:
                    raw[m].append(metrics[m])
            agg = {}
            for m in METRIC_COLUMNS:
                vals = np.asarray(raw[m])
                std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
                agg[m] = {"mean": float(vals.mean()), "std": std}
            exp_entry["cells"].append({
                "model": model, "kg_variant": variant,
                "metrics": agg, "raw": raw,
            })
        summary["experiments"].append(exp_entry)

    os.makedirs(out_dir, exist_ok=True)
    metrics_path = os.path.join(out_dir, "metrics.csv")
    with open(metrics_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row[0], row[1], row[2], row[3]] +
                            [repr(float(v)) for v in row[4:]])
    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
        f.write("\n")

    config_blob = json.dumps(
        [{"name": s.name, "cohort_config": s.cohort_config, "cells": s.cells,
          "n_patients": s.n_patients, "repetitions": s.repetitions,
          "base_seed": s.base_seed, "model_params": s.model_params}
         for s in specs], sort_keys=True).encode()
    for path in (metrics_path, summary_path):
        write_manifest(path, config_blob, specs[0].base_seed if specs else 0)
    return summary


def write_manifest(artifact_path, config_blob, seed):
    """Sidecar manifest: artifact hash, config hash, seed, tool version."""
    if isinstance(config_blob, str):
        config_blob = config_blob.encode()
    with open(artifact_path, "rb") as f:
        digest = hashlib.sha256(f.read()).hexdigest()
    manifest = {
        "artifact": os.path.basename(artifact_path),
        "sha256": digest,
        "config_sha256": hashlib.sha256(config_blob).hexdigest(),
        "seed": seed,
        "tool_version": __version__,
    }
    path = artifact_path + ".manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return path


def run_experiment(spec, out_dir):
    """Single-spec convenience wrapper around run_experiments."""
    return run_experiments([spec], out_dir)
