"""Acceptance suite: one test per shipped guarantee, run at desk scale.

Each criterion below is a single test with its tolerance and time budget
asserted inline, so `pytest -v` prints one pass/fail line per guarantee:

  a1  temporal saturation matches a brute-force closure oracle, exactly
  a2  reverse-mode gradients match central finite differences, <1e-4
  a3  AUC and F1 match quadratic pair-counting / hand-computed oracles
  a4  the 10,000-patient cohort hits its outcome mix and KS marginals
  a5  graph models beat tabular baselines by the promised AUC margin
  a6  literal ablation and time-variant band behave as promised
  a7  the schema comparison shows the promised representation gap
  a8  re-running an experiment spec reproduces metrics.csv byte for byte

The full-scale experiment runs (a5-a7) share one session fixture that
executes the three shipped experiment specs exactly as `carekg run` would.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from carekg.autodiff import (add, backward, concat_rows, constant, gather_rows,
                             l1_norm, matmul, mean, mul, parameter, relu,
                             rowdot, scatter_add_rows, softmax_cross_entropy,
                             sub)
from carekg.evalharness import auc_ovr_macro, f1_scores
from carekg.evalharness.experiments import ExperimentSpec, run_experiments
from carekg.kg import saturate
from carekg.kg.namespaces import PATIENT_NS, TIME_BEFORE
from carekg.models import RGCNConfig, compile_rgcn_graph, encode_literal
from carekg.models.rgcn import _forward_logits, init_rgcn_params
from carekg.pathway import CohortConfig, generate_cohort, validate_cohort
from carekg.rdf import Graph, IRI, Literal, Triple, XSD_DECIMAL

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXPERIMENT_DIR = os.path.join(REPO, "configs", "experiments")

OUTCOME_TARGETS = {"BackHome": 0.4414, "Rehabilitation": 0.4333, "Death": 0.1253}

_BEFORE = IRI(TIME_BEFORE)


# ---------------------------------------------------------------- fixtures

@pytest.fixture(scope="session")
def table_runs(tmp_path_factory):
    """Execute the three shipped experiment specs, timing each run."""
    runs = {}
    for name in ("table1", "table3", "table2"):
        spec = ExperimentSpec.from_file(
            os.path.join(EXPERIMENT_DIR, f"{name}.json"))
        out_dir = str(tmp_path_factory.mktemp(name))
        t0 = time.perf_counter()
        run_experiments([spec], out_dir)
        elapsed = time.perf_counter() - t0
        with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as f:
            summary = json.load(f)
        exp = next(e for e in summary["experiments"] if e["name"] == name)
        runs[name] = {"exp": exp, "elapsed": elapsed, "dir": out_dir}
    return runs


def _mean_auc(exp, model, variant):
    for cell in exp["cells"]:
        if cell["model"] == model and cell["kg_variant"] == variant:
            return cell["metrics"]["auc"]["mean"]
    raise AssertionError(f"no cell {model} / {variant}")


# ------------------------------------------------------------- a1 .. a4

def test_a1_saturation_matches_closure_oracle():
    t0 = time.perf_counter()

    def chain(n):
        nodes = [IRI(f"http://x/{i}") for i in range(n)]
        return Graph([Triple(a, _BEFORE, b) for a, b in zip(nodes, nodes[1:])])

    def before_pairs(graph):
        return {(t.s, t.o) for t in graph.with_predicate(_BEFORE)}

    def closure(pairs):
        closed = set(pairs)
        while True:
            new = {(a, d) for (a, b) in closed for (c, d) in closed
                   if b == c and a != d}
            if new <= closed:
                return closed
            closed |= new

    # four-event chain: 3 base edges, then 5, then the full 6
    g4 = chain(4)
    assert len(before_pairs(saturate(g4, 0))) == 3
    assert len(before_pairs(saturate(g4, 1))) == 5
    assert len(before_pairs(saturate(g4, 2))) == 6

    for n in range(2, 11):
        g = chain(n)
        pairs = before_pairs(saturate(g, n))
        assert len(pairs) == n * (n - 1) // 2
        assert pairs == closure(before_pairs(g))

    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"saturation checks took {elapsed:.2f}s"


def _fd_check(build_loss, tensors, rng, max_coords=12):
    """Compare reverse-mode gradients against central differences.

    Returns the worst relative error over the sampled coordinates, using
    |ad - fd| / max(1, |ad|, |fd|) so tiny gradients are compared on an
    absolute scale.
    """
    grads = backward(build_loss(), tensors)
    worst = 0.0
    for t, g in zip(tensors, grads):
        flat = t.value.reshape(-1)
        gflat = np.asarray(g).reshape(-1)
        k = min(max_coords, flat.size)
        for i in rng.choice(flat.size, size=k, replace=False):
            old = flat[i]
            step = 1e-6 * max(1.0, abs(old))
            flat[i] = old + step
            hi = float(build_loss().value)
            flat[i] = old - step
            lo = float(build_loss().value)
            flat[i] = old
            fd = (hi - lo) / (2.0 * step)
            ad = float(gflat[i])
            err = abs(ad - fd) / max(1.0, abs(ad), abs(fd))
            worst = max(worst, err)
    return worst


def _transe_margin_instance(rng):
    n_ent = int(rng.integers(5, 10))
    n_rel = int(rng.integers(2, 4))
    dim = int(rng.integers(2, 5))
    m = int(rng.integers(3, 7))
    ent = parameter(rng.normal(0.0, 0.7, size=(n_ent, dim)))
    rel = parameter(rng.normal(0.0, 0.7, size=(n_rel, dim)))
    h = rng.integers(0, n_ent, size=m)
    r = rng.integers(0, n_rel, size=m)
    t = rng.integers(0, n_ent, size=m)
    h_neg = rng.integers(0, n_ent, size=m)
    t_neg = rng.integers(0, n_ent, size=m)
    margin = constant(np.full((m, 1), 1.0))

    def build():
        pos = l1_norm(sub(add(gather_rows(ent, h), gather_rows(rel, r)),
                          gather_rows(ent, t)))
        neg = l1_norm(sub(add(gather_rows(ent, h_neg), gather_rows(rel, r)),
                          gather_rows(ent, t_neg)))
        return mean(relu(add(margin, sub(pos, neg))))

    return build, [ent, rel]


def _cbow_instance(rng):
    n_tokens = int(rng.integers(6, 12))
    dim = int(rng.integers(2, 5))
    b = int(rng.integers(2, 6))
    k = int(rng.integers(1, 4))
    emb_in = parameter(rng.normal(0.0, 0.6, size=(n_tokens, dim)))
    emb_out = parameter(rng.normal(0.0, 0.6, size=(n_tokens, dim)))
    n_ctx = rng.integers(1, 4, size=b)
    gather_idx = rng.integers(0, n_tokens, size=int(n_ctx.sum()))
    local_owner = np.repeat(np.arange(b), n_ctx)
    targets = rng.integers(0, n_tokens, size=b)
    neg = rng.integers(0, n_tokens, size=b * k)
    labels = np.concatenate([np.zeros(b, dtype=np.int64),
                             np.ones(b * k, dtype=np.int64)])
    inv = constant((1.0 / n_ctx).reshape(-1, 1))
    two_col = constant(np.array([[1.0, 0.0]]))

    def build():
        h = mul(scatter_add_rows(gather_rows(emb_in, gather_idx),
                                 local_owner, b), inv)
        s_pos = rowdot(h, gather_rows(emb_out, targets))
        h_rep = gather_rows(h, np.repeat(np.arange(b), k))
        s_neg = rowdot(h_rep, gather_rows(emb_out, neg))
        logits = matmul(concat_rows(s_pos, s_neg), two_col)
        return softmax_cross_entropy(logits, labels)

    return build, [emb_in, emb_out]


def _literal_encoder_instance(rng):
    m = int(rng.integers(3, 8))
    d = int(rng.integers(2, 6))
    values = rng.normal(0.0, 1.2, size=m)
    lit_w = parameter(rng.normal(0.0, 0.8, size=(1, d)))
    lit_b = parameter(rng.normal(0.0, 0.8, size=(1, d)))
    head = parameter(rng.normal(0.0, 0.8, size=(d, 3)))
    y = rng.integers(0, 3, size=m)

    def build():
        return softmax_cross_entropy(
            matmul(encode_literal(values, lit_w, lit_b), head), y)

    return build, [lit_w, lit_b, head]


def _rgcn_instance(rng, seed):
    concepts = [IRI(f"http://x/c{j}") for j in range(3)]
    link = IRI("http://x/p")
    has_val = IRI("http://x/val")
    triples, roles, y = [], {}, []
    n = 9
    for i in range(n):
        pat = IRI(f"{PATIENT_NS}p{i:02d}")
        roles[pat] = "patient"
        cls = i % 3
        y.append(cls)
        triples.append(Triple(pat, link, concepts[cls]))
        triples.append(Triple(concepts[cls], link, pat))
        triples.append(Triple(pat, has_val,
                              Literal(repr(cls + rng.normal(0.0, 0.3)),
                                      XSD_DECIMAL)))
    compiled = compile_rgcn_graph(Graph(triples, roles=roles))
    cfg = RGCNConfig(layers=2, width=4, hidden=(4,), bases=2, seed=seed,
                     use_literals=True)
    params = init_rgcn_params(compiled, cfg)
    labels = np.array(y, dtype=np.int64)[
        [int(pid[1:]) for pid in compiled.patient_ids]]

    def build():
        return softmax_cross_entropy(_forward_logits(compiled, params), labels)

    return build, params.tensors()


def test_a2_gradients_match_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240501)
    instances = 0
    worst = 0.0
    for _ in range(30):
        build, tensors = _transe_margin_instance(rng)
        worst = max(worst, _fd_check(build, tensors, rng))
        instances += 1
    for _ in range(30):
        build, tensors = _cbow_instance(rng)
        worst = max(worst, _fd_check(build, tensors, rng))
        instances += 1
    for _ in range(25):
        build, tensors = _literal_encoder_instance(rng)
        worst = max(worst, _fd_check(build, tensors, rng))
        instances += 1
    for i in range(20):
        build, tensors = _rgcn_instance(rng, seed=i)
        worst = max(worst, _fd_check(build, tensors, rng, max_coords=8))
        instances += 1
    elapsed = time.perf_counter() - t0
    assert instances >= 100
    assert worst < 1e-4, f"worst gradient relative error {worst:.2e}"
    assert elapsed < 60.0, f"gradient checks took {elapsed:.1f}s"


def _pair_count_auc(y_true, probs, n_classes=3):
    aucs = []
    for k in range(n_classes):
        pos = [p[k] for y, p in zip(y_true, probs) if y == k]
        neg = [p[k] for y, p in zip(y_true, probs) if y != k]
        if not pos or not neg:
            continue
        score = 0.0
        for a in pos:
            for b in neg:
                score += 1.0 if a > b else (0.5 if a == b else 0.0)
        aucs.append(score / (len(pos) * len(neg)))
    return float(np.mean(aucs))


def test_a3_metric_oracles_agree():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    for trial in range(400):
        n = int(rng.integers(3, 21))
        y = np.concatenate([np.arange(3), rng.integers(0, 3, size=max(n - 3, 0))])
        rng.shuffle(y)
        if trial % 2 == 0:
            probs = rng.random((y.size, 3))
        else:
            probs = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=(y.size, 3))
        probs /= np.maximum(probs.sum(axis=1, keepdims=True), 1e-12)
        assert auc_ovr_macro(y, probs) == _pair_count_auc(y, probs)

    perfect = f1_scores([0, 1, 2, 1], [0, 1, 2, 1])
    assert perfect["per_class"].tolist() == [1.0, 1.0, 1.0]
    assert perfect["accuracy"] == 1.0

    lumped = f1_scores([0, 1, 2] * 4, [0] * 12)
    assert lumped["accuracy"] == pytest.approx(1.0 / 3.0)
    assert lumped["per_class"][0] == pytest.approx(0.5)
    assert lumped["per_class"][1] == 0.0 and lumped["per_class"][2] == 0.0
    assert lumped["f1_macro"] == pytest.approx(1.0 / 6.0)

    absent = f1_scores([0, 0, 1, 1], [0, 0, 1, 1])
    assert absent["per_class"][2] == 0.0

    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"metric oracles took {elapsed:.1f}s"


def test_a4_cohort_proportions_and_marginals():
    t0 = time.perf_counter()
    with open(os.path.join(REPO, "configs", "default_cohort.json"),
              encoding="utf-8") as f:
        doc = json.load(f)
    assert doc["n_patients"] == 10000
    config = CohortConfig.from_dict(doc)
    cohort = generate_cohort(config)
    report = validate_cohort(cohort, config, alpha=0.01)

    for outcome, target in OUTCOME_TARGETS.items():
        got = report["outcomes"][outcome]
        assert abs(got - target) <= 0.010, (
            f"{outcome}: {got:.4f} vs {target:.4f}")
    assert report["features"], "no numeric marginals were tested"
    for name, row in report["features"].items():
        assert row["pass"], (
            f"KS failed for {name}: D={row['statistic']:.4f} "
            f"> {row['critical']:.4f}")

    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"cohort validation took {elapsed:.1f}s"


# ------------------------------------------------------------- a5 .. a7

def test_a5_graph_model_beats_tabular_baselines(table_runs):
    exp = table_runs["table1"]["exp"]
    best_tabular = max(_mean_auc(exp, m, "tabular") for m in ("LR", "RF", "NN"))
    rgcn = _mean_auc(exp, "RGCN3+lit", "SPHN-tr")
    assert rgcn >= best_tabular + 0.05, (
        f"RGCN3+lit {rgcn:.4f} vs best tabular {best_tabular:.4f}")
    for model in ("TransE", "RDF2Vec"):
        auc = _mean_auc(exp, model, "SPHN-tr")
        assert 0.45 <= auc <= 0.60, f"{model} mean AUC {auc:.4f}"
    budget = table_runs["table1"]["elapsed"] + table_runs["table3"]["elapsed"]
    assert budget <= 1200.0, f"table1+table3 took {budget:.0f}s"


def test_a6_literal_ablation_and_time_band(table_runs):
    exp = table_runs["table3"]["exp"]
    nl = _mean_auc(exp, "RGCN3", "SPHN-nl")
    nt = _mean_auc(exp, "RGCN3+lit", "SPHN-nt")
    assert nt - nl >= 0.10, f"literal ablation gap {nt - nl:.4f}"
    band = {v: _mean_auc(exp, "RGCN3+lit", f"SPHN-{v}")
            for v in ("ts", "tr", "tsr", "sat1", "sat2")}
    spread = max(band.values()) - min(band.values())
    assert spread <= 0.03, f"time variants spread {spread:.4f}: {band}"
    for variant, auc in band.items():
        assert auc >= nt - 0.01, f"SPHN-{variant} {auc:.4f} below nt {nt:.4f}"


def test_a7_schema_representation_gap(table_runs):
    exp = table_runs["table2"]["exp"]
    sphn = _mean_auc(exp, "RGCN3+lit", "SPHN-ts")
    caresm3 = _mean_auc(exp, "RGCN3+lit", "CARESM*-ts")
    caresm5 = _mean_auc(exp, "RGCN5+lit", "CARESM*-ts")
    assert sphn - caresm3 >= 0.05, f"schema gap {sphn - caresm3:.4f}"
    assert caresm5 <= sphn, (
        f"5-layer CARESM {caresm5:.4f} exceeds SPHN {sphn:.4f}")
    assert table_runs["table2"]["elapsed"] <= 600.0, (
        f"table2 took {table_runs['table2']['elapsed']:.0f}s")


# ------------------------------------------------------------------ a8

_RERUN_DRIVER = (
    "import sys\n"
    "from carekg.evalharness.experiments import ExperimentSpec, run_experiments\n"
    "run_experiments([ExperimentSpec.from_file(sys.argv[1])], sys.argv[2])\n"
)


def test_a8_rerun_reproduces_metrics_byte_for_byte(tmp_path):
    """Every model family re-executed in a fresh process, identical seeds."""
    with open(os.path.join(REPO, "configs", "default_cohort.json"),
              encoding="utf-8") as f:
        cohort_doc = json.load(f)
    cohort_path = tmp_path / "cohort_config.json"
    cohort_path.write_text(json.dumps(cohort_doc), encoding="utf-8")
    spec = {
        "name": "determinism",
        "cohort_config": str(cohort_path),
        "n_patients": 240,
        "repetitions": 2,
        "base_seed": 700,
        "model_params": {
            "dim": 8,
            "transe": {"epochs": 2, "batch_size": 512},
            "rdf2vec": {"epochs": 1, "max_windows": 30000, "batch_size": 512},
            "rgcn": {"epochs": 4, "patience": 4, "hidden": [8]},
            "nn": {"epochs": 10, "patience": 5},
            "lr": {"epochs": 20},
            "rf": {"trees": 25},
        },
        "cells": [
            {"model": "LR", "kg_variant": "tabular"},
            {"model": "RF", "kg_variant": "tabular"},
            {"model": "NN", "kg_variant": "tabular"},
            {"model": "TransE", "kg_variant": "SPHN-tr"},
            {"model": "RDF2Vec", "kg_variant": "SPHN-tr"},
            {"model": "RGCN2", "kg_variant": "SPHN-nl"},
            {"model": "RGCN2+lit", "kg_variant": "SPHN-ts"},
            {"model": "RGCN2+lit", "kg_variant": "CARESM*-ts"},
        ],
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec), encoding="utf-8")

    outputs = []
    for run in ("first", "second"):
        out_dir = tmp_path / run
        proc = subprocess.run(
            [sys.executable, "-c", _RERUN_DRIVER, str(spec_path), str(out_dir)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr[-2000:]
        outputs.append(out_dir)

    first = (outputs[0] / "metrics.csv").read_bytes()
    second = (outputs[1] / "metrics.csv").read_bytes()
    assert first == second, "metrics.csv differs between identical runs"
    assert (outputs[0] / "summary.json").read_bytes() == \
        (outputs[1] / "summary.json").read_bytes()
