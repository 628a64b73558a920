"""Embedding models and the graph network: shapes, identities, training."""

import numpy as np
import pytest

from carekg.autodiff import constant, parameter
from carekg.errors import UsageError
from carekg.kg.namespaces import PATIENT_NS
from carekg.models import (RGCNConfig, TrainConfig, compile_rgcn_graph,
                           encode_literal, export_embeddings, load_checkpoint,
                           random_walks, rdf2vec_train, rgcn_forward, rgcn_train,
                           save_checkpoint, transe_score, transe_train)
from carekg.models.rgcn import init_rgcn_params
from carekg.rdf import Graph, IRI, Literal, Triple, XSD_DECIMAL

P = IRI("http://x/p")
Q = IRI("http://x/q")


def node(name):
    return IRI(f"http://x/{name}")


def patient(i):
    return IRI(f"{PATIENT_NS}p{i:02d}")


def toy_patient_graph(n=24, literals=False, seed=0):
    """n patients, each wired to the concept node matching its class."""
    rng = np.random.default_rng(seed)
    concepts = [node("backhome"), node("rehab"), node("death")]
    triples = []
    roles = {}
    labels = {}
    for i in range(n):
        cls = i % 3
        pat = patient(i)
        roles[pat] = "patient"
        triples.append(Triple(pat, P, concepts[cls]))
        triples.append(Triple(concepts[cls], Q, pat))
        if literals:
            value = cls + rng.normal(0.0, 0.05)
            triples.append(Triple(pat, IRI("http://x/val"),
                                  Literal(repr(value), XSD_DECIMAL)))
        labels[f"p{i:02d}"] = cls
    return Graph(triples, roles=roles), labels


def test_transe_score_is_l1_translation_distance():
    assert transe_score([1.0, 0.0], [0.5, 0.5], [1.0, 1.0]) == pytest.approx(1.0)
    batch = transe_score(np.zeros((2, 2)), np.ones((2, 2)), np.zeros((2, 2)))
    np.testing.assert_allclose(batch, [2.0, 2.0])


def test_transe_training_learns_translations():
    g, _ = toy_patient_graph(18)
    cfg = TrainConfig(epochs=40, dim=8, seed=3, batch_size=64, lr=0.05)
    model = transe_train(g, cfg)
    assert model.entity_emb.shape == (len(model.entities), 8)
    assert model.patient_matrix().shape == (18, 8)
    assert model.epoch_losses[-1] < model.epoch_losses[0]
    # a true triple should sit closer than a corrupted one on average
    true_scores, fake_scores = [], []
    for t in g.triples:
        if t.p != P:
            continue
        true_scores.append(model.score_triple(t.s, t.p.value, t.o))
        fake_scores.append(model.score_triple(t.s, t.p.value, node("death")
                                              if not t.o.value.endswith("death")
                                              else node("rehab")))
    assert np.mean(true_scores) < np.mean(fake_scores)


def test_transe_is_deterministic_per_seed():
    g, _ = toy_patient_graph(12)
    cfg = TrainConfig(epochs=5, dim=4, seed=9, batch_size=32)
    a = transe_train(g, cfg)
    b = transe_train(g, cfg)
    np.testing.assert_array_equal(a.entity_emb, b.entity_emb)
    c = transe_train(g, TrainConfig(epochs=5, dim=4, seed=10, batch_size=32))
    assert not np.array_equal(a.entity_emb, c.entity_emb)


def test_random_walks_alternate_nodes_and_predicates():
    g, _ = toy_patient_graph(6)
    walks = random_walks(g, TrainConfig(walks=4, depth=2, seed=1))
    assert walks
    nodes = {e.value for e in g.nodes() if isinstance(e, IRI)}
    preds = {p.value for p in g.predicates()}
    for walk in walks:
        assert walk[0] in nodes
        for i, tok in enumerate(walk):
            assert tok in (nodes if i % 2 == 0 else preds)


def test_rdf2vec_patient_matrix_and_vectors():
    g, _ = toy_patient_graph(12)
    cfg = TrainConfig(epochs=3, dim=6, seed=2, walks=6, depth=2, batch_size=256)
    model = rdf2vec_train(g, cfg)
    assert model.patient_matrix().shape == (12, 6)
    first = model.entities[0]
    np.testing.assert_array_equal(model.vector(first), model.emb[0])
    again = rdf2vec_train(g, cfg)
    np.testing.assert_array_equal(model.emb, again.emb)


def test_layer_dims_variants():
    assert RGCNConfig(layers=3, width=100).layer_dims() == \
        [(100, 64), (64, 32), (32, 3)]
    assert RGCNConfig(layers=3, width=32, hidden=(32, 32)).layer_dims() == \
        [(32, 32), (32, 32), (32, 3)]
    # a short hidden tuple repeats its last width for deeper networks
    assert RGCNConfig(layers=5, width=20, hidden=(20, 20)).layer_dims() == \
        [(20, 20), (20, 20), (20, 20), (20, 20), (20, 3)]
    assert RGCNConfig(layers=1, width=7).layer_dims() == [(7, 3)]
    with pytest.raises(UsageError):
        RGCNConfig(layers=0).layer_dims()
    with pytest.raises(UsageError):
        RGCNConfig(layers=2, hidden=(8, 8)).layer_dims()


def test_encode_literal_is_a_tanh_bank():
    values = np.array([[0.5], [-1.0]])
    lit_w = constant(np.array([[1.0, 2.0, 0.5]]))
    lit_b = constant(np.array([[0.0, 1.0, -1.0]]))
    out = encode_literal(values.ravel(), lit_w, lit_b)
    np.testing.assert_allclose(out.value, np.tanh(values @ lit_w.value + lit_b.value))


def softmax_rows(z):
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def test_single_layer_forward_sums_neighbor_and_self():
    # 2-node graph with identity weights: h_a' = x_b + x_a
    a, b = node("a"), node("b")
    g = Graph([Triple(a, P, b), Triple(b, P, a)],
              roles={a: "patient", b: "patient"})
    compiled = compile_rgcn_graph(g)
    cfg = RGCNConfig(layers=1, width=3, n_classes=3, bases=1, seed=0,
                     use_literals=False)
    params = init_rgcn_params(compiled, cfg)
    x = np.array([[1.0, 2.0, 3.0], [10.0, 20.0, 30.0]])
    params.entity_table.value[:] = x
    layer = params.layers[0]
    layer.bases[0].value[:] = np.eye(3)
    layer.coeffs.value[:] = 1.0
    layer.w0.value[:] = np.eye(3)
    probs = rgcn_forward(compiled, params)
    ia, ib = compiled.node_index[a], compiled.node_index[b]
    want = softmax_rows(np.array([x[ib] + x[ia], x[ia] + x[ib]]))
    got = {pid: probs[k] for k, pid in enumerate(compiled.patient_ids)}
    np.testing.assert_allclose(got[a.value], want[0], atol=1e-12)
    np.testing.assert_allclose(got[b.value], want[1], atol=1e-12)


def test_bases_never_exceed_relations():
    g, _ = toy_patient_graph(6)
    compiled = compile_rgcn_graph(g)
    params = init_rgcn_params(compiled, RGCNConfig(layers=2, width=4, bases=16,
                                                   hidden=(4,), use_literals=False))
    assert len(params.layers[0].bases) == compiled.n_relations


def test_rgcn_learns_a_separable_toy_task():
    g, labels = toy_patient_graph(30)
    train = {k: v for k, v in list(labels.items())[:24]}
    val = {k: v for k, v in list(labels.items())[24:]}
    cfg = RGCNConfig(layers=2, width=8, hidden=(8,), epochs=60, patience=60,
                     seed=1, use_literals=False)
    model = rgcn_train(g, train, cfg, val_labels=val)
    assert model.probs.shape == (30, 3)
    predicted = model.probs.argmax(axis=1)
    truth = np.array([labels[pid] for pid in model.patient_ids])
    assert (predicted == truth).mean() >= 0.9
    assert model.best_epoch >= 0
    assert model.history[-1]["loss"] < model.history[0]["loss"]


def test_rgcn_is_deterministic_per_seed():
    g, labels = toy_patient_graph(15, literals=True)
    cfg = RGCNConfig(layers=2, width=6, hidden=(6,), epochs=4, seed=5)
    a = rgcn_train(g, labels, cfg)
    b = rgcn_train(g, labels, cfg)
    np.testing.assert_array_equal(a.probs, b.probs)


def test_literal_toggle_changes_the_model():
    g, labels = toy_patient_graph(15, literals=True)
    lit = rgcn_train(g, labels, RGCNConfig(layers=2, width=6, hidden=(6,),
                                           epochs=4, seed=5, use_literals=True))
    no_lit = rgcn_train(g, labels, RGCNConfig(layers=2, width=6, hidden=(6,),
                                              epochs=4, seed=5, use_literals=False))
    assert lit.params.entity_table.value.shape[0] > \
        no_lit.params.entity_table.value.shape[0] or \
        not np.array_equal(lit.probs, no_lit.probs)


@pytest.mark.parametrize("kind", ["transe", "rdf2vec", "rgcn"])
def test_checkpoint_round_trip_is_bit_exact(tmp_path, kind):
    g, labels = toy_patient_graph(12, literals=(kind == "rgcn"))
    if kind == "transe":
        model = transe_train(g, TrainConfig(epochs=3, dim=4, seed=1, batch_size=32))
    elif kind == "rdf2vec":
        model = rdf2vec_train(g, TrainConfig(epochs=2, dim=4, seed=1, walks=4,
                                             depth=2, batch_size=128))
    else:
        model = rgcn_train(g, labels, RGCNConfig(layers=2, width=4, hidden=(4,),
                                                 epochs=3, seed=1))
    path = tmp_path / f"{kind}.npz"
    save_checkpoint(model, str(path))
    back = load_checkpoint(str(path))
    if kind == "transe":
        np.testing.assert_array_equal(back.entity_emb, model.entity_emb)
        np.testing.assert_array_equal(back.relation_emb, model.relation_emb)
    elif kind == "rdf2vec":
        np.testing.assert_array_equal(back.emb, model.emb)
    else:
        np.testing.assert_array_equal(back.probs, model.probs)
        np.testing.assert_array_equal(back.params.entity_table.value,
                                      model.params.entity_table.value)
        for la, lb in zip(back.params.layers, model.params.layers):
            np.testing.assert_array_equal(la.coeffs.value, lb.coeffs.value)
            np.testing.assert_array_equal(la.w0.value, lb.w0.value)
    assert [str(e) for e in back.entities] == \
        [e if isinstance(e, str) else e.value for e in model.entities]


def test_export_embeddings_reads_back_exactly(tmp_path):
    g, _ = toy_patient_graph(10)
    model = transe_train(g, TrainConfig(epochs=2, dim=3, seed=2, batch_size=32))
    path = tmp_path / "emb.csv"
    export_embeddings(model, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "entity,dim_0,dim_1,dim_2"
    assert len(lines) == 1 + len(model.entities)
    values = np.array([[float(v) for v in line.split(",")[1:]]
                       for line in lines[1:]])
    np.testing.assert_array_equal(values, model.entity_emb)


def test_checkpoint_rejects_unknown_objects(tmp_path):
    with pytest.raises(UsageError):
        save_checkpoint(object(), str(tmp_path / "x.npz"))
