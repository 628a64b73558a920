"""Turn an RDF graph into the dense index structures the models consume.

Two compiled forms exist. Entity graphs drop literal triples entirely and
expose triple arrays plus an out-edge CSR (what TransE and the walk
generator need). RGCN graphs keep literal nodes as first-class rows and
precompute one row-normalized adjacency matrix per relation.
"""

import numpy as np
from scipy import sparse

from ..autodiff import StackedAdjacency
from ..errors import UsageError
from ..kg.namespaces import PATIENT_NS
from ..rdf import IRI, Literal
from ..rdf.terms import XSD_DECIMAL, XSD_INTEGER


def strip_literal_triples(graph):
    """Return a copy of the graph without literal-object triples.

    Models that cannot consume literal values (TransE, RDF2Vec) train on
    this reduced graph; structural triples are untouched.
    """
    kept = [t for t in graph.triples if isinstance(t.o, IRI)]
    return graph.replace_triples(kept)


def _patient_entities(graph):
    """Sorted patient IRIs, from roles when available, else by namespace."""
    tagged = [n for n, role in graph.roles().items() if role == "patient"]
    if tagged:
        return sorted(tagged)
    return sorted(n for n in graph.nodes()
                  if isinstance(n, IRI) and n.value.startswith(PATIENT_NS))


class CompiledEntityGraph:
    """Integer-indexed form of a literal-free graph.

    Attributes:
        entities: sorted list of IRI nodes; index = position.
        relations: sorted list of predicate IRI values.
        heads, rels, tails: int arrays, one row per triple.
        out_indptr, out_pred, out_tail: CSR out-edge lists per node,
            used by the walk sampler.
        patient_rows: entity indices of patient nodes, sorted by IRI.
        patient_ids: record identifiers aligned with patient_rows.
    """

    def __init__(self, graph):
        triples = [t for t in graph.triples if isinstance(t.o, IRI)]
        ents = sorted({t.s for t in triples} | {t.o for t in triples},
                      key=lambda n: n.value)
        self.entities = ents
        self.entity_index = {n: i for i, n in enumerate(ents)}
        preds = sorted({t.p.value for t in triples})
        self.relations = preds
        self.relation_index = {p: i for i, p in enumerate(preds)}

        n, m = len(ents), len(triples)
        self.heads = np.empty(m, dtype=np.int64)
        self.rels = np.empty(m, dtype=np.int64)
        self.tails = np.empty(m, dtype=np.int64)
        for k, t in enumerate(triples):
            self.heads[k] = self.entity_index[t.s]
            self.rels[k] = self.relation_index[t.p.value]
            self.tails[k] = self.entity_index[t.o]

        order = np.argsort(self.heads, kind="stable")
        counts = np.bincount(self.heads, minlength=n)
        self.out_indptr = np.concatenate([[0], np.cumsum(counts)])
        self.out_pred = self.rels[order]
        self.out_tail = self.tails[order]

        patients = _patient_entities(graph)
        self.patient_rows = np.array(
            [self.entity_index[p] for p in patients if p in self.entity_index],
            dtype=np.int64)
        self.patient_ids = [p.value[len(PATIENT_NS):] if p.value.startswith(PATIENT_NS)
                            else p.value
                            for p in patients if p in self.entity_index]

    @property
    def n_entities(self):
        return len(self.entities)

    @property
    def n_relations(self):
        return len(self.relations)


def compile_entity_graph(graph):
    g = CompiledEntityGraph(graph)
    if g.n_entities == 0:
        raise UsageError("graph has no entity-to-entity triples to compile")
    return g


def _literal_value(lit):
    """Numeric value of a literal node; required for the literal encoder."""
    if lit.datatype in (XSD_DECIMAL, XSD_INTEGER):
        return float(lit.lexical)
    try:
        return float(lit.lexical)
    except ValueError:
        raise UsageError(
            f"literal node {lit.lexical!r} ({lit.datatype}) has no numeric value; "
            "cannot build an initial embedding for it")


class CompiledRGCNGraph:
    """Node- and relation-indexed form of a full graph for RGCN training.

    Node ids: entity nodes first (sorted by IRI), then literal nodes
    (sorted by datatype then lexical form). Per relation r the matrix
    adj[r] is row-normalized so that row i holds 1/deg_r(i) at each
    column j with a triple (i, r, j); multiplying adj[r] @ H therefore
    averages neighbor states into the subject node.
    """

    def __init__(self, graph):
        nodes = graph.nodes()
        self.entities = [n for n in nodes if isinstance(n, IRI)]
        self.literals = [n for n in nodes if isinstance(n, Literal)]
        self.n_entities = len(self.entities)
        self.n_literals = len(self.literals)
        self.n_nodes = self.n_entities + self.n_literals
        self.node_index = {n: i for i, n in enumerate(self.entities)}
        for j, lit in enumerate(self.literals):
            self.node_index[lit] = self.n_entities + j

        self.relations = [p.value for p in graph.predicates()]
        self.relation_index = {p: i for i, p in enumerate(self.relations)}

        values = np.array([_literal_value(l) for l in self.literals], dtype=np.float64)
        self.literal_values = values
        self.literal_inputs = self._standardize_literals(graph, values)

        self.adj = self._build_adjacency(graph)
        self.stacked = StackedAdjacency(self.adj)

        patients = _patient_entities(graph)
        self.patient_rows = np.array([self.node_index[p] for p in patients],
                                     dtype=np.int64)
        self.patient_ids = [p.value[len(PATIENT_NS):] if p.value.startswith(PATIENT_NS)
                            else p.value for p in patients]

    def _standardize_literals(self, graph, values):
        """Center and scale literal values within predicate groups.

        Values reaching the encoder span wildly different ranges (ages in
        the tens, relative times inside the unit interval). Each literal
        node is assigned to the first predicate that references it and
        standardized against that group, so every group lands in the
        active range of the tanh encoder. Constant groups map to zero.
        """
        if not self.literals:
            return values.reshape(0, 1)
        group_of = np.zeros(self.n_literals, dtype=np.int64)
        for j, lit in enumerate(self.literals):
            preds = sorted({t.p.value for t in graph.with_object(lit)})
            group_of[j] = self.relation_index[preds[0]]
        out = np.zeros_like(values)
        for g in np.unique(group_of):
            mask = group_of == g
            mu = values[mask].mean()
            sd = values[mask].std()
            if sd < 1e-12:
                out[mask] = 0.0
            else:
                out[mask] = (values[mask] - mu) / sd
        return out.reshape(-1, 1)

    def _build_adjacency(self, graph):
        n = self.n_nodes
        rows = [[] for _ in self.relations]
        cols = [[] for _ in self.relations]
        for t in graph.triples:
            r = self.relation_index[t.p.value]
            rows[r].append(self.node_index[t.s])
            cols[r].append(self.node_index[t.o])
        mats = []
        for r in range(len(self.relations)):
            ri = np.asarray(rows[r], dtype=np.int64)
            ci = np.asarray(cols[r], dtype=np.int64)
            deg = np.bincount(ri, minlength=n).astype(np.float64)
            data = 1.0 / deg[ri]
            mats.append(sparse.csr_matrix((data, (ri, ci)), shape=(n, n)))
        return mats

    @property
    def n_relations(self):
        return len(self.relations)


def compile_rgcn_graph(graph):
    g = CompiledRGCNGraph(graph)
    if g.n_nodes == 0:
        raise UsageError("graph has no nodes to compile")
    return g
