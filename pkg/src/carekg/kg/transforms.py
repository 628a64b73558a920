"""Graph rewrites: temporal-order saturation, systematic inverse assertion,
and the rank-based quantile transform for timestamp spreading."""

import numpy as np
from scipy.stats import rankdata

from ..errors import RuleError, UsageError
from ..rdf import IRI, Triple
from .namespaces import TIME_BEFORE, INVERSE_SUFFIX

_BEFORE = IRI(TIME_BEFORE)


def _before_edges(graph):
    return [(t.s, t.o) for t in graph.with_predicate(_BEFORE)]


def _check_acyclic(edges):
    # Kahn's algorithm over the temporal-order subgraph
    succ = {}
    indeg = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, indeg.get(a, 0))
    queue = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for m in succ.get(n, ()):
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    if seen != len(indeg):
        raise RuleError("time:before edges contain a cycle; temporal order must be acyclic")


def saturate(graph, k):
    """Apply the rule before(a,b) AND before(b,c) => before(a,c) k times.

    Each application composes only the edges present when the round starts,
    so a 4-event chain grows 3 -> 5 -> 6 edges for k = 0, 1, 2.
    """
    if k < 0:
        raise UsageError("saturation count must be >= 0")
    edges = set(_before_edges(graph))
    _check_acyclic(edges)
    if k == 0:
        return graph
    current = set(edges)
    for _ in range(k):
        out_by_src = {}
        for a, b in current:
            out_by_src.setdefault(a, []).append(b)
        new = set()
        for a, b in current:
            for c in out_by_src.get(b, ()):
                if a != c:
                    new.add((a, c))
        before_count = len(current)
        current |= new
        if len(current) == before_count:
            break
    added = current - edges
    return graph.replace_triples(
        list(graph.triples) + [Triple(a, _BEFORE, b) for a, b in added]
    )


def add_inverses(graph):
    """Assert (o, p-inv, s) for every IRI-object triple; literal triples are
    untouched and predicates already carrying the inverse suffix are skipped,
    so the operation is idempotent."""
    extra = []
    for t in graph.triples:
        if isinstance(t.o, IRI) and not t.p.value.endswith(INVERSE_SUFFIX):
            extra.append(Triple(t.o, IRI(t.p.value + INVERSE_SUFFIX), t.s))
    return graph.replace_triples(list(graph.triples) + extra)


def quantile_transform(values):
    """Map values to [0,1] via (average rank - 1) / (n - 1).

    Ties share their average rank; a single value or an all-equal list maps
    to 0.5. Order-preserving on distinct values.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise UsageError("quantile_transform needs a nonempty list")
    if arr.size == 1 or np.all(arr == arr[0]):
        return np.full(arr.shape, 0.5)
    ranks = rankdata(arr, method="average")
    return (ranks - 1.0) / (arr.size - 1.0)
