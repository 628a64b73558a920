"""RDF term model: IRIs, typed literals, triples, and an indexed graph.

Blank nodes are deliberately unsupported; upstream builders mint skolem IRIs
instead. Literal datatypes are restricted to the four kinds the pipeline
emits (decimal, integer, string, dateTime).
"""

from typing import NamedTuple, Union

from ..errors import UsageError

XSD = "http://www.w3.org/2001/XMLSchema#"
XSD_DECIMAL = XSD + "decimal"
XSD_INTEGER = XSD + "integer"
XSD_STRING = XSD + "string"
XSD_DATETIME = XSD + "dateTime"

ALLOWED_DATATYPES = frozenset({XSD_DECIMAL, XSD_INTEGER, XSD_STRING, XSD_DATETIME})

_IRI_FORBIDDEN = set(' \t\n\r<>"')


class IRI(NamedTuple):
    value: str

    def check(self):
        if not self.value or any(c in _IRI_FORBIDDEN for c in self.value):
            raise UsageError(f"invalid IRI: {self.value!r}")
        return self


class Literal(NamedTuple):
    lexical: str
    datatype: str = XSD_STRING

    def check(self):
        if self.datatype not in ALLOWED_DATATYPES:
            raise UsageError(f"unsupported literal datatype: {self.datatype!r}")
        return self


Term = Union[IRI, Literal]


class Triple(NamedTuple):
    s: IRI
    p: IRI
    o: Term

    def check(self):
        if not isinstance(self.s, IRI) or not isinstance(self.p, IRI):
            raise UsageError("triple subject and predicate must be IRIs")
        self.s.check()
        self.p.check()
        if not isinstance(self.o, (IRI, Literal)):
            raise UsageError("triple object must be an IRI or a Literal")
        self.o.check()
        return self


def _object_sort_key(o):
    # literals and IRIs interleave deterministically via their serialized form
    if isinstance(o, IRI):
        return ("i", o.value, "")
    return ("l", o.lexical, o.datatype)


def triple_sort_key(t):
    return (t.s.value, t.p.value) + _object_sort_key(t.o)


class Graph:
    """Immutable duplicate-free triple container with lazy indexes.

    Triples are stored in the canonical (subject, predicate, object) sort
    order, so iteration is deterministic for equal graphs. ``roles`` tags
    nodes with their pipeline role (patient, event, concept, literal);
    untagged nodes report None.
    """

    __slots__ = ("triples", "_roles", "_by_s", "_by_p", "_by_o", "_nodes")

    def __init__(self, triples=(), roles=None, _checked=False):
        uniq = set(triples)
        if not _checked:
            for t in uniq:
                t.check()
        self.triples = tuple(sorted(uniq, key=triple_sort_key))
        self._roles = dict(roles) if roles else {}
        self._by_s = None
        self._by_p = None
        self._by_o = None
        self._nodes = None

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __contains__(self, t):
        return t in self._subject_index().get(t.s, ()) if isinstance(t, Triple) else False

    def __eq__(self, other):
        return isinstance(other, Graph) and self.triples == other.triples

    def __hash__(self):
        return hash(self.triples)

    def _subject_index(self):
        if self._by_s is None:
            idx = {}
            for t in self.triples:
                idx.setdefault(t.s, []).append(t)
            self._by_s = {k: tuple(v) for k, v in idx.items()}
        return self._by_s

    def _predicate_index(self):
        if self._by_p is None:
            idx = {}
            for t in self.triples:
                idx.setdefault(t.p, []).append(t)
            self._by_p = {k: tuple(v) for k, v in idx.items()}
        return self._by_p

    def _object_index(self):
        if self._by_o is None:
            idx = {}
            for t in self.triples:
                idx.setdefault(t.o, []).append(t)
            self._by_o = {k: tuple(v) for k, v in idx.items()}
        return self._by_o

    def with_subject(self, s):
        return self._subject_index().get(s, ())

    def with_predicate(self, p):
        return self._predicate_index().get(p, ())

    def with_object(self, o):
        return self._object_index().get(o, ())

    def predicates(self):
        return sorted(self._predicate_index(), key=lambda p: p.value)

    def nodes(self):
        """All subject and object terms, deterministic order."""
        if self._nodes is None:
            seen = {}
            for t in self.triples:
                seen[t.s] = True
                seen[t.o] = True
            iris = sorted((n for n in seen if isinstance(n, IRI)), key=lambda n: n.value)
            lits = sorted((n for n in seen if isinstance(n, Literal)))
            self._nodes = tuple(iris) + tuple(lits)
        return self._nodes

    def role(self, node):
        if isinstance(node, Literal):
            return "literal"
        return self._roles.get(node)

    def roles(self):
        return dict(self._roles)

    def replace_triples(self, triples):
        """New graph with the given triples, keeping this graph's role tags."""
        return Graph(triples, roles=self._roles, _checked=True)
