"""N-Triples round-trips, escaping, and parse errors."""

import pytest
from hypothesis import given, settings, strategies as st

from carekg.errors import ParseError
from carekg.rdf import (IRI, Literal, Triple, Graph, XSD_DECIMAL, XSD_STRING,
                        parse_ntriples, serialize_ntriples)


def iri(s):
    return IRI(f"http://example.org/{s}")


def test_decimal_literal_line():
    text = '<http://a> <http://b> "1.0"^^<http://www.w3.org/2001/XMLSchema#decimal> .\n'
    g = parse_ntriples(text)
    (t,) = list(g)
    assert t.s == IRI("http://a")
    assert t.p == IRI("http://b")
    assert t.o == Literal("1.0", XSD_DECIMAL)


def test_serialization_is_sorted_and_stable():
    t1 = Triple(iri("s2"), iri("p"), iri("o"))
    t2 = Triple(iri("s1"), iri("p"), Literal("x", XSD_STRING))
    a = serialize_ntriples(Graph([t1, t2]))
    b = serialize_ntriples(Graph([t2, t1]))
    assert a == b
    assert a.index("s1") < a.index("s2")


def test_escapes_round_trip():
    tricky = 'back\\slash "quoted" tab\t newline\n end'
    g = Graph([Triple(iri("s"), iri("p"), Literal(tricky, XSD_STRING))])
    back = parse_ntriples(serialize_ntriples(g))
    (t,) = list(back)
    assert t.o.lexical == tricky


@pytest.mark.parametrize("line", [
    "<http://a> <http://b> .",
    "<http://a> <http://b> <http://c>",
    '<http://a> "lit" <http://c> .',
    "<http://a> <http://b> <http://c> . trailing",
    '<http://a> <http://b> "unterminated .',
])
def test_malformed_lines_raise(line):
    with pytest.raises(ParseError):
        parse_ntriples(line + "\n")


def test_comments_and_blank_lines_are_skipped():
    text = "# comment\n\n<http://a> <http://b> <http://c> .\n"
    assert len(parse_ntriples(text)) == 1


_iris = st.text(st.characters(min_codepoint=97, max_codepoint=122), min_size=1, max_size=8) \
    .map(lambda s: IRI("http://example.org/" + s))
_lexicals = st.text(
    st.characters(min_codepoint=32, max_codepoint=126), max_size=20)
_literals = st.builds(Literal, _lexicals, st.sampled_from([XSD_STRING, XSD_DECIMAL]))
_objects = st.one_of(_iris, _literals)
_triples = st.builds(Triple, _iris, _iris, _objects)


@settings(max_examples=60, deadline=None)
@given(st.lists(_triples, max_size=12))
def test_round_trip_any_graph(triples):
    g = Graph(triples)
    assert parse_ntriples(serialize_ntriples(g)) == g


def test_graph_indexes_and_dedup():
    t = Triple(iri("s"), iri("p"), iri("o"))
    g = Graph([t, t])
    assert len(g) == 1
    assert list(g.with_subject(iri("s"))) == [t]
    assert list(g.with_predicate(iri("p"))) == [t]
    assert list(g.with_object(iri("o"))) == [t]
    assert t in g
    assert iri("s") in g.nodes()
