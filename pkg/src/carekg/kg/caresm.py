"""Role/context/observation graph template (quad-flattened).

Every feature and event routes through the generic chain
patient -[hasRole]-> context -[hasOutput]-> observation -[refersTo]-> concept
so each patient-to-concept path is exactly 3 object-property hops (the
compact template needs 1-2). Numeric values hang off observations via
hasValue; event timestamps hang off contexts via hasTimePoint. All chain
predicates are shared across features, as in the source schema.
"""

from ..rdf import IRI, Literal, Triple, Graph, XSD_DECIMAL
from ..pathway.vocab import NUMERIC_FEATURES, CATEGORICAL_FEATURES, BINARY_FEATURES
from . import namespaces as ns
from .sphn import format_number, patient_node, concept_node, event_concept, record_timestamp_map

_RDF_TYPE = IRI(ns.RDF_TYPE)
CONTEXT_NS = ns.EX + "context/"
OBSERVATION_NS = ns.EX + "observation/"


def emit_caresm(record, timestamps, tsmap=None, triples=None, roles=None):
    triples = triples if triples is not None else []
    roles = roles if roles is not None else {}
    pat = patient_node(record.id)
    roles[pat] = "patient"
    for klass in (ns.CARE_PATIENT_CLASS, ns.CARE_CONTEXT_CLASS, ns.CARE_OBSERVATION_CLASS):
        roles[IRI(klass)] = "concept"
    triples.append(Triple(pat, _RDF_TYPE, IRI(ns.CARE_PATIENT_CLASS)))

    def chain(tag, concept, value_literal=None, time_literal=None):
        ctx = IRI(CONTEXT_NS + record.id + "/" + tag)
        obs = IRI(OBSERVATION_NS + record.id + "/" + tag)
        roles[concept] = "concept"
        triples.append(Triple(pat, IRI(ns.CARE_HAS_ROLE), ctx))
        triples.append(Triple(ctx, _RDF_TYPE, IRI(ns.CARE_CONTEXT_CLASS)))
        triples.append(Triple(ctx, IRI(ns.CARE_HAS_OUTPUT), obs))
        triples.append(Triple(obs, _RDF_TYPE, IRI(ns.CARE_OBSERVATION_CLASS)))
        triples.append(Triple(obs, IRI(ns.CARE_REFERS_TO), concept))
        if value_literal is not None:
            triples.append(Triple(obs, IRI(ns.CARE_HAS_VALUE), value_literal))
        if time_literal is not None:
            triples.append(Triple(ctx, IRI(ns.NVASC_HAS_TIMEPOINT), time_literal))

    for f in NUMERIC_FEATURES:
        lex, dt = format_number(record.features[f])
        chain(f, concept_node("feature", f), value_literal=Literal(lex, dt))
    for f in CATEGORICAL_FEATURES:
        chain(f, concept_node(f, record.features[f]))
    for f in BINARY_FEATURES:
        chain(f, concept_node(f, int(record.features[f])))

    if timestamps and tsmap is None:
        tsmap = record_timestamp_map(record)
    for event, _t in record.events:
        tlit = Literal(repr(float(tsmap[event])), XSD_DECIMAL) if timestamps else None
        chain("event/" + event, event_concept(event), time_literal=tlit)
    return triples, roles


def build_caresm_graph(record, timestamps=None):
    """Single-record role/context/observation graph (timestamps included,
    inverse edges not yet asserted)."""
    triples, roles = emit_caresm(record, timestamps=True, tsmap=timestamps)
    return Graph(triples, roles=roles, _checked=True)
