"""Compact patient-centric graph template.

Per record: one patient rdf:type triple; the 4 numeric features as literal
triples under per-feature predicates; the 6 categorical and 12 binary
features as edges to shared value-concept nodes (both binary polarities are
always asserted, so triple absence never encodes information); each event as
a node linked by kind (drug administration vs procedure) with an rdf:type, a
code edge to the shared event concept, and, variant permitting, a timestamp
literal; time:before edges between directly subsequent events.
"""

from ..rdf import IRI, Literal, Triple, XSD_DECIMAL, XSD_INTEGER
from ..pathway.vocab import NUMERIC_FEATURES, CATEGORICAL_FEATURES, BINARY_FEATURES, DRUG_EVENTS
from . import namespaces as ns
from .namespaces import sphn_numeric_predicate
from .transforms import quantile_transform

_RDF_TYPE = IRI(ns.RDF_TYPE)
_BEFORE = IRI(ns.TIME_BEFORE)


def format_number(v):
    if isinstance(v, bool):
        return str(int(v)), XSD_INTEGER
    if isinstance(v, int):
        return str(v), XSD_INTEGER
    return repr(float(v)), XSD_DECIMAL


def patient_node(record_id):
    return IRI(ns.PATIENT_NS + record_id)


def event_node(record_id, event):
    return IRI(ns.EVENT_NS + record_id + "/" + event)


def concept_node(feature, value):
    return IRI(ns.CONCEPT_NS + f"{feature}={value}")


def event_concept(event):
    return concept_node("event", event)


def record_timestamp_map(record):
    """Fallback [0,1] timestamps from the record's own times (the cohort
    builder passes cohort-wide quantiles instead)."""
    if not record.events:
        return {}
    names = [e for e, _ in record.events]
    qs = quantile_transform([t for _, t in record.events])
    return dict(zip(names, qs))


def emit_sphn(record, literals, timestamps, before, tsmap=None, triples=None, roles=None):
    """Append this record's template triples; returns (triples, roles)."""
    triples = triples if triples is not None else []
    roles = roles if roles is not None else {}
    pat = patient_node(record.id)
    roles[pat] = "patient"
    roles[IRI(ns.SPHN_PATIENT_CLASS)] = "concept"
    triples.append(Triple(pat, _RDF_TYPE, IRI(ns.SPHN_PATIENT_CLASS)))

    if literals:
        for f in NUMERIC_FEATURES:
            lex, dt = format_number(record.features[f])
            triples.append(Triple(pat, IRI(sphn_numeric_predicate(f)), Literal(lex, dt)))
    for f in CATEGORICAL_FEATURES:
        c = concept_node(f, record.features[f])
        roles[c] = "concept"
        triples.append(Triple(pat, IRI(ns.SPHN_HAS_CHARACTERISTIC), c))
    for f in BINARY_FEATURES:
        c = concept_node(f, int(record.features[f]))
        roles[c] = "concept"
        triples.append(Triple(pat, IRI(ns.SPHN_HAS_FLAG), c))

    if timestamps and tsmap is None:
        tsmap = record_timestamp_map(record)
    prev = None
    for event, _t in record.events:
        node = event_node(record.id, event)
        roles[node] = "event"
        is_drug = event in DRUG_EVENTS
        link = ns.SPHN_HAS_DRUG if is_drug else ns.SPHN_HAS_PROCEDURE
        klass = ns.SPHN_DRUG_CLASS if is_drug else ns.SPHN_PROCEDURE_CLASS
        code = event_concept(event)
        roles[code] = "concept"
        roles[IRI(klass)] = "concept"
        triples.append(Triple(pat, IRI(link), node))
        triples.append(Triple(node, _RDF_TYPE, IRI(klass)))
        triples.append(Triple(node, IRI(ns.SPHN_HAS_CODE), code))
        if timestamps:
            triples.append(Triple(node, IRI(ns.SPHN_HAS_START), Literal(repr(float(tsmap[event])), XSD_DECIMAL)))
        if before and prev is not None:
            triples.append(Triple(prev, _BEFORE, node))
        prev = node
    return triples, roles
