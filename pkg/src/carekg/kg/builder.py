"""Variant algebra and cohort-level graph assembly.

Variant composition: nt drops timestamps from ts; nl additionally drops all
literals; tr swaps timestamps for time:before edges; tsr keeps both; sat1
and sat2 apply one and two saturation rounds on top of tr. Inverse edges are
asserted systematically on every finished variant. The outcome label never
becomes a triple in any variant; it travels in the labels sidecar only.
"""

from enum import Enum

import numpy as np

from ..errors import ConfigurationError
from ..rdf import Graph
from ..pathway.vocab import EVENT_NAMES
from .namespaces import PATIENT_NS
from .sphn import emit_sphn, patient_node
from .caresm import emit_caresm
from .transforms import saturate, add_inverses, quantile_transform


class SchemaVariant(Enum):
    SPHN_NL = "SPHN-nl"
    SPHN_NT = "SPHN-nt"
    SPHN_TS = "SPHN-ts"
    SPHN_TR = "SPHN-tr"
    SPHN_TSR = "SPHN-tsr"
    SPHN_SAT1 = "SPHN-sat1"
    SPHN_SAT2 = "SPHN-sat2"
    CARESM_TS = "CARESM*-ts"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        for v in cls:
            if v.value == name or v.name == name:
                return v
        raise ConfigurationError(f"unknown schema variant {name!r}")


VARIANT_NAMES = tuple(v.value for v in SchemaVariant)

# (literals, timestamps, before, saturation rounds)
_SPHN_FLAGS = {
    SchemaVariant.SPHN_NL: (False, False, False, 0),
    SchemaVariant.SPHN_NT: (True, False, False, 0),
    SchemaVariant.SPHN_TS: (True, True, False, 0),
    SchemaVariant.SPHN_TR: (True, False, True, 0),
    SchemaVariant.SPHN_TSR: (True, True, True, 0),
    SchemaVariant.SPHN_SAT1: (True, False, True, 1),
    SchemaVariant.SPHN_SAT2: (True, False, True, 2),
}


def patient_iri(record_or_id):
    rid = record_or_id if isinstance(record_or_id, str) else record_or_id.id
    return PATIENT_NS + rid


def cohort_timestamp_quantiles(cohort):
    """Quantile-transform each event's first-occurrence times cohort-wide.

    Returns {record_id: {event: value in [0,1]}}; the transform runs per
    event type over all patients that have the event.
    """
    out = {rec.id: {} for rec in cohort}
    for event in EVENT_NAMES:
        ids, times = [], []
        for rec in cohort:
            for name, t in rec.events:
                if name == event:
                    ids.append(rec.id)
                    times.append(t)
        if not times:
            continue
        qs = quantile_transform(np.array(times))
        for rid, q in zip(ids, qs):
            out[rid][event] = float(q)
    return out


def build_patient_graph(record, variant, timestamps=None):
    """Single-record graph for a variant, before inverse assertion.

    ``timestamps`` maps event name to a [0,1] value; when omitted, the
    record's own times are quantile-mapped as a standalone fallback.
    """
    variant = SchemaVariant.parse(variant)
    if variant is SchemaVariant.CARESM_TS:
        triples, roles = emit_caresm(record, timestamps=True, tsmap=timestamps)
        return Graph(triples, roles=roles, _checked=True)
    lit, ts, before, sat = _SPHN_FLAGS[variant]
    triples, roles = emit_sphn(record, lit, ts, before, tsmap=timestamps)
    g = Graph(triples, roles=roles, _checked=True)
    if sat:
        g = saturate(g, sat)
    return g


def build_cohort_graph(cohort, variant, timestamp_quantiles=None, inverses=True):
    """Union of all per-record graphs with saturation and inverse edges."""
    variant = SchemaVariant.parse(variant)
    if timestamp_quantiles is None:
        timestamp_quantiles = cohort_timestamp_quantiles(cohort)
    triples, roles = [], {}
    if variant is SchemaVariant.CARESM_TS:
        for rec in cohort:
            emit_caresm(rec, timestamps=True, tsmap=timestamp_quantiles[rec.id],
                        triples=triples, roles=roles)
        sat = 0
    else:
        lit, ts, before, sat = _SPHN_FLAGS[variant]
        for rec in cohort:
            emit_sphn(rec, lit, ts, before, tsmap=timestamp_quantiles[rec.id],
                      triples=triples, roles=roles)
    g = Graph(triples, roles=roles, _checked=True)
    if sat:
        g = saturate(g, sat)
    if inverses:
        g = add_inverses(g)
    return g
