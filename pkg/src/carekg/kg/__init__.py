from .namespaces import RDF_TYPE, TIME_BEFORE
from .transforms import saturate, add_inverses, quantile_transform
from .caresm import build_caresm_graph
from .builder import (
    VARIANT_NAMES, SchemaVariant, cohort_timestamp_quantiles,
    build_patient_graph, build_cohort_graph, patient_iri,
)

__all__ = [
    "RDF_TYPE", "TIME_BEFORE",
    "saturate", "add_inverses", "quantile_transform",
    "build_patient_graph", "build_caresm_graph",
    "VARIANT_NAMES", "SchemaVariant", "cohort_timestamp_quantiles",
    "build_cohort_graph", "patient_iri",
]
