from .vocab import (
    EVENT_NAMES, NUMERIC_FEATURES, CATEGORICAL_FEATURES, BINARY_FEATURES,
    FEATURE_ORDER, OUTCOMES, TRANSITION_PAIRS, DRUG_EVENTS, PROCEDURE_EVENTS,
)
from .config import FeatureSpec, TransitionMatrix, OutcomeModel, CohortConfig, load_cohort_config
from .generate import PatientRecord, generate_cohort, sample_event_sequence, binarize_transitions
from .stats import ks_statistic, ks_critical, ks_passes, validate_cohort
from .cohort_io import write_cohort_csv, read_cohort_csv, cohort_header

__all__ = [
    "EVENT_NAMES", "NUMERIC_FEATURES", "CATEGORICAL_FEATURES", "BINARY_FEATURES",
    "FEATURE_ORDER", "OUTCOMES", "TRANSITION_PAIRS", "DRUG_EVENTS", "PROCEDURE_EVENTS",
    "FeatureSpec", "TransitionMatrix", "OutcomeModel", "CohortConfig", "load_cohort_config",
    "PatientRecord", "generate_cohort", "sample_event_sequence", "binarize_transitions",
    "ks_statistic", "ks_critical", "ks_passes", "validate_cohort",
    "write_cohort_csv", "read_cohort_csv", "cohort_header",
]
