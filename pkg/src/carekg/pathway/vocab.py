"""Fixed clinical vocabulary: feature names, event names, outcome labels.

Column orders everywhere in the pipeline (CSV, tabular encoding, transition
indicators) follow these tuples.
"""

NUMERIC_FEATURES = ("hospital_stay_length", "gcs", "act_nb", "age")

CATEGORICAL_FEATURES = ("gender", "entry", "entry_code", "ica.y", "ica_treatment", "ica_therapy")

BINARY_FEATURES = (
    "fever", "o2_clinic", "o2", "hta", "hct", "smoking",
    "etOH", "diabetes", "headache", "unstable_ica", "vasospasm", "ivh",
)

FEATURE_ORDER = NUMERIC_FEATURES + CATEGORICAL_FEATURES + BINARY_FEATURES

# five drug administrations followed by three procedures
DRUG_EVENTS = ("nimodipine", "paracetamol", "nad", "corotrop", "morphine")
PROCEDURE_EVENTS = ("dve", "atl", "iot")
EVENT_NAMES = DRUG_EVENTS + PROCEDURE_EVENTS

OUTCOMES = ("BackHome", "Rehabilitation", "Death")

START, END = "START", "END"

# all ordered pairs of distinct events, 8*7 = 56, in event-list order
TRANSITION_PAIRS = tuple((a, b) for a in EVENT_NAMES for b in EVENT_NAMES if a != b)
