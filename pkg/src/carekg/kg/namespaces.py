"""IRI vocabulary for the generated graphs.

Instance nodes live under a repo-owned namespace; the two schema templates
get separate predicate namespaces so their graphs never share relation IRIs
(apart from rdf:type and time:before).
"""

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
TIME_BEFORE = "http://www.w3.org/2006/time#before"

EX = "http://example.org/carekg/"
PATIENT_NS = EX + "patient/"
EVENT_NS = EX + "event/"
CONCEPT_NS = EX + "concept/"

# compact patient-centric template
SPHN = "http://example.org/sphn/"
SPHN_PATIENT_CLASS = SPHN + "Patient"
SPHN_DRUG_CLASS = SPHN + "DrugAdministration"
SPHN_PROCEDURE_CLASS = SPHN + "Procedure"
SPHN_HAS_DRUG = SPHN + "hasDrugAdministration"
SPHN_HAS_PROCEDURE = SPHN + "hasProcedure"
SPHN_HAS_CODE = SPHN + "hasCode"
SPHN_HAS_CHARACTERISTIC = SPHN + "hasCharacteristic"
SPHN_HAS_FLAG = SPHN + "hasFlag"
SPHN_HAS_START = SPHN + "hasStartDateTime"


def sphn_numeric_predicate(feature):
    return SPHN + "has-" + feature


# role/context/observation template
CARE = "http://example.org/caresm/"
CARE_PATIENT_CLASS = CARE + "Patient"
CARE_CONTEXT_CLASS = CARE + "Context"
CARE_OBSERVATION_CLASS = CARE + "Observation"
CARE_HAS_ROLE = CARE + "hasRole"
CARE_HAS_OUTPUT = CARE + "hasOutput"
CARE_REFERS_TO = CARE + "refersTo"
CARE_HAS_VALUE = CARE + "hasValue"
NVASC = "http://example.org/nvasc/"
NVASC_HAS_TIMEPOINT = NVASC + "hasTimePoint"

INVERSE_SUFFIX = "-inv"
