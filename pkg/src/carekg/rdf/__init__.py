from .terms import IRI, Literal, Triple, Graph, XSD_DECIMAL, XSD_INTEGER, XSD_STRING, XSD_DATETIME
from .ntriples import parse_ntriples, serialize_ntriples

__all__ = [
    "IRI", "Literal", "Triple", "Graph",
    "XSD_DECIMAL", "XSD_INTEGER", "XSD_STRING", "XSD_DATETIME",
    "parse_ntriples", "serialize_ntriples",
]
