"""N-Triples concrete syntax: line-based parser and canonical serializer."""

from ..errors import ParseError
from .terms import IRI, Literal, Triple, Graph, XSD_STRING, ALLOWED_DATATYPES, _IRI_FORBIDDEN, triple_sort_key

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


class _LineParser:
    def __init__(self, line, lineno):
        self.line = line
        self.lineno = lineno
        self.pos = 0

    def fail(self, message, at=None):
        col = (self.pos if at is None else at) + 1
        raise ParseError(message, self.lineno, col)

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def expect_iri(self):
        if self.pos >= len(self.line) or self.line[self.pos] != "<":
            self.fail("expected '<'")
        start = self.pos + 1
        end = self.line.find(">", start)
        if end < 0:
            self.fail("unterminated IRI", at=start - 1)
        value = self.line[start:end]
        if not value:
            self.fail("empty IRI", at=start - 1)
        for i, c in enumerate(value):
            if c in _IRI_FORBIDDEN:
                self.fail(f"forbidden character {c!r} in IRI", at=start + i)
        self.pos = end + 1
        return IRI(value)

    def expect_literal(self):
        start = self.pos
        self.pos += 1  # opening quote
        out = []
        while True:
            if self.pos >= len(self.line):
                self.fail("unterminated literal", at=start)
            c = self.line[self.pos]
            if c == '"':
                self.pos += 1
                break
            if c == "\\":
                if self.pos + 1 >= len(self.line):
                    self.fail("dangling escape")
                e = self.line[self.pos + 1]
                if e in _ESCAPES:
                    out.append(_ESCAPES[e])
                    self.pos += 2
                elif e in ("u", "U"):
                    width = 4 if e == "u" else 8
                    hexpart = self.line[self.pos + 2 : self.pos + 2 + width]
                    if len(hexpart) < width:
                        self.fail("truncated unicode escape")
                    try:
                        out.append(chr(int(hexpart, 16)))
                    except ValueError:
                        self.fail("invalid unicode escape")
                    self.pos += 2 + width
                else:
                    self.fail(f"unknown escape \\{e}")
            else:
                out.append(c)
                self.pos += 1
        lexical = "".join(out)
        datatype = XSD_STRING
        if self.line.startswith("^^", self.pos):
            self.pos += 2
            dt = self.expect_iri()
            datatype = dt.value
            if datatype not in ALLOWED_DATATYPES:
                self.fail(f"unsupported datatype {datatype}", at=self.pos - len(datatype) - 2)
        elif self.pos < len(self.line) and self.line[self.pos] == "@":
            self.fail("language-tagged literals are not supported")
        return Literal(lexical, datatype)

    def expect_object(self):
        if self.pos >= len(self.line):
            self.fail("expected object term")
        if self.line[self.pos] == "<":
            return self.expect_iri()
        if self.line[self.pos] == '"':
            return self.expect_literal()
        self.fail("expected '<' or '\"'")

    def expect_dot(self):
        self.skip_ws()
        if self.pos >= len(self.line) or self.line[self.pos] != ".":
            self.fail("expected terminating '.'")
        self.pos += 1
        self.skip_ws()
        if self.pos < len(self.line):
            self.fail("trailing content after '.'")


def parse_ntriples(text):
    """Parse N-Triples text into a Graph; duplicates collapse silently."""
    triples = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lp = _LineParser(line, lineno)
        lp.skip_ws()
        s = lp.expect_iri()
        lp.skip_ws()
        p = lp.expect_iri()
        lp.skip_ws()
        o = lp.expect_object()
        lp.expect_dot()
        triples.append(Triple(s, p, o))
    return Graph(triples, _checked=True)


def _escape(lexical):
    return "".join(_UNESCAPES.get(c, c) for c in lexical)


def serialize_term(term):
    if isinstance(term, IRI):
        return f"<{term.value}>"
    return f'"{_escape(term.lexical)}"^^<{term.datatype}>'


def serialize_ntriples(graph):
    """Canonical serialization: sorted triples, one per line, explicit datatypes."""
    lines = []
    for t in sorted(graph.triples, key=triple_sort_key):
        lines.append(f"{serialize_term(t.s)} {serialize_term(t.p)} {serialize_term(t.o)} .\n")
    return "".join(lines)
