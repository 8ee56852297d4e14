"""Graph serialization: canonical N-Triples, pretty Turtle, N-Triples parsing.

Canonical N-Triples output is bit-exact reproducible: one triple per line,
a fixed escape policy, lines sorted by the UTF-8 bytes of their
(subject, predicate, object) terms, LF endings, trailing newline. There
are no blank nodes, so plain byte ordering is a sound canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .rdf import Graph, Iri, Literal, Triple

FORMAT_NTRIPLES = "ntriples-canonical"
FORMAT_TURTLE = "turtle"


@dataclass
class SerializationConfig:
    format: str = FORMAT_NTRIPLES
    prefixes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.format not in (FORMAT_NTRIPLES, FORMAT_TURTLE):
            raise ValueError(f"unknown serialization format: {self.format!r}")


class NTriplesParseError(ValueError):
    """Malformed N-Triples input, anchored to a 1-based line number."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


_ECHARS = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        esc = _ECHARS.get(ch)
        if esc is not None:
            out.append(esc)
        elif ch < "\x20":
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _format_term(term: Iri | Literal) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    body = f'"{_escape_literal(term.lexical)}"'
    if term.language is not None:
        return f"{body}@{term.language}"
    if term.datatype is not None:
        return f"{body}^^<{term.datatype.value}>"
    return body


def to_ntriples(graph: Graph) -> bytes:
    """Serialize to canonical N-Triples (UTF-8 bytes)."""
    rows = [
        (
            _format_term(t.subject).encode("utf-8"),
            _format_term(t.predicate).encode("utf-8"),
            _format_term(t.object).encode("utf-8"),
        )
        for t in graph.triples
    ]
    rows.sort()
    return b"".join(b"%s %s %s .\n" % row for row in rows)


def serialize(graph: Graph, config: SerializationConfig | None = None) -> bytes:
    config = config or SerializationConfig()
    if config.format == FORMAT_NTRIPLES:
        return to_ntriples(graph)
    return to_turtle(graph, prefixes=config.prefixes or None)


# --- N-Triples parsing ------------------------------------------------------

_UCHAR_RE = re.compile(r"\\u([0-9a-fA-F]{4})|\\U([0-9a-fA-F]{8})")
_UNESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _LineScanner:
    def __init__(self, line: str, line_no: int):
        self.line = line
        self.pos = 0
        self.line_no = line_no

    def fail(self, reason: str):
        raise NTriplesParseError(self.line_no, reason)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def read_iri(self) -> Iri:
        if self.peek() != "<":
            self.fail("expected '<'")
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            self.fail("unterminated IRI")
        raw = self.line[self.pos + 1 : end]
        self.pos = end + 1
        value = _unescape_uchar(raw, self)
        try:
            return Iri(value)
        except ValueError as exc:
            self.fail(str(exc))

    def read_literal(self) -> Literal:
        if self.peek() != '"':
            self.fail("expected '\"'")
        self.pos += 1
        out = []
        while True:
            if self.at_end():
                self.fail("unterminated literal")
            ch = self.line[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\":
                out.append(self._read_escape())
            else:
                out.append(ch)
                self.pos += 1
        lexical = "".join(out)
        if self.peek() == "@":
            self.pos += 1
            match = re.match(r"[A-Za-z]+(-[A-Za-z0-9]+)*", self.line[self.pos :])
            if not match:
                self.fail("malformed language tag")
            self.pos += match.end()
            return Literal(lexical, language=match.group(0))
        if self.line.startswith("^^", self.pos):
            self.pos += 2
            return Literal(lexical, datatype=self.read_iri())
        return Literal(lexical)

    def _read_escape(self) -> str:
        tail = self.line[self.pos :]
        match = _UCHAR_RE.match(tail)
        if match:
            self.pos += match.end()
            return chr(int(match.group(1) or match.group(2), 16))
        if len(tail) >= 2 and tail[1] in _UNESCAPES:
            self.pos += 2
            return _UNESCAPES[tail[1]]
        self.fail(f"invalid escape sequence at column {self.pos + 1}")


def _unescape_uchar(raw: str, scanner: _LineScanner) -> str:
    if "\\" not in raw:
        return raw
    def sub(match: re.Match) -> str:
        return chr(int(match.group(1) or match.group(2), 16))
    value, _ = _UCHAR_RE.subn(sub, raw)
    if "\\" in value:
        scanner.fail("invalid escape in IRI")
    return value


def parse_ntriples(data: bytes | str) -> Graph:
    """Parse N-Triples input; comments and blank lines are tolerated."""
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    graph = Graph()
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        scanner = _LineScanner(line, line_no)
        scanner.skip_ws()
        if scanner.at_end() or scanner.peek() == "#":
            continue
        if line.lstrip().startswith("_:"):
            scanner.fail("blank nodes are not supported")
        subject = scanner.read_iri()
        scanner.skip_ws()
        predicate = scanner.read_iri()
        scanner.skip_ws()
        if scanner.peek() == "<":
            obj: Iri | Literal = scanner.read_iri()
        elif scanner.peek() == '"':
            obj = scanner.read_literal()
        elif scanner.peek() == "_":
            scanner.fail("blank nodes are not supported")
        else:
            scanner.fail("expected IRI or literal object")
        scanner.skip_ws()
        if scanner.peek() != ".":
            scanner.fail("missing terminating '.'")
        scanner.pos += 1
        scanner.skip_ws()
        if not scanner.at_end() and scanner.peek() != "#":
            scanner.fail("trailing characters after '.'")
        graph.triples.add(Triple(subject, predicate, obj))
    return graph


# --- Turtle -----------------------------------------------------------------

_PNAME_LOCAL_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_-]*$")
_RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def _turtle_term(term: Iri | Literal, table: list[tuple[str, str]]) -> str:
    if isinstance(term, Iri):
        for prefix, base in table:
            if term.value.startswith(base):
                local = term.value[len(base) :]
                if _PNAME_LOCAL_RE.match(local):
                    return f"{prefix}:{local}"
        return f"<{term.value}>"
    body = f'"{_escape_literal(term.lexical)}"'
    if term.language is not None:
        return f"{body}@{term.language}"
    if term.datatype is not None:
        return f"{body}^^{_turtle_term(term.datatype, table)}"
    return body


def to_turtle(graph: Graph, prefixes: dict[str, str] | None = None) -> bytes:
    """Serialize to Turtle, grouped by subject; deterministic but not canonical."""
    table = sorted((prefixes if prefixes is not None else graph.namespaces).items())
    # longest namespace wins when one is a prefix of another
    lookup = sorted(table, key=lambda kv: -len(kv[1]))

    by_subject: dict[str, dict[str, list]] = {}
    for t in graph.triples:
        by_subject.setdefault(t.subject.value, {}).setdefault(t.predicate.value, []).append(t.object)

    used = set()
    body_lines: list[str] = []
    for subj_value in sorted(by_subject):
        subj_text = _turtle_term(Iri(subj_value), lookup)
        parts = []
        for pred_value in sorted(by_subject[subj_value]):
            if pred_value == _RDF_TYPE:
                pred_text = "a"
            else:
                pred_text = _turtle_term(Iri(pred_value), lookup)
            objects = sorted(
                _turtle_term(o, lookup) for o in by_subject[subj_value][pred_value]
            )
            parts.append(f"{pred_text} " + ", ".join(objects))
        for prefix, base in lookup:
            marker = f"{prefix}:"
            if any(marker in chunk for chunk in parts) or subj_text.startswith(marker):
                used.add(prefix)
        sep = " ;\n" + " " * 4
        body_lines.append(f"{subj_text} {sep.join(parts)} .\n")

    header = "".join(
        f"@prefix {prefix}: <{base}> .\n" for prefix, base in table if prefix in used
    )
    if header and body_lines:
        header += "\n"
    return (header + "".join(body_lines)).encode("utf-8")
