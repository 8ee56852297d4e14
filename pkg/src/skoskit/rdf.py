"""Minimal RDF data model: IRIs, literals, triples, and a graph container.

The toolkit never emits blank nodes, so subjects are always IRIs and the
whole model stays hashable and order-free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Characters an IRIREF may not contain (beyond the \x00-\x20 range).
_IRI_FORBIDDEN = set('<>"{}|^`\\')
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
_LANGTAG_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self) -> None:
        if not _SCHEME_RE.match(self.value):
            raise ValueError(f"not an absolute IRI: {self.value!r}")
        for ch in self.value:
            if ch <= "\x20" or ch in _IRI_FORBIDDEN:
                raise ValueError(f"character {ch!r} not allowed in IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Literal:
    """An RDF literal; language tag and datatype are mutually exclusive."""

    lexical: str
    language: str | None = None
    datatype: Iri | None = None

    def __post_init__(self) -> None:
        if self.language is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")
        if self.language is not None and not _LANGTAG_RE.match(self.language):
            raise ValueError(f"malformed language tag: {self.language!r}")


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Iri | Literal


class Namespace:
    """Shorthand for building IRIs under a common prefix (NS.localName)."""

    def __init__(self, base: str):
        self._base = base

    @property
    def base(self) -> str:
        return self._base

    def __getattr__(self, local: str) -> Iri:
        if local.startswith("_"):
            raise AttributeError(local)
        return Iri(self._base + local)

    def term(self, local: str) -> Iri:
        return Iri(self._base + local)

    def __contains__(self, iri: Iri) -> bool:
        return iri.value.startswith(self._base)


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
SKOS = Namespace("http://www.w3.org/2004/02/skos/core#")
SKOSXL = Namespace("http://www.w3.org/2008/05/skos-xl#")
DCT = Namespace("http://purl.org/dc/terms/")
VOID = Namespace("http://rdfs.org/ns/void#")
CC = Namespace("http://creativecommons.org/ns#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")

#: Prefixes shared by every emitted graph; "thesoz" is added per URI policy.
STANDARD_PREFIXES: dict[str, str] = {
    "rdf": RDF.base,
    "rdfs": RDFS.base,
    "owl": OWL.base,
    "skos": SKOS.base,
    "skosxl": SKOSXL.base,
    "dct": DCT.base,
    "void": VOID.base,
    "cc": CC.base,
}


@dataclass
class Graph:
    """A set of triples plus a prefix table used only for pretty output."""

    triples: set[Triple] = field(default_factory=set)
    namespaces: dict[str, str] = field(default_factory=dict)

    def add(self, subject: Iri, predicate: Iri, obj: Iri | Literal) -> None:
        self.triples.add(Triple(subject, predicate, obj))

    def update(self, other: Graph) -> None:
        self.triples |= other.triples
        for prefix, base in other.namespaces.items():
            self.namespaces.setdefault(prefix, base)

    def match(
        self,
        subject: Iri | None = None,
        predicate: Iri | None = None,
        obj: Iri | Literal | None = None,
    ) -> list[Triple]:
        """All triples matching the given pattern, None acting as a wildcard."""
        found = [
            t
            for t in self.triples
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (obj is None or t.object == obj)
        ]
        found.sort(key=lambda t: (t.subject.value, t.predicate.value, _object_key(t.object)))
        return found

    def subjects(self, predicate: Iri | None = None, obj: Iri | Literal | None = None) -> list[Iri]:
        return sorted({t.subject for t in self.match(None, predicate, obj)}, key=lambda i: i.value)

    def objects(self, subject: Iri | None = None, predicate: Iri | None = None) -> list[Iri | Literal]:
        return sorted({t.object for t in self.match(subject, predicate, None)}, key=_object_key)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self.triples


def _object_key(obj: Iri | Literal) -> tuple:
    if isinstance(obj, Iri):
        return (0, obj.value, "", "")
    return (1, obj.lexical, obj.language or "", obj.datatype.value if obj.datatype else "")
