"""Core thesaurus domain model and invariant validation.

A Thesaurus is immutable after assembly: build one through
`skoskit.ingest.assemble_thesaurus` (or by hand in tests), then treat it
as read-only. Any number of concurrent readers is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

DEFAULT_LANGUAGES = frozenset({"de", "en", "fr"})
DEFAULT_PIVOT = "de"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One validation or parse finding, optionally anchored to a file line."""

    severity: Severity
    code: str
    message: str
    file: str | None = None
    line: int | None = None

    def render(self) -> str:
        where = ""
        if self.file is not None:
            where = f"{self.file}:{self.line}: " if self.line is not None else f"{self.file}: "
        return f"{where}{self.severity.value}[{self.code}]: {self.message}"


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


class TermKind(str, Enum):
    DESCRIPTOR = "descriptor"
    NON_DESCRIPTOR = "non_descriptor"
    # AD terms: non-preferred terms that fan out into several "use instead"
    # and/or "use combination" relations instead of a single equivalence.
    ALTERNATIVE_NON_DESCRIPTOR = "alternative_non_descriptor"

    @property
    def is_preferred(self) -> bool:
        return self is TermKind.DESCRIPTOR


class RelationKind(str, Enum):
    BROADER = "broader"
    NARROWER = "narrower"
    RELATED = "related"


_INVERSE = {
    RelationKind.BROADER: RelationKind.NARROWER,
    RelationKind.NARROWER: RelationKind.BROADER,
    RelationKind.RELATED: RelationKind.RELATED,
}


@dataclass
class Term:
    id: str
    kind: TermKind
    labels: dict[str, str] = field(default_factory=dict)
    classification_codes: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class SemanticRelation:
    source: str
    kind: RelationKind
    target: str

    def inverse(self) -> "SemanticRelation":
        return SemanticRelation(self.target, _INVERSE[self.kind], self.source)


@dataclass(frozen=True)
class EquivalenceRelation:
    """A "use instead" relation from a non-preferred term to a descriptor."""

    non_preferred: str
    preferred: str


@dataclass(frozen=True)
class CompoundEquivalenceRelation:
    """A "use combination": one non-preferred term split into >= 2 descriptors."""

    non_preferred: str
    components: tuple[str, ...]


@dataclass
class ClassificationNode:
    notation: str
    labels: dict[str, str] = field(default_factory=dict)
    parent: str | None = None


@dataclass
class Thesaurus:
    languages: frozenset[str] = DEFAULT_LANGUAGES
    pivot: str = DEFAULT_PIVOT
    terms: dict[str, Term] = field(default_factory=dict)
    semantic_relations: set[SemanticRelation] = field(default_factory=set)
    equivalences: set[EquivalenceRelation] = field(default_factory=set)
    compounds: set[CompoundEquivalenceRelation] = field(default_factory=set)
    classification: dict[str, ClassificationNode] = field(default_factory=dict)

    def descriptors(self) -> list[Term]:
        return [t for t in self.terms.values() if t.kind is TermKind.DESCRIPTOR]

    def label(self, term_id: str, lang: str | None = None) -> str | None:
        term = self.terms.get(term_id)
        if term is None:
            return None
        return term.labels.get(lang or self.pivot)


def inverse_closure(relations: set[SemanticRelation]) -> set[SemanticRelation]:
    """Complete Broader/Narrower inverses and Related symmetry (idempotent)."""
    return relations | {r.inverse() for r in relations}


@dataclass
class StatsReport:
    descriptors: int = 0
    non_descriptors: int = 0
    ad_terms: int = 0
    broader: int = 0
    narrower: int = 0
    related: int = 0
    equivalences: int = 0
    compounds: int = 0
    classification_nodes: int = 0
    languages: int = 0

    def to_dict(self) -> dict[str, int]:
        return dict(vars(self))


def stats(thesaurus: Thesaurus) -> StatsReport:
    """Headline counts; deterministic for a given thesaurus."""
    report = StatsReport(languages=len(thesaurus.languages))
    for term in thesaurus.terms.values():
        if term.kind is TermKind.DESCRIPTOR:
            report.descriptors += 1
        elif term.kind is TermKind.NON_DESCRIPTOR:
            report.non_descriptors += 1
        else:
            report.ad_terms += 1
    for rel in thesaurus.semantic_relations:
        if rel.kind is RelationKind.BROADER:
            report.broader += 1
        elif rel.kind is RelationKind.NARROWER:
            report.narrower += 1
        else:
            report.related += 1
    report.equivalences = len(thesaurus.equivalences)
    report.compounds = len(thesaurus.compounds)
    report.classification_nodes = len(thesaurus.classification)
    return report


def find_broader_cycle(thesaurus: Thesaurus) -> list[str] | None:
    """Return one cycle in the Broader relation as a term-id path, or None.

    Iterative DFS with three-color marking; deterministic because roots and
    successors are visited in sorted order.
    """
    successors: dict[str, list[str]] = {}
    for rel in thesaurus.semantic_relations:
        if rel.kind is RelationKind.BROADER:
            successors.setdefault(rel.source, []).append(rel.target)
    for targets in successors.values():
        targets.sort()

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {tid: WHITE for tid in successors}
    for root in sorted(successors):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        path = [root]
        color[root] = GRAY
        while stack:
            node, idx = stack[-1]
            targets = successors.get(node, ())
            if idx < len(targets):
                stack[-1] = (node, idx + 1)
                nxt = targets[idx]
                # Leaves (no outgoing broader edge) can never close a cycle.
                state = color[nxt] if nxt in successors else BLACK
                if state == GRAY:
                    return path[path.index(nxt) :] + [nxt]
                if state == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
                    path.append(nxt)
            else:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def validate(thesaurus: Thesaurus) -> list[Diagnostic]:
    """Check every core invariant; returns findings instead of raising.

    Deterministic: findings come out sorted by (code, message).
    """
    out: list[Diagnostic] = []

    def error(code: str, message: str) -> None:
        out.append(Diagnostic(Severity.ERROR, code, message))

    def warning(code: str, message: str) -> None:
        out.append(Diagnostic(Severity.WARNING, code, message))

    terms = thesaurus.terms

    def kind_of(term_id: str) -> TermKind | None:
        term = terms.get(term_id)
        return None if term is None else term.kind

    for term in terms.values():
        if thesaurus.pivot not in term.labels:
            error("MISSING_PIVOT_LABEL", f"term {term.id} has no {thesaurus.pivot!r} label")
        for lang in term.labels:
            if lang not in thesaurus.languages:
                error("UNKNOWN_LANG", f"term {term.id} has label in undeclared language {lang!r}")
        for code in sorted(term.classification_codes):
            if code not in thesaurus.classification:
                error(
                    "UNKNOWN_CLASSIFICATION",
                    f"term {term.id} assigned to unknown notation {code!r}",
                )
        if term.classification_codes and term.kind is not TermKind.DESCRIPTOR:
            error(
                "NONDESCRIPTOR_CLASSIFIED",
                f"non-preferred term {term.id} carries classification codes",
            )
        # Only meaningful when the thesaurus has a classification at all;
        # small term-only thesauri legitimately carry none.
        if (
            term.kind is TermKind.DESCRIPTOR
            and thesaurus.classification
            and not term.classification_codes
        ):
            error(
                "DESCRIPTOR_NO_CLASSIFICATION",
                f"descriptor {term.id} is not assigned to any classification notation",
            )

    for rel in sorted(thesaurus.semantic_relations, key=lambda r: (r.kind.value, r.source, r.target)):
        for tid in (rel.source, rel.target):
            if tid not in terms:
                error("DANGLING_TERM", f"{rel.kind.value} relation references unknown term {tid}")
            elif terms[tid].kind is not TermKind.DESCRIPTOR:
                error(
                    "RELATION_NOT_DESCRIPTOR",
                    f"{rel.kind.value} relation touches non-descriptor {tid}",
                )
        if rel.source == rel.target:
            error("SELF_RELATION", f"{rel.kind.value} relation loops on {rel.source}")
        if rel.inverse() not in thesaurus.semantic_relations:
            error(
                "MISSING_INVERSE",
                f"({rel.source} {rel.kind.value} {rel.target}) lacks its inverse",
            )

    equiv_count: dict[str, int] = {}
    for eq in sorted(thesaurus.equivalences, key=lambda e: (e.non_preferred, e.preferred)):
        equiv_count[eq.non_preferred] = equiv_count.get(eq.non_preferred, 0) + 1
        np_kind = kind_of(eq.non_preferred)
        if np_kind is None:
            error("DANGLING_TERM", f"equivalence references unknown term {eq.non_preferred}")
        elif np_kind.is_preferred:
            error(
                "PREFERRED_AS_NONPREFERRED",
                f"descriptor {eq.non_preferred} appears on the non-preferred side",
            )
        p_kind = kind_of(eq.preferred)
        if p_kind is None:
            error("DANGLING_TERM", f"equivalence references unknown term {eq.preferred}")
        elif not p_kind.is_preferred:
            error(
                "EQUIV_TARGET_NOT_DESCRIPTOR",
                f"equivalence of {eq.non_preferred} points at non-descriptor {eq.preferred}",
            )

    for comp in sorted(thesaurus.compounds, key=lambda c: (c.non_preferred, c.components)):
        equiv_count[comp.non_preferred] = equiv_count.get(comp.non_preferred, 0) + 1
        np_kind = kind_of(comp.non_preferred)
        if np_kind is None:
            error("DANGLING_TERM", f"compound references unknown term {comp.non_preferred}")
        elif np_kind.is_preferred:
            error(
                "PREFERRED_AS_NONPREFERRED",
                f"descriptor {comp.non_preferred} appears on the non-preferred side",
            )
        if len(comp.components) < 2:
            error(
                "COMPOUND_TOO_FEW",
                f"compound for {comp.non_preferred} has {len(comp.components)} component(s)",
            )
        if len(set(comp.components)) != len(comp.components):
            error(
                "COMPOUND_DUPLICATE_COMPONENT",
                f"compound for {comp.non_preferred} repeats a component",
            )
        for cid in comp.components:
            c_kind = kind_of(cid)
            if c_kind is None:
                error("DANGLING_TERM", f"compound references unknown term {cid}")
            elif not c_kind.is_preferred:
                error(
                    "EQUIV_TARGET_NOT_DESCRIPTOR",
                    f"compound for {comp.non_preferred} contains non-descriptor {cid}",
                )

    for term in terms.values():
        n = equiv_count.get(term.id, 0)
        if term.kind is TermKind.NON_DESCRIPTOR:
            if n == 0:
                error("NONPREF_NO_EQUIV", f"non-descriptor {term.id} has no equivalence relation")
            elif n > 1:
                # Plain non-descriptors hold exactly one equivalence (or one
                # compound); several at once is what the AD kind is for.
                error(
                    "ND_MULTIPLE_EQUIV",
                    f"non-descriptor {term.id} holds {n} equivalence relations",
                )
        elif term.kind is TermKind.ALTERNATIVE_NON_DESCRIPTOR:
            if n == 0:
                error("NONPREF_NO_EQUIV", f"AD term {term.id} has no equivalence relation")
            elif n == 1:
                warning(
                    "AD_SINGLE_RELATION",
                    f"term {term.id} is flagged AD but holds only one relation",
                )

    cycle = find_broader_cycle(thesaurus)
    if cycle is not None:
        error("BROADER_CYCLE", "broader cycle: " + " -> ".join(cycle))

    seen: set[str] = set()
    for notation in sorted(thesaurus.classification):
        node = thesaurus.classification[notation]
        if node.parent is not None and node.parent not in thesaurus.classification:
            error(
                "DANGLING_CLASSIFICATION",
                f"notation {notation} has unknown parent {node.parent!r}",
            )
        chain = []
        cur: str | None = notation
        while cur is not None and cur in thesaurus.classification and cur not in seen:
            if cur in chain:
                error(
                    "CLASSIFICATION_CYCLE",
                    "classification parent cycle: " + " -> ".join(chain + [cur]),
                )
                break
            chain.append(cur)
            cur = thesaurus.classification[cur].parent
        seen.update(chain)

    out.sort(key=lambda d: (d.severity.value, d.code, d.message))
    return out
