"""Query-side services: label resolution, query expansion, co-word ranking.

The label index resolves a query string to descriptor concepts, following
the thesaurus's own redirects: a non-preferred label leads to its preferred
concept, an AD label fans out to all of its use-targets, and compound
equivalences surface as *conjunctive groups* — component sets a downstream
search engine must AND together, never flattened into the disjunctive set.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .linker import MappingLink
from .model import Diagnostic, RelationKind, Severity, TermKind, Thesaurus
from .rdf import Iri
from .skosgraph import UriPolicy, mint_iri

ORIGIN_SELF = "self"
ORIGIN_EXACT = "exactMatch"
ORIGIN_NARROWER = "narrower"
ORIGIN_RELATED = "related"
ORIGIN_USE = "use-redirect"
ORIGIN_COMPOUND = "compound-redirect"


def _fold(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


@dataclass
class LabelIndex:
    thesaurus: Thesaurus
    policy: UriPolicy
    # (case-folded label, language) → term ids
    concepts: dict[tuple[str, str], set[str]] = field(default_factory=dict)
    nonpreferred: dict[tuple[str, str], set[str]] = field(default_factory=dict)
    # per non-preferred term: its use-targets and compound component groups
    use_targets: dict[str, set[str]] = field(default_factory=dict)
    compound_groups: dict[str, list[tuple[str, ...]]] = field(default_factory=dict)

    def concept_iri(self, term_id: str) -> Iri:
        return mint_iri(self.policy, "concept", term_id)


def build_label_index(thesaurus: Thesaurus, policy: UriPolicy | None = None) -> LabelIndex:
    index = LabelIndex(thesaurus=thesaurus, policy=policy or UriPolicy())
    for term in thesaurus.terms.values():
        table = index.concepts if term.kind is TermKind.DESCRIPTOR else index.nonpreferred
        for lang, label in term.labels.items():
            table.setdefault((_fold(label), lang), set()).add(term.id)
    for eq in thesaurus.equivalences:
        index.use_targets.setdefault(eq.non_preferred, set()).add(eq.preferred)
    grouped: dict[str, list[tuple[str, ...]]] = {}
    for comp in thesaurus.compounds:
        grouped.setdefault(comp.non_preferred, []).append(comp.components)
    for term_id, groups in grouped.items():
        index.compound_groups[term_id] = sorted(groups)
    return index


@dataclass(frozen=True)
class Redirect:
    """Trace entry: how one non-preferred term routed the query onward."""

    term_id: str
    origin: str  # use-redirect or compound-redirect
    concepts: tuple[Iri, ...]


@dataclass
class ResolveResult:
    concepts: set[Iri]  # disjunctive resolution (direct + use-targets)
    direct: set[Iri]  # concepts matched as their own preferred label
    conjunctive_groups: list[tuple[Iri, ...]]
    redirects: list[Redirect]


def resolve(index: LabelIndex, query: str, language: str) -> ResolveResult:
    """Exact (case-folded) label lookup with non-preferred redirection.

    An unknown label simply resolves to nothing — that is not an error.
    """
    key = (_fold(query), language)
    direct = {index.concept_iri(tid) for tid in index.concepts.get(key, ())}
    concepts = set(direct)
    groups: list[tuple[Iri, ...]] = []
    redirects: list[Redirect] = []
    for term_id in sorted(index.nonpreferred.get(key, ())):
        targets = tuple(index.concept_iri(t) for t in sorted(index.use_targets.get(term_id, ())))
        if targets:
            concepts.update(targets)
            redirects.append(Redirect(term_id, ORIGIN_USE, targets))
        for group in index.compound_groups.get(term_id, ()):
            group_iris = tuple(index.concept_iri(t) for t in group)
            groups.append(group_iris)
            redirects.append(Redirect(term_id, ORIGIN_COMPOUND, group_iris))
    return ResolveResult(concepts=concepts, direct=direct, conjunctive_groups=sorted(groups), redirects=redirects)


@dataclass
class ExpandOptions:
    follow_exact: bool = True
    follow_narrower: bool = False
    follow_related: bool = False
    depth: int = 1


@dataclass
class ExpansionResult:
    query: str
    matched_concepts: set[Iri]
    expansion: set[tuple[Iri, str]]  # (concept, origin); one IRI may carry several origins
    conjunctive_groups: list[tuple[Iri, ...]]

    def ordered(self) -> list[tuple[Iri, str]]:
        return sorted(self.expansion, key=lambda pair: (pair[0].value, pair[1]))


def expand(
    index: LabelIndex,
    links: list[MappingLink],
    query: str,
    language: str,
    options: ExpandOptions | None = None,
) -> ExpansionResult:
    """Resolve a query, then grow the concept set along the enabled axes.

    Every resolved concept enters with origin "self" (redirected ones also
    keep their redirect origin); exactMatch targets, narrower descendants
    (to `depth`) and related neighbors are added per the options. Adding an
    option never removes elements.
    """
    options = options or ExpandOptions()
    resolved = resolve(index, query, language)
    expansion: set[tuple[Iri, str]] = {(c, ORIGIN_SELF) for c in resolved.concepts}
    for redirect in resolved.redirects:
        if redirect.origin == ORIGIN_USE:
            expansion.update((c, ORIGIN_USE) for c in redirect.concepts)

    if options.follow_exact:
        exact_targets: dict[str, list[Iri]] = {}
        for link in links:
            if link.match_type == "exactMatch":
                exact_targets.setdefault(link.source.value, []).append(link.target)
        for concept in resolved.concepts:
            for target in exact_targets.get(concept.value, ()):
                expansion.add((target, ORIGIN_EXACT))

    concept_ids = {
        tid
        for tid in index.thesaurus.terms
        if index.concept_iri(tid) in resolved.concepts
    }
    if options.follow_narrower:
        frontier = set(concept_ids)
        seen = set(frontier)
        for _ in range(max(0, options.depth)):
            step: set[str] = set()
            for rel in index.thesaurus.semantic_relations:
                if rel.kind is RelationKind.NARROWER and rel.source in frontier and rel.target not in seen:
                    step.add(rel.target)
            if not step:
                break
            expansion.update((index.concept_iri(tid), ORIGIN_NARROWER) for tid in step)
            seen |= step
            frontier = step
    if options.follow_related:
        for rel in index.thesaurus.semantic_relations:
            if rel.kind is RelationKind.RELATED and rel.source in concept_ids:
                expansion.add((index.concept_iri(rel.target), ORIGIN_RELATED))

    return ExpansionResult(
        query=query,
        matched_concepts=resolved.concepts,
        expansion=expansion,
        conjunctive_groups=resolved.conjunctive_groups,
    )


@dataclass
class CoWordMatrix:
    """Symmetric co-occurrence counts over unordered descriptor pairs."""

    counts: dict[tuple[str, str], int] = field(default_factory=dict)  # key sorted by IRI value
    document_count: int = 0

    def count(self, a: Iri, b: Iri) -> int:
        key = (a.value, b.value) if a.value <= b.value else (b.value, a.value)
        return self.counts.get(key, 0)


def build_coword(
    corpus: list[tuple[str, set[Iri]]],
    valid_descriptors: set[Iri] | None = None,
) -> CoWordMatrix:
    """Count, per unordered descriptor pair, the documents containing both.

    Pairs that never co-occur are absent. When `valid_descriptors` is given,
    an unknown IRI in the corpus raises ValueError.
    """
    matrix = CoWordMatrix(document_count=len(corpus))
    for doc_id, descriptors in corpus:
        if valid_descriptors is not None:
            unknown = {d.value for d in descriptors} - {d.value for d in valid_descriptors}
            if unknown:
                raise ValueError(f"document {doc_id!r} references unknown descriptors: {sorted(unknown)}")
        values = sorted({d.value for d in descriptors})
        for pos, first in enumerate(values):
            for second in values[pos + 1 :]:
                key = (first, second)
                matrix.counts[key] = matrix.counts.get(key, 0) + 1
    return matrix


def recommend(matrix: CoWordMatrix, seed: Iri, k: int) -> list[tuple[Iri, int]]:
    """Top-k co-occurring descriptors for a seed, by count then IRI order."""
    if k <= 0:
        raise ValueError("k must be positive")
    neighbors: dict[str, int] = {}
    for (first, second), count in matrix.counts.items():
        if first == seed.value:
            neighbors[second] = count
        elif second == seed.value:
            neighbors[first] = count
    ranked = sorted(neighbors.items(), key=lambda item: (-item[1], item[0]))
    return [(Iri(value), count) for value, count in ranked[:k]]


def load_corpus(
    path: str | Path,
    thesaurus: Thesaurus,
    policy: UriPolicy,
) -> tuple[list[tuple[str, set[Iri]]], list[Diagnostic]]:
    """Read a corpus TSV — header (doc_id, descriptor_id), one row per assignment."""
    path = Path(path)
    diagnostics: list[Diagnostic] = []
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        diagnostics.append(
            Diagnostic(Severity.ERROR, "MISSING_FILE", f"file not found: {path}", file=path.name)
        )
        return [], diagnostics
    text = unicodedata.normalize("NFC", text.lstrip("﻿"))
    docs: dict[str, set[Iri]] = {}
    order: list[str] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line_no == 1:
            if line.split("\t") != ["doc_id", "descriptor_id"]:
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR, "BAD_HEADER", "expected header: doc_id, descriptor_id", file=path.name, line=1
                    )
                )
            continue
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "WRONG_FIELD_COUNT",
                    f"expected 2 fields, found {len(fields)}",
                    file=path.name,
                    line=line_no,
                )
            )
            continue
        doc_id, term_id = fields
        term = thesaurus.terms.get(term_id)
        if term is None or term.kind is not TermKind.DESCRIPTOR:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "DANGLING_TERM",
                    f"descriptor_id {term_id!r} is not a descriptor of the thesaurus",
                    file=path.name,
                    line=line_no,
                )
            )
            continue
        if doc_id not in docs:
            docs[doc_id] = set()
            order.append(doc_id)
        docs[doc_id].add(mint_iri(policy, "concept", term_id))
    return [(doc_id, docs[doc_id]) for doc_id in order], diagnostics
