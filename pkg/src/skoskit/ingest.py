"""Thesaurus interchange format: parsing, assembly, and export.

The interchange bundle is five UTF-8 TSV files, each with a header row:

    terms.tsv           id, kind(D|ND|AD)
    labels.tsv          term_id, lang, label
    relations.tsv       kind(BT|NT|RT|USE|USE_COMB), source_id, target_id, group_key
    classification.tsv  notation, parent_notation, lang, label
    assignments.tsv     term_id, notation

group_key is empty except on USE_COMB rows, where it groups the components
of one compound equivalence (component order = file order). Parsing follows
a collect-all-errors contract: it never stops at the first bad row.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .model import (
    DEFAULT_LANGUAGES,
    DEFAULT_PIVOT,
    ClassificationNode,
    CompoundEquivalenceRelation,
    Diagnostic,
    EquivalenceRelation,
    RelationKind,
    SemanticRelation,
    Severity,
    Term,
    TermKind,
    Thesaurus,
    has_errors,
    inverse_closure,
    validate,
)

TERM_KINDS = {"D": TermKind.DESCRIPTOR, "ND": TermKind.NON_DESCRIPTOR, "AD": TermKind.ALTERNATIVE_NON_DESCRIPTOR}
RELATION_KINDS = {"BT": RelationKind.BROADER, "NT": RelationKind.NARROWER, "RT": RelationKind.RELATED}

_HEADERS = {
    "terms": ["id", "kind"],
    "labels": ["term_id", "lang", "label"],
    "relations": ["kind", "source_id", "target_id", "group_key"],
    "classification": ["notation", "parent_notation", "lang", "label"],
    "assignments": ["term_id", "notation"],
}


@dataclass(frozen=True)
class InterchangeBundle:
    terms_file: Path
    labels_file: Path
    relations_file: Path
    classification_file: Path
    assignments_file: Path

    @classmethod
    def from_dir(cls, directory: str | Path) -> "InterchangeBundle":
        d = Path(directory)
        return cls(
            terms_file=d / "terms.tsv",
            labels_file=d / "labels.tsv",
            relations_file=d / "relations.tsv",
            classification_file=d / "classification.tsv",
            assignments_file=d / "assignments.tsv",
        )


class RawTerm(NamedTuple):
    line: int
    id: str
    kind: TermKind


class RawLabel(NamedTuple):
    line: int
    term_id: str
    lang: str
    label: str


class RawRelation(NamedTuple):
    line: int
    kind: str
    source: str
    target: str
    group_key: str


class RawClassificationRow(NamedTuple):
    line: int
    notation: str
    parent: str
    lang: str
    label: str


class RawAssignment(NamedTuple):
    line: int
    term_id: str
    notation: str


@dataclass
class RawRecords:
    terms: list[RawTerm] = field(default_factory=list)
    labels: list[RawLabel] = field(default_factory=list)
    relations: list[RawRelation] = field(default_factory=list)
    classification: list[RawClassificationRow] = field(default_factory=list)
    assignments: list[RawAssignment] = field(default_factory=list)


def _read_rows(path: Path, expected_header: list[str], diagnostics: list[Diagnostic]) -> list[tuple[int, list[str]]]:
    """Read one TSV file into (line_no, fields) rows, validating the header.

    Tabs are hard field separators — there is no quoting in this format.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        diagnostics.append(
            Diagnostic(Severity.ERROR, "MISSING_FILE", f"file not found: {path}", file=path.name)
        )
        return []
    except UnicodeDecodeError as exc:
        diagnostics.append(
            Diagnostic(Severity.ERROR, "BAD_ENCODING", f"not valid UTF-8: {exc}", file=path.name)
        )
        return []
    text = unicodedata.normalize("NFC", text.lstrip("﻿"))
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    rows: list[tuple[int, list[str]]] = []
    header_ok = False
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        if line_no == 1:
            header = line.split("\t")
            if header != expected_header:
                diagnostics.append(
                    Diagnostic(
                        Severity.ERROR,
                        "BAD_HEADER",
                        f"expected header {expected_header}, found {header}",
                        file=path.name,
                        line=1,
                    )
                )
            else:
                header_ok = True
            continue
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(expected_header):
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "WRONG_FIELD_COUNT",
                    f"expected {len(expected_header)} fields, found {len(fields)}",
                    file=path.name,
                    line=line_no,
                )
            )
            continue
        if header_ok:
            rows.append((line_no, fields))
    return rows


def parse_bundle(
    bundle: InterchangeBundle,
    languages: frozenset[str] = DEFAULT_LANGUAGES,
) -> tuple[RawRecords, list[Diagnostic]]:
    """Parse all five files, collecting every error before returning."""
    diagnostics: list[Diagnostic] = []
    records = RawRecords()

    def err(file: Path, line: int, code: str, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, code, message, file=file.name, line=line))

    # terms.tsv
    seen_ids: set[str] = set()
    for line_no, (tid, kind) in _read_rows(bundle.terms_file, _HEADERS["terms"], diagnostics):
        if not tid:
            err(bundle.terms_file, line_no, "EMPTY_FIELD", "empty term id")
            continue
        if kind not in TERM_KINDS:
            err(bundle.terms_file, line_no, "UNKNOWN_KIND", f"unknown term kind {kind!r} (expected D, ND or AD)")
            continue
        if tid in seen_ids:
            err(bundle.terms_file, line_no, "DUPLICATE_KEY", f"duplicate term id {tid!r}")
            continue
        seen_ids.add(tid)
        records.terms.append(RawTerm(line_no, tid, TERM_KINDS[kind]))

    # labels.tsv
    seen_labels: set[tuple[str, str]] = set()
    for line_no, (tid, lang, label) in _read_rows(bundle.labels_file, _HEADERS["labels"], diagnostics):
        if not tid or not label:
            err(bundle.labels_file, line_no, "EMPTY_FIELD", "term_id and label must be non-empty")
            continue
        if lang not in languages:
            err(bundle.labels_file, line_no, "UNKNOWN_LANG", f"undeclared language {lang!r}")
            continue
        if (tid, lang) in seen_labels:
            err(bundle.labels_file, line_no, "DUPLICATE_KEY", f"duplicate label for ({tid}, {lang})")
            continue
        seen_labels.add((tid, lang))
        records.labels.append(RawLabel(line_no, tid, lang, label))

    # relations.tsv
    seen_relations: set[tuple[str, str, str, str]] = set()
    for line_no, (kind, source, target, group_key) in _read_rows(
        bundle.relations_file, _HEADERS["relations"], diagnostics
    ):
        if kind not in RELATION_KINDS and kind not in ("USE", "USE_COMB"):
            err(bundle.relations_file, line_no, "UNKNOWN_KIND", f"unknown relation kind {kind!r}")
            continue
        if not source or not target:
            err(bundle.relations_file, line_no, "EMPTY_FIELD", "source_id and target_id must be non-empty")
            continue
        if kind == "USE_COMB" and not group_key:
            err(bundle.relations_file, line_no, "GROUP_KEY_REQUIRED", "USE_COMB rows need a group_key")
            continue
        if kind != "USE_COMB" and group_key:
            err(bundle.relations_file, line_no, "GROUP_KEY_FORBIDDEN", f"group_key is only valid on USE_COMB rows, found {group_key!r}")
            continue
        row_key = (kind, source, target, group_key)
        if row_key in seen_relations:
            err(bundle.relations_file, line_no, "DUPLICATE_ROW", f"duplicate relation row {row_key}")
            continue
        seen_relations.add(row_key)
        records.relations.append(RawRelation(line_no, kind, source, target, group_key))

    # classification.tsv
    seen_class: set[tuple[str, str]] = set()
    for line_no, (notation, parent, lang, label) in _read_rows(
        bundle.classification_file, _HEADERS["classification"], diagnostics
    ):
        if not notation or not label:
            err(bundle.classification_file, line_no, "EMPTY_FIELD", "notation and label must be non-empty")
            continue
        if lang not in languages:
            err(bundle.classification_file, line_no, "UNKNOWN_LANG", f"undeclared language {lang!r}")
            continue
        if (notation, lang) in seen_class:
            err(bundle.classification_file, line_no, "DUPLICATE_KEY", f"duplicate label for ({notation}, {lang})")
            continue
        seen_class.add((notation, lang))
        records.classification.append(RawClassificationRow(line_no, notation, parent, lang, label))

    # assignments.tsv
    seen_assign: set[tuple[str, str]] = set()
    for line_no, (tid, notation) in _read_rows(bundle.assignments_file, _HEADERS["assignments"], diagnostics):
        if not tid or not notation:
            err(bundle.assignments_file, line_no, "EMPTY_FIELD", "term_id and notation must be non-empty")
            continue
        if (tid, notation) in seen_assign:
            err(bundle.assignments_file, line_no, "DUPLICATE_KEY", f"duplicate assignment ({tid}, {notation})")
            continue
        seen_assign.add((tid, notation))
        records.assignments.append(RawAssignment(line_no, tid, notation))

    return records, diagnostics


def assemble_thesaurus(
    records: RawRecords,
    languages: frozenset[str] = DEFAULT_LANGUAGES,
    pivot: str = DEFAULT_PIVOT,
) -> tuple[Thesaurus, list[Diagnostic]]:
    """Assemble a Thesaurus from parsed records and validate every invariant.

    Inverse semantic relations are completed here, so input files only need
    one direction of each hierarchical pair. The result should be used only
    when the returned diagnostics contain no errors.
    """
    diagnostics: list[Diagnostic] = []
    thesaurus = Thesaurus(languages=languages, pivot=pivot)

    for raw in records.terms:
        thesaurus.terms[raw.id] = Term(id=raw.id, kind=raw.kind)

    for raw in records.labels:
        term = thesaurus.terms.get(raw.term_id)
        if term is None:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "DANGLING_TERM",
                    f"label references unknown term {raw.term_id!r}",
                    file="labels.tsv",
                    line=raw.line,
                )
            )
            continue
        term.labels[raw.lang] = raw.label

    compound_rows: dict[tuple[str, str], list[str]] = {}
    relations: set[SemanticRelation] = set()
    for raw in records.relations:
        if raw.kind in RELATION_KINDS:
            relations.add(SemanticRelation(raw.source, RELATION_KINDS[raw.kind], raw.target))
        elif raw.kind == "USE":
            thesaurus.equivalences.add(EquivalenceRelation(raw.source, raw.target))
        else:  # USE_COMB
            compound_rows.setdefault((raw.source, raw.group_key), []).append(raw.target)
    thesaurus.semantic_relations = inverse_closure(relations)
    for (source, _group), components in sorted(compound_rows.items()):
        thesaurus.compounds.add(CompoundEquivalenceRelation(source, tuple(components)))

    for raw in records.classification:
        parent = raw.parent or None
        node = thesaurus.classification.get(raw.notation)
        if node is None:
            node = ClassificationNode(notation=raw.notation, parent=parent)
            thesaurus.classification[raw.notation] = node
        elif node.parent != parent:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "INCONSISTENT_PARENT",
                    f"notation {raw.notation!r} declares parents {node.parent!r} and {parent!r}",
                    file="classification.tsv",
                    line=raw.line,
                )
            )
            continue
        node.labels[raw.lang] = raw.label

    for raw in records.assignments:
        term = thesaurus.terms.get(raw.term_id)
        if term is None:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "DANGLING_TERM",
                    f"assignment references unknown term {raw.term_id!r}",
                    file="assignments.tsv",
                    line=raw.line,
                )
            )
            continue
        term.classification_codes.add(raw.notation)

    diagnostics.extend(validate(thesaurus))
    return thesaurus, diagnostics


def load_thesaurus(
    directory: str | Path,
    languages: frozenset[str] = DEFAULT_LANGUAGES,
    pivot: str = DEFAULT_PIVOT,
) -> tuple[Thesaurus, list[Diagnostic]]:
    """Parse + assemble in one step; assembly is skipped on parse errors."""
    records, diagnostics = parse_bundle(InterchangeBundle.from_dir(directory), languages=languages)
    if has_errors(diagnostics):
        return Thesaurus(languages=languages, pivot=pivot), diagnostics
    thesaurus, more = assemble_thesaurus(records, languages=languages, pivot=pivot)
    return thesaurus, diagnostics + more


def export_bundle(thesaurus: Thesaurus, directory: str | Path) -> InterchangeBundle:
    """Write a thesaurus back out as an interchange bundle.

    Output is deterministic (rows sorted), and for any valid thesaurus
    `assemble_thesaurus(parse_bundle(export_bundle(T)))` reproduces T.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    bundle = InterchangeBundle.from_dir(d)
    kind_codes = {v: k for k, v in TERM_KINDS.items()}

    term_rows = [(t.id, kind_codes[t.kind]) for t in thesaurus.terms.values()]
    _write_tsv(bundle.terms_file, _HEADERS["terms"], sorted(term_rows))

    label_rows = [
        (t.id, lang, label)
        for t in thesaurus.terms.values()
        for lang, label in t.labels.items()
    ]
    _write_tsv(bundle.labels_file, _HEADERS["labels"], sorted(label_rows))

    relation_rows: list[tuple[str, str, str, str]] = []
    for rel in thesaurus.semantic_relations:
        # Narrower edges are the closure of Broader ones; export one side.
        if rel.kind is RelationKind.NARROWER:
            continue
        code = "BT" if rel.kind is RelationKind.BROADER else "RT"
        relation_rows.append((code, rel.source, rel.target, ""))
    for eq in thesaurus.equivalences:
        relation_rows.append(("USE", eq.non_preferred, eq.preferred, ""))
    relation_rows.sort()
    # Compound rows go last, unsorted within a group: row order carries
    # component order, so sorting them by target would scramble it.
    for idx, comp in enumerate(sorted(thesaurus.compounds, key=lambda c: (c.non_preferred, c.components))):
        for component in comp.components:
            relation_rows.append(("USE_COMB", comp.non_preferred, component, f"g{idx + 1}"))
    _write_tsv(bundle.relations_file, _HEADERS["relations"], relation_rows)

    class_rows = [
        (node.notation, node.parent or "", lang, label)
        for node in thesaurus.classification.values()
        for lang, label in node.labels.items()
    ]
    _write_tsv(bundle.classification_file, _HEADERS["classification"], sorted(class_rows))

    assignment_rows = [
        (t.id, code) for t in thesaurus.terms.values() for code in t.classification_codes
    ]
    _write_tsv(bundle.assignments_file, _HEADERS["assignments"], sorted(assignment_rows))
    return bundle


def _write_tsv(path: Path, header: list[str], rows: list[tuple[str, ...]]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
