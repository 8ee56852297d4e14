"""Cross-vocabulary link discovery and mapping validation.

Link candidates are found by comparing descriptor labels against a target
vocabulary's preferred labels with normalized Levenshtein distance
(edit distance divided by the longer string's length, case-folded input,
diacritics kept). Distance 0 classifies as skos:exactMatch, anything else
up to the threshold (default 0.21) as skos:closeMatch; broad, narrow and
related match types only ever enter through imported mapping records.

The batch matcher runs a banded dynamic program compiled with numba. The
band cutoff over-approximates the threshold, and the exact float filter is
applied afterwards in Python — so the scalar functions and the batch
engine (pruned or not, one worker or many) agree bit-for-bit.
"""

from __future__ import annotations

import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import unquote

from .model import Diagnostic, Severity, TermKind, Thesaurus
from .rdf import SKOS, STANDARD_PREFIXES, Graph, Iri
from .skosgraph import UriPolicy, mint_iri

DEFAULT_THRESHOLD = 0.21

MATCH_TYPES = ("exactMatch", "closeMatch", "broadMatch", "narrowMatch", "relatedMatch")

PROVENANCE_EXACT = "exact-string"
PROVENANCE_LEVENSHTEIN = "levenshtein"
PROVENANCE_IMPORTED = "imported"


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs) between a and b.

    Operates on Unicode scalar values; symmetric and satisfies the triangle
    inequality.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # deletion
                    current[j - 1] + 1,  # insertion
                    previous[j - 1] + (ca != cb),  # substitution
                )
            )
        previous = current
    return previous[-1]


def normalized_distance(a: str, b: str) -> float:
    """levenshtein(a, b) scaled by the longer length; both empty → 0.0."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


@dataclass(frozen=True)
class TargetEntry:
    iri: Iri
    lang: str
    label: str
    preferred: bool


@dataclass
class TargetVocabulary:
    name: str
    entries: list[TargetEntry]


@dataclass(frozen=True)
class MappingLink:
    source: Iri
    target: Iri
    match_type: str
    score: float
    provenance: str


@dataclass(frozen=True)
class ImportedMapping:
    """One row of an imported mapping file; conjunctive when len(targets) > 1."""

    source: Iri
    targets: tuple[Iri, ...]
    match_type: str


@dataclass(frozen=True)
class MappingFinding:
    severity: Severity
    code: str
    source: Iri
    targets: tuple[Iri, ...]
    message: str


@dataclass
class MappingValidationReport:
    findings: list[MappingFinding]

    @property
    def errors(self) -> list[MappingFinding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[MappingFinding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]


def load_target_vocabulary(path: str | Path) -> tuple[TargetVocabulary, list[Diagnostic]]:
    """Read a target vocabulary TSV: header (iri, lang, label, preferred)."""
    path = Path(path)
    diagnostics: list[Diagnostic] = []
    entries: list[TargetEntry] = []
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        diagnostics.append(
            Diagnostic(Severity.ERROR, "MISSING_FILE", f"file not found: {path}", file=path.name)
        )
        return TargetVocabulary(path.stem, []), diagnostics
    text = unicodedata.normalize("NFC", text.lstrip("﻿"))

    def err(line_no: int, code: str, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, code, message, file=path.name, line=line_no))

    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line_no == 1:
            if line.split("\t") != ["iri", "lang", "label", "preferred"]:
                err(1, "BAD_HEADER", "expected header: iri, lang, label, preferred")
            continue
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            err(line_no, "WRONG_FIELD_COUNT", f"expected 4 fields, found {len(fields)}")
            continue
        iri_text, lang, label, preferred = fields
        if preferred not in ("0", "1"):
            err(line_no, "BAD_FLAG", f"preferred must be 0 or 1, found {preferred!r}")
            continue
        try:
            iri = Iri(iri_text)
        except ValueError as exc:
            err(line_no, "BAD_IRI", str(exc))
            continue
        entries.append(TargetEntry(iri, lang, label, preferred == "1"))
    return TargetVocabulary(path.stem, entries), diagnostics


# --- batch matching ---------------------------------------------------------

_kernel = None


def _get_kernel():
    """Compile (or fetch the cached) banded edit-distance kernel.

    For every (source, target) pair whose distance does not exceed
    cutoff = int(threshold * maxlen) + 1, the kernel emits the exact
    integer distance. A true candidate has distance ≤ threshold * maxlen
    < cutoff, so the integer over-approximation never loses links; the
    exact float comparison happens later in `_select_links`. With
    use_prune the length filter |len(a)-len(b)| > cutoff skips pairs the
    band could never accept anyway.
    """
    global _kernel
    if _kernel is not None:
        return _kernel
    import numba
    import numpy as np

    @numba.njit(cache=True, nogil=True)
    def kernel(src_codes, src_off, tgt_codes, tgt_off, threshold, out_src, out_tgt, out_dist, use_prune):
        n_src = src_off.shape[0] - 1
        n_tgt = tgt_off.shape[0] - 1
        n_out = 0
        cap = out_src.shape[0]
        maxt = 0
        for j in range(n_tgt):
            length = tgt_off[j + 1] - tgt_off[j]
            if length > maxt:
                maxt = length
        prev = np.empty(maxt + 1, dtype=np.int32)
        cur = np.empty(maxt + 1, dtype=np.int32)
        for i in range(n_src):
            a0 = src_off[i]
            m = src_off[i + 1] - a0
            for j in range(n_tgt):
                b0 = tgt_off[j]
                n = tgt_off[j + 1] - b0
                mx = m if m > n else n
                k = int(threshold * mx) + 1
                d = m - n if m > n else n - m
                if use_prune and d > k:
                    continue
                for q in range(n + 1):
                    prev[q] = q
                bad = k + 1
                dist = -1
                for p in range(1, m + 1):
                    cur[0] = p
                    rowmin = p
                    ca = src_codes[a0 + p - 1]
                    lo = p - k
                    if lo < 1:
                        lo = 1
                    hi = p + k
                    if hi > n:
                        hi = n
                    for q in range(1, lo):
                        cur[q] = bad
                    for q in range(lo, hi + 1):
                        cost = 0 if ca == tgt_codes[b0 + q - 1] else 1
                        v = prev[q - 1] + cost
                        v2 = prev[q] + 1
                        if v2 < v:
                            v = v2
                        v3 = cur[q - 1] + 1
                        if v3 < v:
                            v = v3
                        cur[q] = v
                        if v < rowmin:
                            rowmin = v
                    for q in range(hi + 1, n + 1):
                        cur[q] = bad
                    if rowmin > k:
                        dist = bad
                        break
                    prev, cur = cur, prev
                if dist == -1:
                    dist = prev[n]
                if dist <= k:
                    if n_out >= cap:
                        return -1
                    out_src[n_out] = i
                    out_tgt[n_out] = j
                    out_dist[n_out] = dist
                    n_out += 1
        return n_out

    _kernel = kernel
    return kernel


def _encode(labels: list[str]):
    """Flatten labels into one int32 code-point array plus offsets."""
    import numpy as np

    codes = np.empty(sum(len(s) for s in labels), dtype=np.int32)
    offsets = np.zeros(len(labels) + 1, dtype=np.int64)
    pos = 0
    for idx, label in enumerate(labels):
        for ch in label:
            codes[pos] = ord(ch)
            pos += 1
        offsets[idx + 1] = pos
    return codes, offsets


def _match_candidates(
    src_labels: list[str],
    tgt_labels: list[str],
    threshold: float,
    prune: bool,
) -> list[tuple[int, int, int]]:
    """All (src index, tgt index, distance) with distance under the band cutoff."""
    import numpy as np

    if not src_labels or not tgt_labels:
        return []
    kernel = _get_kernel()
    src_codes, src_off = _encode(src_labels)
    tgt_codes, tgt_off = _encode(tgt_labels)
    cap = max(1024, 4 * max(len(src_labels), len(tgt_labels)))
    while True:
        out_src = np.empty(cap, dtype=np.int64)
        out_tgt = np.empty(cap, dtype=np.int64)
        out_dist = np.empty(cap, dtype=np.int32)
        n = kernel(src_codes, src_off, tgt_codes, tgt_off, threshold, out_src, out_tgt, out_dist, prune)
        if n >= 0:
            return [(int(out_src[x]), int(out_tgt[x]), int(out_dist[x])) for x in range(n)]
        cap *= 4


def _select_links(
    sources: list[tuple[Iri, str]],
    targets: list[tuple[Iri, str]],
    candidates: list[tuple[int, int, int]],
    threshold: float,
) -> list[MappingLink]:
    """Apply the exact threshold, keep minimal-distance targets per source.

    This is the single arbiter shared by every engine configuration, which
    is what makes pruned/unpruned and 1-vs-n-worker runs byte-identical.
    """
    per_source: dict[int, dict[Iri, float]] = {}
    for si, ti, dist in candidates:
        longest = max(len(sources[si][1]), len(targets[ti][1]))
        score = dist / longest if longest else 0.0
        if score > threshold:
            continue
        bucket = per_source.setdefault(si, {})
        target_iri = targets[ti][0]
        if target_iri not in bucket or score < bucket[target_iri]:
            bucket[target_iri] = score
    links: list[MappingLink] = []
    for si, bucket in per_source.items():
        best = min(bucket.values())
        source_iri = sources[si][0]
        for target_iri in sorted((t for t, s in bucket.items() if s == best), key=lambda t: t.value):
            if best == 0.0:
                links.append(MappingLink(source_iri, target_iri, "exactMatch", 0.0, PROVENANCE_EXACT))
            else:
                links.append(MappingLink(source_iri, target_iri, "closeMatch", best, PROVENANCE_LEVENSHTEIN))
    links.sort(key=lambda link: (link.source.value, link.target.value))
    return links


def discover_links(
    thesaurus: Thesaurus,
    policy: UriPolicy,
    target: TargetVocabulary,
    threshold: float = DEFAULT_THRESHOLD,
    language: str = "de",
    jobs: int = 1,
    prune: bool = True,
) -> list[MappingLink]:
    """Match descriptor labels in one language against a target vocabulary.

    Only descriptors having a label in `language` act as sources, and only
    preferred target entries participate. Matching is case-folded. Per
    source, only the minimal-distance target(s) survive; a distance of 0
    yields exactMatch, anything else within the threshold closeMatch.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be within [0, 1], got {threshold}")
    if language not in thesaurus.languages:
        raise ValueError(f"language {language!r} not declared by the thesaurus")

    sources: list[tuple[Iri, str]] = []
    for term_id in sorted(thesaurus.terms):
        term = thesaurus.terms[term_id]
        if term.kind is TermKind.DESCRIPTOR and language in term.labels:
            sources.append((mint_iri(policy, "concept", term_id), term.labels[language].casefold()))
    targets = [(e.iri, e.label.casefold()) for e in target.entries if e.preferred]
    if not sources or not targets:
        return []

    tgt_labels = [label for _, label in targets]
    if jobs <= 1:
        candidates = _match_candidates([label for _, label in sources], tgt_labels, threshold, prune)
    else:
        # Contiguous source chunks; each is independent, so the merged
        # candidate set is identical to the single-worker one.
        step = (len(sources) + jobs - 1) // jobs
        chunks = [sources[pos : pos + step] for pos in range(0, len(sources), step)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_match_candidates, [label for _, label in chunk], tgt_labels, threshold, prune)
                for chunk in chunks
            ]
            candidates = []
            for chunk_no, future in enumerate(futures):
                base = chunk_no * step
                candidates.extend((base + si, ti, dist) for si, ti, dist in future.result())
    return _select_links(sources, targets, candidates, threshold)


# --- imported mappings and validation ----------------------------------------


def import_mappings(
    path: str | Path,
    thesaurus: Thesaurus,
    policy: UriPolicy,
) -> tuple[list[ImportedMapping], list[Diagnostic]]:
    """Read an imported mapping TSV (no header).

    Row shape: source_id, one or more target IRIs, match_type. Several
    target columns mean the source was mapped to the *combination* of the
    targets (a conjunctive record). The source id is resolved against the
    thesaurus: descriptors map from their concept IRI, non-preferred terms
    from their pivot-language label IRI — the validator then reports the
    latter. Unknown ids stay unresolved as errors.
    """
    path = Path(path)
    diagnostics: list[Diagnostic] = []
    records: list[ImportedMapping] = []
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        diagnostics.append(
            Diagnostic(Severity.ERROR, "MISSING_FILE", f"file not found: {path}", file=path.name)
        )
        return [], diagnostics
    text = unicodedata.normalize("NFC", text.lstrip("﻿"))

    def err(line_no: int, code: str, message: str) -> None:
        diagnostics.append(Diagnostic(Severity.ERROR, code, message, file=path.name, line=line_no))

    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            err(line_no, "WRONG_FIELD_COUNT", "expected source_id, target IRI(s), match_type")
            continue
        source_id, *target_texts, match_type = fields
        if match_type not in MATCH_TYPES:
            err(line_no, "UNKNOWN_MATCH_TYPE", f"unknown match type {match_type!r}")
            continue
        term = thesaurus.terms.get(source_id)
        if term is None:
            err(line_no, "DANGLING_TERM", f"unknown source term {source_id!r}")
            continue
        targets = []
        bad = False
        for text_iri in target_texts:
            try:
                targets.append(Iri(text_iri))
            except ValueError as exc:
                err(line_no, "BAD_IRI", str(exc))
                bad = True
        if bad:
            continue
        if term.kind is TermKind.DESCRIPTOR:
            source = mint_iri(policy, "concept", source_id)
        else:
            source = mint_iri(policy, "label", source_id, language=thesaurus.pivot)
        records.append(ImportedMapping(source, tuple(targets), match_type))
    return records, diagnostics


def links_from_imports(records: list[ImportedMapping]) -> list[MappingLink]:
    """Flatten imported records into individual links (provenance=imported)."""
    links = [
        MappingLink(rec.source, target, rec.match_type, 0.0, PROVENANCE_IMPORTED)
        for rec in records
        for target in rec.targets
    ]
    links.sort(key=lambda link: (link.source.value, link.target.value, link.match_type))
    return links


def validate_mappings(
    links: list[MappingLink],
    thesaurus: Thesaurus,
    policy: UriPolicy,
    imported: list[ImportedMapping] | None = None,
) -> MappingValidationReport:
    """Check a link set against what SKOS mapping properties can express.

    NONPREF_SOURCE (error): the link starts at a non-preferred term's label
    node instead of a concept. SINGLE_TO_MULTIPLE (warning): an imported
    record maps one source onto a *combination* of several targets, which
    the flattened pairwise links misrepresent. DUPLICATE_LINK (error): one
    (source, target) pair claims conflicting match types.
    """
    findings: list[MappingFinding] = []
    label_prefix = policy.base + "label/"

    for link in links:
        if not link.source.value.startswith(label_prefix):
            continue
        term_id = unquote(link.source.value[len(label_prefix) :].split("/")[0])
        term = thesaurus.terms.get(term_id)
        if term is not None and term.kind is not TermKind.DESCRIPTOR:
            findings.append(
                MappingFinding(
                    Severity.ERROR,
                    "NONPREF_SOURCE",
                    link.source,
                    (link.target,),
                    f"link starts at the label of non-preferred term {term_id}, not a concept",
                )
            )

    for rec in imported or []:
        if len(rec.targets) >= 2:
            findings.append(
                MappingFinding(
                    Severity.WARNING,
                    "SINGLE_TO_MULTIPLE",
                    rec.source,
                    rec.targets,
                    f"one source mapped to the combination of {len(rec.targets)} targets; "
                    "SKOS mapping properties cannot express the conjunction",
                )
            )

    by_pair: dict[tuple[str, str], set[str]] = {}
    for link in links:
        by_pair.setdefault((link.source.value, link.target.value), set()).add(link.match_type)
    for (source_value, target_value), types in sorted(by_pair.items()):
        if len(types) > 1:
            findings.append(
                MappingFinding(
                    Severity.ERROR,
                    "DUPLICATE_LINK",
                    Iri(source_value),
                    (Iri(target_value),),
                    f"conflicting match types {sorted(types)} for one source/target pair",
                )
            )

    findings.sort(key=lambda f: (f.source.value, f.code, [t.value for t in f.targets]))
    return MappingValidationReport(findings)


def emit_mapping_triples(
    links: list[MappingLink],
    target_dataset: Iri,
) -> tuple[Graph, list[tuple[Iri, Iri, int]]]:
    """Materialize links as skos mapping triples plus linkset summaries.

    The summary — (target dataset, match predicate, count) per match type
    present — feeds `skosgraph.emit_void` directly.
    """
    graph = Graph(namespaces=dict(STANDARD_PREFIXES))
    counts: dict[str, int] = {}
    for link in links:
        graph.add(link.source, SKOS.term(link.match_type), link.target)
        counts[link.match_type] = counts.get(link.match_type, 0) + 1
    summary = [
        (target_dataset, SKOS.term(match_type), counts[match_type])
        for match_type in MATCH_TYPES
        if match_type in counts
    ]
    return graph, summary
