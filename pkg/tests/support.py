"""Shared test helpers: random fixtures and independent oracles.

The generators here build *valid* thesauri and graphs; the oracles are
deliberately independent re-derivations (recursive edit distance, the
closed-form triple count, a small Turtle reader) used to check the package
implementations against.
"""

from __future__ import annotations

import random
from pathlib import Path

from skoskit.model import (
    ClassificationNode,
    CompoundEquivalenceRelation,
    EquivalenceRelation,
    RelationKind,
    SemanticRelation,
    Term,
    TermKind,
    Thesaurus,
    inverse_closure,
)
from skoskit.rdf import Graph, Iri, Literal

DATA_DIR = Path(__file__).parent / "data"


def committee_dir() -> Path:
    return DATA_DIR / "committee"


def university_ranking_dir() -> Path:
    return DATA_DIR / "university_ranking"


# --- random thesauri ---------------------------------------------------------

_WORDS = [
    "Arbeit", "Markt", "Sozial", "Politik", "System", "Analyse", "Struktur",
    "Gruppe", "Bildung", "Kultur", "Wandel", "Prozess", "Theorie", "Modell",
    "Region", "Stadt", "Familie", "Jugend", "Beruf", "Qualität", "Öko",
]


def random_thesaurus(
    rng: random.Random,
    n_terms: int = 30,
    with_classification: bool | None = None,
) -> Thesaurus:
    """A structurally valid random thesaurus with globally unique labels.

    Label uniqueness matters: the triple-count oracle relies on no two
    emitted literals colliding under set semantics.
    """
    thesaurus = Thesaurus()
    label_counter = 0

    def fresh_label() -> str:
        nonlocal label_counter
        label_counter += 1
        return f"{rng.choice(_WORDS)} {label_counter:04d}"

    n_descriptors = max(2, int(n_terms * 0.6))
    kinds = [TermKind.DESCRIPTOR] * n_descriptors
    for _ in range(n_terms - n_descriptors):
        kinds.append(rng.choice([TermKind.NON_DESCRIPTOR, TermKind.NON_DESCRIPTOR, TermKind.ALTERNATIVE_NON_DESCRIPTOR]))
    rng.shuffle(kinds)

    descriptor_ids: list[str] = []
    nonpref: list[Term] = []
    for index, kind in enumerate(kinds):
        term_id = f"t{index:04d}"
        labels = {"de": fresh_label()}
        for lang in ("en", "fr"):
            if rng.random() < 0.5:
                labels[lang] = fresh_label()
        term = Term(term_id, kind, labels=labels)
        thesaurus.terms[term_id] = term
        if kind is TermKind.DESCRIPTOR:
            descriptor_ids.append(term_id)
        else:
            nonpref.append(term)

    # Broader edges only point from a later descriptor to an earlier one,
    # which keeps the hierarchy acyclic by construction.
    relations: set[SemanticRelation] = set()
    for pos in range(1, len(descriptor_ids)):
        if rng.random() < 0.6:
            parent = descriptor_ids[rng.randrange(pos)]
            relations.add(SemanticRelation(descriptor_ids[pos], RelationKind.BROADER, parent))
    for _ in range(len(descriptor_ids) // 3):
        a, b = rng.sample(descriptor_ids, 2)
        relations.add(SemanticRelation(a, RelationKind.RELATED, b))
    thesaurus.semantic_relations = inverse_closure(relations)

    def random_compound() -> tuple[str, ...]:
        size = rng.randint(2, min(3, len(descriptor_ids)))
        return tuple(rng.sample(descriptor_ids, size))

    for term in nonpref:
        if term.kind is TermKind.NON_DESCRIPTOR:
            if rng.random() < 0.7:
                thesaurus.equivalences.add(EquivalenceRelation(term.id, rng.choice(descriptor_ids)))
            else:
                thesaurus.compounds.add(CompoundEquivalenceRelation(term.id, random_compound()))
        else:  # AD: at least two relations, distinct equivalence targets
            n_rel = rng.randint(2, min(4, len(descriptor_ids)))
            targets = rng.sample(descriptor_ids, n_rel)
            n_eq = rng.randint(1, n_rel)
            for target in targets[:n_eq]:
                thesaurus.equivalences.add(EquivalenceRelation(term.id, target))
            for _ in range(n_rel - n_eq):
                thesaurus.compounds.add(CompoundEquivalenceRelation(term.id, random_compound()))

    if with_classification is None:
        with_classification = rng.random() < 0.5
    if with_classification:
        notations: list[str] = []
        for pos in range(rng.randint(1, 5)):
            notation = f"c{pos}"
            parent = rng.choice(notations) if notations and rng.random() < 0.6 else None
            labels = {"de": fresh_label()}
            if rng.random() < 0.5:
                labels["en"] = fresh_label()
            thesaurus.classification[notation] = ClassificationNode(notation, labels=labels, parent=parent)
            notations.append(notation)
        for term_id in descriptor_ids:
            codes = rng.sample(notations, rng.randint(1, min(2, len(notations))))
            thesaurus.terms[term_id].classification_codes = set(codes)
    return thesaurus


def expected_nonmeta_triples(thesaurus: Thesaurus) -> int:
    """Closed-form triple count for to_skos output, metadata excluded.

    Derived independently from the emission patterns:
    descriptors 2 types + 2 per label; every term label 2 (XL type + form);
    1 per semantic relation; 5 per equivalence; 3 per compound + 2 per
    component; 2 per label of a singly-equivalent plain non-descriptor
    (altLabel + XL altLabel); 2 per non-pivot label (translations); and for
    the classification 3 per node + its labels + 2 per child + 1 per
    assignment.
    """
    terms = thesaurus.terms.values()
    descriptors = [t for t in terms if t.kind is TermKind.DESCRIPTOR]
    equivalent_nds = {
        eq.non_preferred
        for eq in thesaurus.equivalences
        if thesaurus.terms[eq.non_preferred].kind is TermKind.NON_DESCRIPTOR
    }
    total = 2 * len(descriptors)
    total += 2 * sum(len(t.labels) for t in descriptors)
    total += 2 * sum(len(t.labels) for t in terms)
    total += len(thesaurus.semantic_relations)
    total += 5 * len(thesaurus.equivalences)
    total += 3 * len(thesaurus.compounds) + 2 * sum(len(c.components) for c in thesaurus.compounds)
    total += 2 * sum(len(thesaurus.terms[tid].labels) for tid in equivalent_nds)
    total += 2 * sum(len(t.labels) - 1 for t in terms if thesaurus.pivot in t.labels)
    nodes = thesaurus.classification.values()
    total += 3 * len(thesaurus.classification)
    total += sum(len(n.labels) for n in nodes)
    total += 2 * sum(1 for n in nodes if n.parent is not None)
    total += sum(len(t.classification_codes) for t in terms)
    return total


# --- random graphs -----------------------------------------------------------


def random_graph(rng: random.Random, n_triples: int = 40) -> Graph:
    """A random graph exercising IRIs and literals with awkward content."""
    graph = Graph()
    subjects = [Iri(f"http://example.org/s/{rng.randrange(12)}") for _ in range(6)]
    predicates = [Iri(f"http://example.org/p/{i}") for i in range(5)]
    specials = ['say "hi"', "tab\there", "line\nbreak", "back\\slash", "Füße größer", "\r", "\x01control", "ascii"]
    for _ in range(n_triples):
        s = rng.choice(subjects)
        p = rng.choice(predicates)
        roll = rng.random()
        if roll < 0.4:
            o: Iri | Literal = Iri(f"http://example.org/o/{rng.randrange(20)}")
        elif roll < 0.7:
            o = Literal(rng.choice(specials) + str(rng.randrange(100)), language=rng.choice(["de", "en", "pt-BR"]))
        elif roll < 0.9:
            o = Literal(str(rng.randrange(1000)), datatype=Iri("http://www.w3.org/2001/XMLSchema#integer"))
        else:
            o = Literal(rng.choice(specials))
        graph.add(s, p, o)
    return graph


# --- oracles ------------------------------------------------------------------


def recursive_levenshtein(a: str, b: str) -> int:
    """Straight-off-the-definition edit distance (memoized recursion)."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            go(i - 1, j) + 1,
            go(i, j - 1) + 1,
            go(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return go(len(a), len(b))


class TurtleOracleError(ValueError):
    pass


def parse_turtle_subset(data: bytes) -> Graph:
    """Parse the Turtle subset the serializer emits (re-parse oracle).

    Supports @prefix, prefixed names, <IRI> refs, 'a', object/predicate
    lists, and quoted literals with language tags or datatypes. No blank
    nodes, collections, or multi-line literals — the emitter never produces
    them.
    """
    text = data.decode("utf-8")
    prefixes: dict[str, str] = {}
    graph = Graph()
    pos = 0

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
            elif text[pos] == "#":
                while pos < len(text) and text[pos] != "\n":
                    pos += 1
            else:
                return

    def fail(reason: str):
        raise TurtleOracleError(f"offset {pos}: {reason}")

    def read_iri_or_pname() -> Iri:
        nonlocal pos
        if text[pos] == "<":
            end = text.index(">", pos)
            value = text[pos + 1 : end]
            pos = end + 1
            return Iri(value)
        start = pos
        while pos < len(text) and not text[pos].isspace() and text[pos] not in ",;":
            pos += 1
        token = text[start:pos]
        # a trailing '.' ends the statement unless part of the local name
        if token.endswith(".") and token.count(":") == 1 and not token.rstrip(".").endswith(":"):
            token = token[:-1]
            pos -= 1
        if token == "a":
            return Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
        if ":" not in token:
            fail(f"not a prefixed name: {token!r}")
        prefix, local = token.split(":", 1)
        if prefix not in prefixes:
            fail(f"unknown prefix {prefix!r}")
        return Iri(prefixes[prefix] + local)

    def read_literal() -> Literal:
        nonlocal pos
        assert text[pos] == '"'
        pos += 1
        out = []
        while text[pos] != '"':
            ch = text[pos]
            if ch == "\\":
                nxt = text[pos + 1]
                if nxt == "u":
                    out.append(chr(int(text[pos + 2 : pos + 6], 16)))
                    pos += 6
                    continue
                if nxt == "U":
                    out.append(chr(int(text[pos + 2 : pos + 10], 16)))
                    pos += 10
                    continue
                mapping = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\", "b": "\b", "f": "\f"}
                if nxt not in mapping:
                    fail(f"bad escape \\{nxt}")
                out.append(mapping[nxt])
                pos += 2
                continue
            out.append(ch)
            pos += 1
        pos += 1
        lexical = "".join(out)
        if pos < len(text) and text[pos] == "@":
            pos += 1
            start = pos
            while pos < len(text) and (text[pos].isalnum() or text[pos] == "-"):
                pos += 1
            return Literal(lexical, language=text[start:pos])
        if text.startswith("^^", pos):
            pos += 2
            return Literal(lexical, datatype=read_iri_or_pname())
        return Literal(lexical)

    while True:
        skip_ws()
        if pos >= len(text):
            return graph
        if text.startswith("@prefix", pos):
            pos += len("@prefix")
            skip_ws()
            colon = text.index(":", pos)
            name = text[pos:colon]
            pos = colon + 1
            skip_ws()
            if text[pos] != "<":
                fail("expected <IRI> in @prefix")
            end = text.index(">", pos)
            prefixes[name] = text[pos + 1 : end]
            pos = end + 1
            skip_ws()
            if text[pos] != ".":
                fail("expected '.' after @prefix")
            pos += 1
            continue
        subject = read_iri_or_pname()
        while True:  # predicate list
            skip_ws()
            predicate = read_iri_or_pname()
            while True:  # object list
                skip_ws()
                obj = read_literal() if text[pos] == '"' else read_iri_or_pname()
                graph.add(subject, predicate, obj)
                skip_ws()
                if text[pos] == ",":
                    pos += 1
                    continue
                break
            if text[pos] == ";":
                pos += 1
                continue
            if text[pos] == ".":
                pos += 1
                break
            fail(f"unexpected {text[pos]!r} after object")
