"""Thesaurus → SKOS/SKOS-XL graph conversion, extension schema, VoiD.

Beyond plain SKOS, the output uses twelve extension terms under the
`thesoz:` namespace: Descriptor and Classification (subclasses of
skos:Concept), EquivalenceRelationship and CompoundEquivalence (subclasses
of skosxl:Label), five label-relation subproperties (use, usedFor,
preferredTermComponent, compoundNonPreferredTerm, hasTranslation), the
inverse isTranslationOf, and the two membership properties
isPartOfEquivalenceRelationship / isPartOfCompoundEquivalence.

Everything is materialized with minted IRIs — no blank nodes — so the
canonical serializer can sort plain byte strings.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from urllib.parse import quote

from .model import RelationKind, TermKind, Thesaurus
from .rdf import (
    CC,
    DCT,
    OWL,
    RDF,
    RDFS,
    SKOS,
    SKOSXL,
    STANDARD_PREFIXES,
    VOID,
    XSD,
    Graph,
    Iri,
    Literal,
    Namespace,
)

DEFAULT_BASE_URI = "http://lod.gesis.org/thesoz/"
DEFAULT_LICENSE = Iri("http://creativecommons.org/licenses/by-nc-nd/3.0/")

# The property tying a descriptor to its classification notation. Kept as a
# named constant because it is a modeling choice, not a fixed vocabulary term.
ASSIGNMENT_PREDICATE = DCT.subject

_ENTITY_PATHS = {
    "concept": "concept/",
    "label": "label/",
    "equivalence": "eqrel/",
    "compound": "compound/",
    "classification": "classification/",
}


@dataclass(frozen=True)
class UriPolicy:
    """Where minted IRIs live. Both bases must end with '/'."""

    base: str = DEFAULT_BASE_URI
    ext: str = ""

    def __post_init__(self) -> None:
        Iri(self.base)  # raises on a malformed base
        if not self.base.endswith("/"):
            raise ValueError(f"base must end with '/': {self.base!r}")
        if not self.ext:
            object.__setattr__(self, "ext", self.base + "ext/")
        Iri(self.ext)
        if not self.ext.endswith("/"):
            raise ValueError(f"ext must end with '/': {self.ext!r}")

    @property
    def thesoz(self) -> Namespace:
        return Namespace(self.ext)

    def namespaces(self) -> dict[str, str]:
        table = dict(STANDARD_PREFIXES)
        table["thesoz"] = self.ext
        table["xsd"] = XSD.base
        return table


def mint_iri(
    policy: UriPolicy,
    entity: str,
    key: str | tuple[str, ...],
    language: str | None = None,
) -> Iri:
    """Mint the IRI for one entity, deterministically and injectively.

    Scheme: concept/<id>, label/<id>/<lang>, eqrel/<nonpref>/<pref>,
    compound/<nonpref>/<component...>, classification/<notation>. Every key
    part is percent-encoded on its own, so '/' separators are unambiguous
    and distinct inputs always mint distinct IRIs.
    """
    path = _ENTITY_PATHS.get(entity)
    if path is None:
        raise ValueError(f"unknown entity class: {entity!r}")
    parts = [key] if isinstance(key, str) else list(key)
    if language is not None:
        parts.append(language)
    encoded = "/".join(quote(part, safe="") for part in parts)
    return Iri(policy.base + path + encoded)


@dataclass
class ConversionConfig:
    emit_altlabels: bool = True
    title: str = "TheSoz"
    license: Iri = DEFAULT_LICENSE
    modified: datetime.date | None = None


def to_skos(
    thesaurus: Thesaurus,
    policy: UriPolicy | None = None,
    config: ConversionConfig | None = None,
) -> Graph:
    """Convert a validated thesaurus to its SKOS/SKOS-XL graph."""
    policy = policy or UriPolicy()
    config = config or ConversionConfig()
    thesoz = policy.thesoz
    graph = Graph(namespaces=policy.namespaces())
    add = graph.add

    def concept(term_id: str) -> Iri:
        return mint_iri(policy, "concept", term_id)

    def label_iri(term_id: str, lang: str) -> Iri:
        return mint_iri(policy, "label", term_id, language=lang)

    pivot = thesaurus.pivot

    for term in thesaurus.terms.values():
        # Every label of every term becomes a skosxl:Label node; only
        # descriptors additionally become concepts with preferred labels.
        for lang, text in term.labels.items():
            node = label_iri(term.id, lang)
            add(node, RDF.type, SKOSXL.Label)
            add(node, SKOSXL.literalForm, Literal(text, language=lang))
        if term.kind is TermKind.DESCRIPTOR:
            c = concept(term.id)
            add(c, RDF.type, SKOS.Concept)
            add(c, RDF.type, thesoz.Descriptor)
            for lang, text in term.labels.items():
                add(c, SKOS.prefLabel, Literal(text, language=lang))
                add(c, SKOSXL.prefLabel, label_iri(term.id, lang))
        # Translation edges radiate from the pivot label (star topology).
        if pivot in term.labels:
            pivot_node = label_iri(term.id, pivot)
            for lang in term.labels:
                if lang == pivot:
                    continue
                other = label_iri(term.id, lang)
                add(pivot_node, thesoz.hasTranslation, other)
                add(other, thesoz.isTranslationOf, pivot_node)

    skos_relation = {
        RelationKind.BROADER: SKOS.broader,
        RelationKind.NARROWER: SKOS.narrower,
        RelationKind.RELATED: SKOS.related,
    }
    for rel in thesaurus.semantic_relations:
        add(concept(rel.source), skos_relation[rel.kind], concept(rel.target))

    for eq in thesaurus.equivalences:
        node = mint_iri(policy, "equivalence", (eq.non_preferred, eq.preferred))
        pref_label = label_iri(eq.preferred, pivot)
        nonpref_label = label_iri(eq.non_preferred, pivot)
        add(node, RDF.type, thesoz.EquivalenceRelationship)
        add(node, thesoz.use, pref_label)
        add(node, thesoz.usedFor, nonpref_label)
        add(pref_label, thesoz.isPartOfEquivalenceRelationship, node)
        add(nonpref_label, thesoz.isPartOfEquivalenceRelationship, node)

    for comp in thesaurus.compounds:
        node = mint_iri(policy, "compound", (comp.non_preferred, *comp.components))
        nonpref_label = label_iri(comp.non_preferred, pivot)
        add(node, RDF.type, thesoz.CompoundEquivalence)
        add(node, thesoz.compoundNonPreferredTerm, nonpref_label)
        add(nonpref_label, thesoz.isPartOfCompoundEquivalence, node)
        for component in comp.components:
            comp_label = label_iri(component, pivot)
            add(node, thesoz.preferredTermComponent, comp_label)
            add(comp_label, thesoz.isPartOfCompoundEquivalence, node)

    if config.emit_altlabels:
        # A plain non-descriptor resolved by a single "use instead" also
        # becomes an alternative label of its descriptor. AD-term labels are
        # never altLabels: they do not belong to any single concept.
        for eq in thesaurus.equivalences:
            term = thesaurus.terms.get(eq.non_preferred)
            if term is None or term.kind is not TermKind.NON_DESCRIPTOR:
                continue
            c = concept(eq.preferred)
            for lang, text in term.labels.items():
                add(c, SKOSXL.altLabel, label_iri(term.id, lang))
                add(c, SKOS.altLabel, Literal(text, language=lang))

    for node_rec in thesaurus.classification.values():
        class_iri = mint_iri(policy, "classification", node_rec.notation)
        add(class_iri, RDF.type, SKOS.Concept)
        add(class_iri, RDF.type, thesoz.Classification)
        add(class_iri, SKOS.notation, Literal(node_rec.notation))
        for lang, text in node_rec.labels.items():
            add(class_iri, SKOS.prefLabel, Literal(text, language=lang))
        if node_rec.parent is not None:
            parent_iri = mint_iri(policy, "classification", node_rec.parent)
            add(class_iri, SKOS.broader, parent_iri)
            add(parent_iri, SKOS.narrower, class_iri)

    for term in thesaurus.terms.values():
        for code in term.classification_codes:
            add(concept(term.id), ASSIGNMENT_PREDICATE, mint_iri(policy, "classification", code))

    dataset = Iri(policy.base)
    add(dataset, DCT.title, Literal(config.title))
    add(dataset, CC.license, config.license)
    if config.modified is not None:
        add(dataset, DCT.modified, Literal(config.modified.isoformat(), datatype=XSD.date))
    return graph


def emit_extension_schema(policy: UriPolicy | None = None) -> Graph:
    """RDF Schema declarations for the twelve extension terms."""
    policy = policy or UriPolicy()
    thesoz = policy.thesoz
    graph = Graph(namespaces=policy.namespaces())

    for cls, parent in (
        (thesoz.Descriptor, SKOS.Concept),
        (thesoz.Classification, SKOS.Concept),
        (thesoz.EquivalenceRelationship, SKOSXL.Label),
        (thesoz.CompoundEquivalence, SKOSXL.Label),
    ):
        graph.add(cls, RDF.type, RDFS.Class)
        graph.add(cls, RDFS.subClassOf, parent)

    for prop in (
        thesoz.use,
        thesoz.usedFor,
        thesoz.preferredTermComponent,
        thesoz.compoundNonPreferredTerm,
        thesoz.hasTranslation,
    ):
        graph.add(prop, RDF.type, RDF.Property)
        graph.add(prop, RDFS.subPropertyOf, SKOSXL.labelRelation)

    graph.add(thesoz.isTranslationOf, RDF.type, RDF.Property)
    graph.add(thesoz.isTranslationOf, OWL.inverseOf, thesoz.hasTranslation)

    for prop in (thesoz.isPartOfEquivalenceRelationship, thesoz.isPartOfCompoundEquivalence):
        graph.add(prop, RDF.type, RDF.Property)
        graph.add(prop, RDFS.domain, SKOSXL.Label)

    return graph


def emit_void(
    graph: Graph,
    linksets: list[tuple[Iri, Iri, int]] | None = None,
    policy: UriPolicy | None = None,
) -> Graph:
    """VoiD description: one void:Dataset plus one void:Linkset per entry.

    Linkset entries are (target dataset IRI, link predicate, link count);
    linkset IRIs are numbered after sorting entries, so the description is
    deterministic regardless of input order.
    """
    policy = policy or UriPolicy()
    out = Graph(namespaces=policy.namespaces())
    dataset = Iri(policy.base)

    def count_literal(n: int) -> Literal:
        return Literal(str(n), datatype=XSD.integer)

    out.add(dataset, RDF.type, VOID.Dataset)
    out.add(dataset, VOID.triples, count_literal(len(graph.triples)))

    ordered = sorted(linksets or [], key=lambda entry: (entry[0].value, entry[1].value))
    for number, (target, predicate, count) in enumerate(ordered, start=1):
        if count < 0:
            raise ValueError(f"negative link count for {target.value}")
        linkset = Iri(policy.base + f"linkset/{number}")
        out.add(linkset, RDF.type, VOID.Linkset)
        out.add(linkset, VOID.subjectsTarget, dataset)
        out.add(linkset, VOID.objectsTarget, target)
        out.add(linkset, VOID.linkPredicate, predicate)
        out.add(linkset, VOID.triples, count_literal(count))
        out.add(dataset, VOID.subset, linkset)
    return out
