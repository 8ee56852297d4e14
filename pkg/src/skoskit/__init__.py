"""skoskit: thesaurus → SKOS/SKOS-XL conversion, linking, and retrieval."""

from .ingest import InterchangeBundle, assemble_thesaurus, export_bundle, load_thesaurus, parse_bundle
from .linker import (
    DEFAULT_THRESHOLD,
    MappingLink,
    TargetVocabulary,
    discover_links,
    emit_mapping_triples,
    import_mappings,
    levenshtein,
    normalized_distance,
    validate_mappings,
)
from .model import (
    ClassificationNode,
    CompoundEquivalenceRelation,
    Diagnostic,
    EquivalenceRelation,
    RelationKind,
    SemanticRelation,
    Severity,
    StatsReport,
    Term,
    TermKind,
    Thesaurus,
    stats,
    validate,
)
from .rdf import Graph, Iri, Literal, Namespace, Triple
from .retrieval import build_coword, build_label_index, expand, recommend, resolve
from .serialize import SerializationConfig, parse_ntriples, to_ntriples, to_turtle
from .skosgraph import (
    DEFAULT_BASE_URI,
    ConversionConfig,
    UriPolicy,
    emit_extension_schema,
    emit_void,
    mint_iri,
    to_skos,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationNode",
    "CompoundEquivalenceRelation",
    "ConversionConfig",
    "DEFAULT_BASE_URI",
    "DEFAULT_THRESHOLD",
    "Diagnostic",
    "EquivalenceRelation",
    "Graph",
    "InterchangeBundle",
    "Iri",
    "Literal",
    "MappingLink",
    "Namespace",
    "RelationKind",
    "SemanticRelation",
    "SerializationConfig",
    "Severity",
    "StatsReport",
    "TargetVocabulary",
    "Term",
    "TermKind",
    "Thesaurus",
    "Triple",
    "UriPolicy",
    "assemble_thesaurus",
    "build_coword",
    "build_label_index",
    "discover_links",
    "emit_extension_schema",
    "emit_mapping_triples",
    "emit_void",
    "expand",
    "export_bundle",
    "import_mappings",
    "levenshtein",
    "load_thesaurus",
    "mint_iri",
    "normalized_distance",
    "parse_bundle",
    "parse_ntriples",
    "recommend",
    "resolve",
    "stats",
    "to_ntriples",
    "to_skos",
    "to_turtle",
    "validate",
    "validate_mappings",
]
