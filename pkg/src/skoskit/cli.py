"""Command-line interface.

Subcommands: convert, validate, stats, link, check-mappings, expand,
recommend. Exit codes are a stable contract: 0 success, 2 validation
errors, 64 usage errors, 66 missing input file, 70 internal error.
Diagnostics go to standard error; data goes to files or standard output.
The THESOZ_BASE_URI environment variable overrides the default base URI.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import ingest, linker, retrieval, serialize
from .model import Diagnostic, Severity, Thesaurus, has_errors, stats
from .rdf import Iri
from .skosgraph import DEFAULT_BASE_URI, UriPolicy, emit_extension_schema, emit_void, to_skos

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66
EXIT_INTERNAL = 70


class UsageError(Exception):
    pass


class MissingInputError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems with exit code 64."""

    def error(self, message: str):
        raise UsageError(message)


def _default_base_uri() -> str:
    return os.environ.get("THESOZ_BASE_URI", DEFAULT_BASE_URI)


def _policy(base_uri: str) -> UriPolicy:
    base = base_uri if base_uri.endswith("/") else base_uri + "/"
    try:
        return UriPolicy(base=base)
    except ValueError as exc:
        raise UsageError(f"invalid base URI: {exc}") from exc


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise MissingInputError(str(p))
    return p


def _require_bundle_dir(path: str) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise MissingInputError(str(p))
    bundle = ingest.InterchangeBundle.from_dir(p)
    for file in (
        bundle.terms_file,
        bundle.labels_file,
        bundle.relations_file,
        bundle.classification_file,
        bundle.assignments_file,
    ):
        if not file.is_file():
            raise MissingInputError(str(file))
    return p


def _diag_sort_key(d: Diagnostic):
    return (d.file or "", d.line or 0, d.severity.value, d.code, d.message)


def _report_diagnostics(diagnostics: list[Diagnostic], as_json: bool, stream) -> None:
    ordered = sorted(diagnostics, key=_diag_sort_key)
    if as_json:
        doc = {
            "errors": [vars_of(d) for d in ordered if d.severity is Severity.ERROR],
            "warnings": [vars_of(d) for d in ordered if d.severity is Severity.WARNING],
        }
        print(json.dumps(doc, ensure_ascii=False, indent=2), file=stream)
    else:
        for d in ordered:
            print(d.render(), file=stream)


def vars_of(d: Diagnostic) -> dict:
    return {"file": d.file, "line": d.line, "code": d.code, "message": d.message}


def _load_thesaurus(in_dir: str, as_json: bool = False) -> Thesaurus:
    """Load + validate a bundle; raises ValidationFailure after reporting."""
    directory = _require_bundle_dir(in_dir)
    thesaurus, diagnostics = ingest.load_thesaurus(directory)
    _report_diagnostics(diagnostics, as_json, sys.stderr)
    if has_errors(diagnostics):
        raise ValidationFailure()
    return thesaurus


def cmd_convert(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir, args.json)
    policy = _policy(args.base_uri)
    graph = to_skos(thesaurus, policy)
    if args.emit_schema:
        graph.update(emit_extension_schema(policy))
    if args.emit_void:
        graph.update(emit_void(graph, [], policy))
    config = serialize.SerializationConfig(
        format=serialize.FORMAT_TURTLE if args.format == "ttl" else serialize.FORMAT_NTRIPLES,
        prefixes=graph.namespaces,
    )
    Path(args.out).write_bytes(serialize.serialize(graph, config))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    directory = _require_bundle_dir(args.in_dir)
    thesaurus, diagnostics = ingest.load_thesaurus(directory)
    if args.json:
        _report_diagnostics(diagnostics, True, sys.stdout)
    else:
        _report_diagnostics(diagnostics, False, sys.stderr)
    return EXIT_VALIDATION if has_errors(diagnostics) else EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir)
    for name, value in stats(thesaurus).to_dict().items():
        print(f"{name}\t{value}")
    return EXIT_OK


def cmd_link(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir)
    target_path = _require_file(args.target)
    vocabulary, diagnostics = linker.load_target_vocabulary(target_path)
    _report_diagnostics(diagnostics, False, sys.stderr)
    if has_errors(diagnostics):
        return EXIT_VALIDATION
    policy = _policy(args.base_uri)
    try:
        links = linker.discover_links(
            thesaurus, policy, vocabulary, threshold=args.threshold, language=args.lang
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = linker.validate_mappings(links, thesaurus, policy)
    for finding in report.findings:
        print(finding.severity.value + f"[{finding.code}]: {finding.message}", file=sys.stderr)
    if report.errors:
        return EXIT_VALIDATION
    target_dataset = Iri("urn:vocab:" + target_path.stem)
    graph, summary = linker.emit_mapping_triples(links, target_dataset)
    Path(args.out).write_bytes(serialize.to_ntriples(graph))
    for dataset, predicate, count in summary:
        print(f"{dataset.value}\t{predicate.value}\t{count}")
    return EXIT_OK


def cmd_check_mappings(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir)
    policy = _policy(args.base_uri)
    records, diagnostics = linker.import_mappings(_require_file(args.links), thesaurus, policy)
    _report_diagnostics(diagnostics, False, sys.stderr)
    links = linker.links_from_imports(records)
    report = linker.validate_mappings(links, thesaurus, policy, imported=records)
    if args.json:
        doc = {
            "errors": [_finding_dict(f) for f in report.errors],
            "warnings": [_finding_dict(f) for f in report.warnings],
        }
        print(json.dumps(doc, ensure_ascii=False, indent=2))
    else:
        for finding in report.findings:
            targets = ", ".join(t.value for t in finding.targets)
            print(
                f"{finding.severity.value}[{finding.code}]: {finding.source.value} -> {targets}: {finding.message}",
                file=sys.stderr,
            )
    if has_errors(diagnostics) or report.errors:
        return EXIT_VALIDATION
    return EXIT_OK


def _finding_dict(f) -> dict:
    return {
        "code": f.code,
        "source": f.source.value,
        "targets": [t.value for t in f.targets],
        "message": f.message,
    }


def cmd_expand(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir)
    policy = _policy(args.base_uri)
    links_graph = serialize.parse_ntriples(_require_file(args.links).read_bytes())
    links = [
        linker.MappingLink(t.subject, t.object, t.predicate.value.rsplit("#", 1)[-1], 0.0, linker.PROVENANCE_IMPORTED)
        for t in links_graph.triples
        if t.predicate.value.rsplit("#", 1)[-1] in linker.MATCH_TYPES and isinstance(t.object, Iri)
    ]
    index = retrieval.build_label_index(thesaurus, policy)
    options = retrieval.ExpandOptions(follow_narrower=args.narrower, follow_related=args.related)
    result = retrieval.expand(index, links, args.query, args.lang, options)
    for concept, origin in result.ordered():
        print(f"{concept.value}\t{origin}")
    for group in result.conjunctive_groups:
        print("conjunctive\t" + "\t".join(iri.value for iri in group))
    return EXIT_OK


def cmd_recommend(args: argparse.Namespace) -> int:
    thesaurus = _load_thesaurus(args.in_dir)
    policy = _policy(args.base_uri)
    corpus, diagnostics = retrieval.load_corpus(_require_file(args.corpus), thesaurus, policy)
    _report_diagnostics(diagnostics, False, sys.stderr)
    if has_errors(diagnostics):
        return EXIT_VALIDATION
    term = thesaurus.terms.get(args.seed)
    if term is None or not term.kind.is_preferred:
        print(f"error[BAD_SEED]: {args.seed!r} is not a descriptor", file=sys.stderr)
        return EXIT_VALIDATION
    matrix = retrieval.build_coword(corpus)
    seed_iri = retrieval.build_label_index(thesaurus, policy).concept_iri(args.seed)
    for iri, count in retrieval.recommend(matrix, seed_iri, args.k):
        print(f"{iri.value}\t{count}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skoskit", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add_base_uri(p: argparse.ArgumentParser) -> None:
        p.add_argument("--base-uri", default=_default_base_uri(), help="base URI for minted IRIs")

    p = sub.add_parser("convert", help="convert a thesaurus bundle to SKOS")
    p.add_argument("--in", dest="in_dir", required=True, help="bundle directory")
    p.add_argument("--out", required=True, help="output RDF file")
    p.add_argument("--format", choices=("nt", "ttl"), default="nt")
    add_base_uri(p)
    p.add_argument("--emit-schema", action="store_true", help="include the extension schema")
    p.add_argument("--emit-void", action="store_true", help="include a VoiD description")
    p.add_argument("--json", action="store_true", help="machine-readable diagnostics")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="parse and validate a bundle")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="print headline counts")
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("link", help="discover links into a target vocabulary")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--target", required=True, help="target vocabulary TSV")
    p.add_argument("--threshold", type=float, default=linker.DEFAULT_THRESHOLD)
    p.add_argument("--lang", default="de")
    p.add_argument("--out", required=True, help="output N-Triples file")
    add_base_uri(p)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("check-mappings", help="validate imported mapping records")
    p.add_argument("--links", required=True, help="imported mapping TSV")
    p.add_argument("--in", dest="in_dir", required=True)
    add_base_uri(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_mappings)

    p = sub.add_parser("expand", help="expand a query via the thesaurus and its links")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--links", required=True, help="mapping triples (N-Triples)")
    p.add_argument("--query", required=True)
    p.add_argument("--lang", default="de")
    p.add_argument("--narrower", action="store_true", help="follow narrower relations")
    p.add_argument("--related", action="store_true", help="follow related relations")
    add_base_uri(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("recommend", help="recommend co-occurring descriptors")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--corpus", required=True, help="corpus TSV (doc_id, descriptor_id)")
    p.add_argument("--seed", required=True, help="seed descriptor term id")
    p.add_argument("-k", type=int, default=10)
    add_base_uri(p)
    p.set_defaults(func=cmd_recommend)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingInputError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except ValidationFailure:
        return EXIT_VALIDATION
    except serialize.NTriplesParseError as exc:
        print(f"invalid links file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
