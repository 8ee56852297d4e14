"""TSV interchange: parsing, diagnostics, assembly, export round trip."""

import random

from skoskit.ingest import (
    InterchangeBundle,
    export_bundle,
    load_thesaurus,
    parse_bundle,
)
from skoskit.model import (
    CompoundEquivalenceRelation,
    EquivalenceRelation,
    RelationKind,
    SemanticRelation,
    TermKind,
    has_errors,
)
from support import committee_dir, random_thesaurus

HEADERS = {
    "terms.tsv": "id\tkind\n",
    "labels.tsv": "term_id\tlang\tlabel\n",
    "relations.tsv": "kind\tsource_id\ttarget_id\tgroup_key\n",
    "classification.tsv": "notation\tparent_notation\tlang\tlabel\n",
    "assignments.tsv": "term_id\tnotation\n",
}


def write_bundle(directory, **overrides):
    """Write a bundle: header-only files unless overridden with extra rows."""
    for name, header in HEADERS.items():
        body = overrides.get(name.removesuffix(".tsv"), "")
        (directory / name).write_text(header + body, encoding="utf-8")
    return directory


def error_codes(diagnostics):
    return sorted(d.code for d in diagnostics if d.severity == "error")


def test_committee_fixture_loads_cleanly():
    thesaurus, diagnostics = load_thesaurus(committee_dir())
    assert diagnostics == []
    assert len(thesaurus.terms) == 8
    assert thesaurus.terms["10001"].kind is TermKind.ALTERNATIVE_NON_DESCRIPTOR
    assert thesaurus.label("10002") == "Arbeitsgruppe"
    assert thesaurus.label("10002", "en") == "working group"
    assert EquivalenceRelation("10001", "10002") in thesaurus.equivalences
    assert CompoundEquivalenceRelation("10001", ("10006", "10007")) in thesaurus.compounds
    # inverse closure applied on load
    assert SemanticRelation("10008", RelationKind.NARROWER, "10002") in thesaurus.semantic_relations
    assert thesaurus.terms["10002"].classification_codes == {"10.01"}
    assert thesaurus.classification["10.01"].parent == "10"


def test_missing_files_are_reported_per_file(tmp_path):
    _, diagnostics = load_thesaurus(tmp_path)
    assert error_codes(diagnostics) == ["MISSING_FILE"] * 5
    assert sorted(d.file for d in diagnostics) == sorted(HEADERS)


def test_bad_header_and_field_counts(tmp_path):
    write_bundle(tmp_path)
    (tmp_path / "terms.tsv").write_text("id\twrong\nx\tD\n", encoding="utf-8")
    (tmp_path / "labels.tsv").write_text("term_id\tlang\tlabel\nx\tde\n", encoding="utf-8")
    _, diagnostics = load_thesaurus(tmp_path)
    codes = error_codes(diagnostics)
    assert "BAD_HEADER" in codes
    assert "WRONG_FIELD_COUNT" in codes


def test_bom_crlf_and_nfc_normalization(tmp_path):
    write_bundle(tmp_path)
    # BOM before the header, CRLF endings, and an NFD-encoded label
    (tmp_path / "terms.tsv").write_bytes("﻿id\tkind\r\na\tD\r\n".encode("utf-8"))
    decomposed = "Qualität"  # a + combining diaeresis
    (tmp_path / "labels.tsv").write_text(f"term_id\tlang\tlabel\na\tde\t{decomposed}\n", encoding="utf-8")
    thesaurus, diagnostics = load_thesaurus(tmp_path)
    assert diagnostics == []
    assert thesaurus.label("a") == "Qualität"
    assert len(thesaurus.label("a")) == 8  # composed form


def test_duplicate_keys_and_rows(tmp_path):
    write_bundle(
        tmp_path,
        terms="a\tD\na\tD\nb\tD\n",
        labels="a\tde\teins\na\tde\tzwei\nb\tde\tdrei\n",
        relations="RT\ta\tb\t\nRT\ta\tb\t\nRT\tb\ta\t\n",
    )
    _, diagnostics = load_thesaurus(tmp_path)
    codes = error_codes(diagnostics)
    assert codes.count("DUPLICATE_KEY") == 2  # term id + label (term_id, lang)
    assert codes.count("DUPLICATE_ROW") == 1


def test_unknown_kind_unknown_lang_empty_field(tmp_path):
    write_bundle(
        tmp_path,
        terms="a\tD\nb\tX\n\tD\n",
        labels="a\tde\tgut\na\tzz\tbad lang\na\ten\t\n",
    )
    _, diagnostics = load_thesaurus(tmp_path)
    codes = error_codes(diagnostics)
    assert "UNKNOWN_KIND" in codes
    assert "UNKNOWN_LANG" in codes
    assert codes.count("EMPTY_FIELD") == 2  # empty id and empty label


def test_group_key_rules(tmp_path):
    write_bundle(
        tmp_path,
        terms="a\tD\nb\tD\nnd\tND\n",
        labels="a\tde\teins\nb\tde\tzwei\nnd\tde\tdrei\n",
        relations="USE_COMB\tnd\ta\t\nBT\ta\tb\tg1\nNT\tb\ta\t\n",
    )
    _, diagnostics = load_thesaurus(tmp_path)
    codes = error_codes(diagnostics)
    assert "GROUP_KEY_REQUIRED" in codes  # USE_COMB without a group key
    assert "GROUP_KEY_FORBIDDEN" in codes  # BT with one


def test_diagnostics_carry_file_and_line(tmp_path):
    write_bundle(tmp_path, terms="a\tD\nb\tX\n")
    _, diagnostics = load_thesaurus(tmp_path)
    (finding,) = [d for d in diagnostics if d.code == "UNKNOWN_KIND"]
    assert finding.file == "terms.tsv"
    assert finding.line == 3
    assert "terms.tsv:3" in finding.render()


def test_undeclared_language_column_rejected(tmp_path):
    write_bundle(tmp_path, terms="a\tD\n", labels="a\tfr\tbonjour\na\tde\tgut\n")
    _, diagnostics = load_thesaurus(tmp_path, languages=frozenset({"de", "en"}))
    assert "UNKNOWN_LANG" in error_codes(diagnostics)


def test_use_comb_groups_preserve_file_order(tmp_path):
    write_bundle(
        tmp_path,
        terms="p\tD\nq\tD\nr\tD\nnd\tND\n",
        labels="p\tde\teins\nq\tde\tzwei\nr\tde\tdrei\nnd\tde\tvier\n",
        relations="USE_COMB\tnd\tr\tg1\nUSE_COMB\tnd\tp\tg1\n",
    )
    thesaurus, diagnostics = load_thesaurus(tmp_path)
    assert not has_errors(diagnostics)
    (compound,) = thesaurus.compounds
    assert compound.components == ("r", "p")  # file order, not sorted


def test_assembly_reports_dangling_references(tmp_path):
    write_bundle(
        tmp_path,
        terms="a\tD\n",
        labels="a\tde\tgut\nghost\tde\tverloren\n",
        relations="USE\tphantom\ta\t\n",
        assignments="a\t404\n",
    )
    _, diagnostics = load_thesaurus(tmp_path)
    codes = error_codes(diagnostics)
    assert codes.count("DANGLING_TERM") >= 2  # label + relation reference
    assert "UNKNOWN_CLASSIFICATION" in codes


def test_inconsistent_classification_parent(tmp_path):
    write_bundle(
        tmp_path,
        terms="a\tD\n",
        labels="a\tde\tgut\n",
        classification="10\t\tde\tWurzel\n10.01\t10\tde\tKind\n10.01\t99\ten\tchild\n",
        assignments="a\t10\n",
    )
    _, diagnostics = load_thesaurus(tmp_path)
    assert "INCONSISTENT_PARENT" in error_codes(diagnostics)


def test_parse_errors_suppress_assembly(tmp_path):
    write_bundle(tmp_path, terms="a\tD\na\tD\n")
    thesaurus, diagnostics = load_thesaurus(tmp_path)
    assert has_errors(diagnostics)
    assert thesaurus.terms == {}  # assembly skipped, not half-done


def test_bad_encoding_reported(tmp_path):
    write_bundle(tmp_path)
    (tmp_path / "terms.tsv").write_bytes(b"id\tkind\n\xff\xfe\tD\n")
    _, diagnostics = load_thesaurus(tmp_path)
    assert "BAD_ENCODING" in error_codes(diagnostics)


def test_parse_bundle_exposes_raw_rows():
    records, diagnostics = parse_bundle(InterchangeBundle.from_dir(committee_dir()))
    assert diagnostics == []
    assert len(records.terms) == 8
    assert {r.kind for r in records.relations} == {"USE", "USE_COMB", "BT", "RT"}


def test_export_round_trips_random_thesauri(tmp_path):
    for seed in range(20):
        rng = random.Random(seed)
        original = random_thesaurus(rng, n_terms=rng.randint(3, 30))
        out = tmp_path / f"run{seed}"
        out.mkdir()
        export_bundle(original, out)
        loaded, diagnostics = load_thesaurus(out)
        assert not has_errors(diagnostics), f"seed {seed}: {diagnostics[:3]}"
        assert loaded.terms == original.terms, f"seed {seed}"
        assert loaded.semantic_relations == original.semantic_relations, f"seed {seed}"
        assert loaded.equivalences == original.equivalences, f"seed {seed}"
        assert loaded.compounds == original.compounds, f"seed {seed}"
        assert loaded.classification == original.classification, f"seed {seed}"


def test_export_output_is_deterministic(tmp_path):
    thesaurus = random_thesaurus(random.Random(7), n_terms=25)
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    export_bundle(thesaurus, a)
    export_bundle(thesaurus, b)
    for name in HEADERS:
        assert (a / name).read_bytes() == (b / name).read_bytes()
