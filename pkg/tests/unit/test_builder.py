import json
from pathlib import Path

import pytest

from rumlem.core.builder import (
    BUILD_REPORT_NAME,
    InflectionRow,
    VarietyReport,
    build_lexicons,
    compile_variety,
    inflection_records,
    read_dictionary,
    read_inflections,
)
from rumlem.core.errors import ConfigurationError, CorruptFile
from rumlem.core.lexicon import is_known, load, lookup
from rumlem.core.model import (
    FeatureBundle,
    FormRecord,
    PosCategory,
    RawEntry,
    Recognition,
    Variety,
    VerbForm,
)
from tests.conftest import FIXTURES

PTCP = FeatureBundle.parse("PoS=V; VerbForm=PTCP; Tense=PST; Gender=FEM; Number=SG")
INF = FeatureBundle(PosCategory.VERB, verb_form=VerbForm.INF)


def test_build_lexicons(tmp_path: Path) -> None:
    report = build_lexicons(
        FIXTURES / "dictionaries", tmp_path, FIXTURES / "inflections", FIXTURES / "fallback"
    )

    assert list(report.varieties) == [Variety.SURSILVAN, Variety.SURMIRAN, Variety.VALLADER]
    assert [path.name for path in report.lexicon_files] == [
        "sursilvan.lexc",
        "surmiran.lexc",
        "vallader.lexc",
    ]

    vallader = report.varieties[Variety.VALLADER]
    assert vallader.dictionary_rows == 12
    assert vallader.malformed_rows == 0
    assert vallader.inflection_rows == 2
    assert vallader.inflections_rejected == 0
    assert vallader.inflections_without_entry == 0
    assert vallader.fallback_words == 2

    sursilvan = report.varieties[Variety.SURSILVAN]
    assert sursilvan.parse.entries_rejected == 2
    assert sursilvan.inflection_rows == 0

    lexicon = load(tmp_path / "vallader.lexc")
    assert [(a.lemma, a.gloss) for a in lookup(lexicon, "eira")] == [("esser", "sein")]
    assert is_known(lexicon, "Scuol") is Recognition.FALLBACK_ONLY

    written = json.loads((tmp_path / BUILD_REPORT_NAME).read_text())
    assert written == report.to_dict()
    assert written["varieties"]["vallader"]["lexicon"]["mapped_forms"] == len(lexicon)


def test_build_lexicons_without_optional_inputs(tmp_path: Path) -> None:
    report = build_lexicons(FIXTURES / "dictionaries", tmp_path)

    lexicon = load(tmp_path / "vallader.lexc")
    assert lookup(lexicon, "eira") == []
    assert is_known(lexicon, "Scuol") is Recognition.UNKNOWN
    assert report.varieties[Variety.VALLADER].fallback_words == 0


def test_build_lexicons_missing_directory(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError, match="not found"):
        build_lexicons(tmp_path / "missing", tmp_path / "out")


def test_build_lexicons_empty_directory(tmp_path: Path) -> None:
    (tmp_path / "notes.txt").write_text("nothing to see")
    with pytest.raises(ConfigurationError, match="No dictionaries found"):
        build_lexicons(tmp_path, tmp_path / "out")


def test_build_lexicons_rejects_duplicate_varieties(tmp_path: Path) -> None:
    (tmp_path / "vallader.tsv").write_text("vuolp\tFuchs\tn\tf\n")
    (tmp_path / "rm-vallader.tsv").write_text("jada\tMal\tn\tf\n")
    with pytest.raises(ConfigurationError, match="Several dictionaries for vallader"):
        build_lexicons(tmp_path, tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_build_lexicons_collects_fallback_files(tmp_path: Path) -> None:
    dictionaries, fallback = tmp_path / "dict", tmp_path / "fallback"
    dictionaries.mkdir()
    fallback.mkdir()
    (dictionaries / "puter.tsv").write_text("vuolp\tFuchs\tn\tf\n")
    (fallback / "puter.txt").write_text("Samedan\n")
    (fallback / "puter-names.txt").write_text("# first names\nUrsina\nSamedan\n")
    (fallback / "vallader.txt").write_text("Scuol\n")

    report = build_lexicons(dictionaries, tmp_path / "out", fallback_dir=fallback)

    assert report.varieties[Variety.PUTER].fallback_words == 3
    lexicon = load(tmp_path / "out" / "puter.lexc")
    assert lexicon.fallback_vocab == {"samedan", "ursina"}


def test_read_dictionary_counts_malformed_rows(tmp_path: Path) -> None:
    path = tmp_path / "surmiran.tsv"
    path.write_text(
        "# header\n"
        "vuolp\tFuchs\tn\tf\n"
        "jada\t\tn\tf\n"
        "la\tdie\tart\t\textra\n"
        "\n"
        "darcheu\n"
        "fomantar\taushungern\tv\n",
        encoding="utf-8",
    )
    report = VarietyReport(Variety.SURMIRAN)
    entries = read_dictionary(path, report)

    assert [(e.romansh_field, e.source_line) for e in entries] == [("vuolp", 2), ("fomantar", 7)]
    assert entries[1].gender_hint is None
    assert all(e.variety is Variety.SURMIRAN for e in entries)
    assert report.dictionary_rows == 5
    assert report.malformed_rows == 3


def test_read_inflections_rejects_bad_rows(tmp_path: Path) -> None:
    path = tmp_path / "vallader.tsv"
    path.write_text(
        "eira\tesser\tPoS=V; VerbForm=FIN; Mood=IND; Tense=IMPF; Person=3; Number=SG\n"
        "eira\tesser\n"
        "\tesser\tPoS=V\n"
        "eira\tesser\tTense=PST\n",
        encoding="utf-8",
    )
    report = VarietyReport(Variety.VALLADER)
    rows = read_inflections(path, report)

    assert [(row.form, row.lemma, row.source_line) for row in rows] == [("eira", "esser", 1)]
    assert rows[0].features.person == "3"
    assert report.inflection_rows == 4
    assert report.inflections_rejected == 3


def test_inflection_records_inherit_verb_glosses() -> None:
    lemmas = [
        FormRecord("fomantar", "fomantar", INF, "aushungern", Variety.VALLADER),
        FormRecord("fomantar", "fomantar", INF, "jn aushungern", Variety.VALLADER),
        # Only verb entries lend their glosses.
        FormRecord("esser", "esser", FeatureBundle(PosCategory.NOUN), "Wesen", Variety.VALLADER),
    ]
    rows = [
        InflectionRow("fomantada", "Fomantar", PTCP, 1),
        InflectionRow("eira", "esser", PTCP, 2),
    ]
    report = VarietyReport(Variety.VALLADER)
    records = inflection_records(rows, lemmas, Variety.VALLADER, report)

    assert [(r.surface, r.lemma, r.gloss) for r in records] == [
        ("fomantada", "Fomantar", "aushungern"),
        ("fomantada", "Fomantar", "jn aushungern"),
        ("eira", "esser", ""),
    ]
    assert report.inflections_without_entry == 1


def test_compile_variety() -> None:
    entries = [
        RawEntry("fomantar", "jn aushungern", Variety.VALLADER, "v", None, 1),
        RawEntry("dar fö", "anzünden", Variety.VALLADER, "v", None, 2),
    ]
    report = VarietyReport(Variety.VALLADER)
    lexicon = compile_variety(
        Variety.VALLADER,
        entries,
        [InflectionRow("fomantada", "fomantar", PTCP, 1)],
        ["Scuol", "scuol"],
        report=report,
    )

    assert report.parse.entries_total == 2
    assert report.parse.multi_word == 1
    assert report.records == 2
    assert report.fallback_words == 2
    assert report.stats.lemma_count == 1
    assert [a.features for a in lookup(lexicon, "fomantada")] == [PTCP]
    assert lexicon.fallback_vocab == {"scuol"}


def test_non_utf8_inputs_are_corrupt_files(tmp_path: Path) -> None:
    latin1 = "fomantà\tausgehungert\tadj\t\n".encode("latin-1")
    (tmp_path / "vallader.tsv").write_bytes(latin1)
    with pytest.raises(CorruptFile, match="vallader.tsv"):
        read_dictionary(tmp_path / "vallader.tsv")
    with pytest.raises(CorruptFile, match="vallader.tsv"):
        read_inflections(tmp_path / "vallader.tsv")


def test_build_lexicons_stops_before_writing_on_corrupt_fallback(tmp_path: Path) -> None:
    fallback, out = tmp_path / "fallback", tmp_path / "out"
    fallback.mkdir()
    (fallback / "vallader.txt").write_bytes("Scuol\nMüstair\n".encode("latin-1"))

    with pytest.raises(CorruptFile, match="vallader.txt"):
        build_lexicons(FIXTURES / "dictionaries", out, fallback_dir=fallback)
    assert not out.exists()


def test_dictionary_line_numbers_follow_newlines(tmp_path: Path) -> None:
    path = tmp_path / "puter.tsv"
    path.write_bytes("vuolp\tFuchs\tn\tf\r\n\r\njada\tMal Zeit\tn\tf\n".encode())
    entries = read_dictionary(path)
    assert [(e.romansh_field, e.source_line) for e in entries] == [("vuolp", 1), ("jada", 3)]
