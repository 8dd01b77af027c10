from pathlib import Path

import pytest

from rumlem.core.entry_parser import parse_entry
from rumlem.core.errors import MalformedEntry
from rumlem.core.model import PosCategory, RawEntry, Variety
from rumlem.core.skeletons import (
    format_skeleton,
    generate_skeletons,
    gold_shape,
    parse_skeleton,
    write_skeletons,
)
from tests.conftest import FIXTURES

GOLDEN = sorted((FIXTURES / "skeletons").glob("*.txt"))


def _nouns(count: int, template: str = "casa{i}") -> list[RawEntry]:
    return [
        RawEntry(template.format(i=i), "Haus", Variety.SURSILVAN, gender_hint="f")
        for i in range(count)
    ]


def _verbs(count: int) -> list[RawEntry]:
    return [
        RawEntry(f"fomantar{i}", "aushungern", Variety.SURSILVAN, pos_hint="v")
        for i in range(count)
    ]


@pytest.mark.parametrize("path", GOLDEN, ids=lambda path: path.stem)
def test_golden_skeletons_match_parser(path: Path) -> None:
    case = parse_skeleton(path.read_text(encoding="utf-8"))
    assert case.gold_records, "golden file without gold block"

    parsed = parse_entry(case.example_entry)
    assert sorted(gold_shape(parsed)) == sorted(gold_shape(case.gold_records))


def test_adjective_golden_structure() -> None:
    case = parse_skeleton((FIXTURES / "skeletons" / "001-adj-antalgevel.txt").read_text())
    assert str(case.signature) == "w(i), w(i)"
    assert case.pos_category is PosCategory.ADJECTIVE
    assert case.occurrence_count == 12
    assert gold_shape(case.gold_records) == [
        ("antalgevel", "antalgevel", "ADJ;MASC;SG"),
        ("antalgevel", "antalgevla", "ADJ;FEM;SG"),
        ("antalgiantevel", "antalgiantevel", "ADJ;MASC;SG"),
        ("antalgiantevel", "antalgiantevla", "ADJ;FEM;SG"),
    ]


def test_generate_skeletons_threshold_is_strict() -> None:
    assert len(generate_skeletons(_nouns(11))) == 1
    assert generate_skeletons(_nouns(10)) == []


def test_generate_skeletons_sorts_by_frequency() -> None:
    entries = _nouns(12) + _nouns(15, "casa{i}, chasa{i}") + _verbs(3)
    cases = generate_skeletons(entries, min_count=10)

    assert [(str(case.signature), case.pos_category) for case in cases] == [
        ("w, w", PosCategory.NOUN),
        ("w", PosCategory.NOUN),
    ]
    assert [case.occurrence_count for case in cases] == [15, 12]
    assert cases[0].example_entry.romansh_field == "casa0, chasa0"
    assert all(case.gold_records == [] for case in cases)


def test_generate_skeletons_skips_malformed_entries() -> None:
    entries = _nouns(11) + [RawEntry("casa (", "Haus", Variety.SURSILVAN)]
    cases = generate_skeletons(entries)
    assert [case.occurrence_count for case in cases] == [11]


def test_format_then_parse_keeps_entry_and_gold(tmp_path: Path) -> None:
    entry = RawEntry(
        "arrestà (arrestats, pl); arrestada (arrestadas, pl)",
        "Gefangene",
        Variety.SURMIRAN,
        gender_hint="m/f",
    )
    [case] = generate_skeletons([entry] * 3, min_count=2)
    case.gold_records = parse_entry(entry)

    [path] = write_skeletons([case], tmp_path / "skeletons")
    assert path.name == "001-n-w-w-mt-w-w-mt.txt"

    parsed = parse_skeleton(path.read_text(encoding="utf-8"))
    assert parsed.example_entry.romansh_field == entry.romansh_field
    assert parsed.example_entry.gender_hint == "m/f"
    assert parsed.example_entry.variety is Variety.SURMIRAN
    assert parsed.occurrence_count == 3
    assert gold_shape(parsed.gold_records) == gold_shape(case.gold_records)


def test_format_empty_gold_block() -> None:
    [case] = generate_skeletons(_nouns(2), min_count=1)
    text = format_skeleton(case)
    assert text.splitlines()[-1] == ">>>"
    assert parse_skeleton(text).gold_records == []


@pytest.mark.parametrize(
    "text",
    [
        "",
        "# pos: N\nnot quoted\n",
        "'casa'; ; f; Haus\ncasa; N;FEM;SG\n",
        "'casa'; ; f; Haus\n>>> casa; N;FEM;SG\n",
    ],
)
def test_parse_skeleton_rejects_malformed_files(text: str) -> None:
    with pytest.raises(MalformedEntry):
        parse_skeleton(text)
