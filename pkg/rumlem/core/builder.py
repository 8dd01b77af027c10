"""Compile per-variety dictionaries, verb inflections and fallback word lists into lexicons.

Inputs, all UTF-8:

- ``<dict_dir>/<variety>.tsv``: ``romansh<TAB>german<TAB>pos<TAB>gender``
- ``<inflections_dir>/<variety>.tsv``: ``form<TAB>lemma<TAB>features``
- ``<fallback_dir>/<variety>.txt`` and ``<variety>-*.txt``: one word per line
"""

import json
import logging
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rumlem.config import NOTICE_LEVEL
from rumlem.core.entry_parser import DEFAULT_TAGS, ParseStats, parse_entries
from rumlem.core.errors import ConfigurationError, CorruptFile, MalformedEntry
from rumlem.core.lexicon import Lexicon, LexiconStats, build, lexicon_path, save
from rumlem.core.model import (
    FeatureBundle,
    FormRecord,
    PosCategory,
    RawEntry,
    Variety,
    lookup_key,
)
from rumlem.core.wordlists import read_word_list

logger = logging.getLogger(__name__)

DICTIONARY_SUFFIX = ".tsv"
BUILD_REPORT_NAME = "build-report.json"


@dataclass(frozen=True)
class InflectionRow:
    form: str
    lemma: str
    features: FeatureBundle
    source_line: int = 0


@dataclass
class VarietyReport:
    variety: Variety
    dictionary_rows: int = 0
    malformed_rows: int = 0
    parse: ParseStats = field(default_factory=ParseStats)
    inflection_rows: int = 0
    inflections_rejected: int = 0
    inflections_without_entry: int = 0
    fallback_words: int = 0
    records: int = 0
    stats: LexiconStats = field(default_factory=LexiconStats)

    def to_dict(self) -> dict[str, Any]:
        return {
            "variety": self.variety.value,
            "dictionary_rows": self.dictionary_rows,
            "malformed_rows": self.malformed_rows,
            **self.parse.to_dict(),
            "inflection_rows": self.inflection_rows,
            "inflections_rejected": self.inflections_rejected,
            "inflections_without_entry": self.inflections_without_entry,
            "fallback_words": self.fallback_words,
            "records": self.records,
            "lexicon": self.stats.to_dict(),
        }


@dataclass
class BuildReport:
    varieties: dict[Variety, VarietyReport] = field(default_factory=dict)
    lexicon_files: list[Path] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "varieties": {
                variety.value: report.to_dict() for variety, report in self.varieties.items()
            },
            "lexicon_files": [str(path) for path in self.lexicon_files],
        }

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n")


def _variety_from_path(path: Path) -> Variety:
    return Variety.parse(path.stem)


def _tsv_rows(path: Path) -> list[tuple[int, list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise CorruptFile(f"{path} is not UTF-8 text: {e}") from None
    rows = []
    for number, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line.strip() and not line.startswith("#"):
            rows.append((number, line.split("\t")))
    return rows


def read_dictionary(path: Path, report: VarietyReport | None = None) -> list[RawEntry]:
    """Read one variety's dictionary; rows without both translations are logged and skipped."""
    variety = _variety_from_path(path)
    entries = []
    for number, columns in _tsv_rows(path):
        if report is not None:
            report.dictionary_rows += 1
        columns += [""] * (4 - len(columns))
        try:
            if len(columns) > 4:
                raise MalformedEntry(f"Line {number}: expected 4 columns, got {len(columns)}")
            romansh, german, pos, gender = columns
            entries.append(RawEntry(romansh, german, variety, pos, gender, number))
        except MalformedEntry as e:
            logger.warning("%s: %s", path, e)
            if report is not None:
                report.malformed_rows += 1
    return entries


def read_inflections(path: Path, report: VarietyReport | None = None) -> list[InflectionRow]:
    rows = []
    for number, columns in _tsv_rows(path):
        if report is not None:
            report.inflection_rows += 1
        try:
            if len(columns) != 3:
                raise ValueError(f"expected 3 columns, got {len(columns)}")
            form, lemma, features = (column.strip() for column in columns)
            if not form or not lemma:
                raise ValueError("empty form or lemma")
            rows.append(InflectionRow(form, lemma, FeatureBundle.parse(features), number))
        except ValueError as e:
            logger.warning("%s: line %d: %s", path, number, e)
            if report is not None:
                report.inflections_rejected += 1
    return rows


def inflection_records(
    rows: Iterable[InflectionRow],
    lemma_records: Iterable[FormRecord],
    variety: Variety,
    report: VarietyReport | None = None,
) -> list[FormRecord]:
    """Map inflected forms to their lemma, inheriting the glosses of its verb entries."""
    glosses: dict[str, set[str]] = defaultdict(set)
    for record in lemma_records:
        if record.features.pos is PosCategory.VERB and record.surface == record.lemma:
            glosses[lookup_key(record.lemma)].add(record.gloss)

    records = []
    for row in rows:
        lemma_glosses = sorted(glosses.get(lookup_key(row.lemma), ()))
        if not lemma_glosses:
            logger.info("Inflected form %r: no dictionary entry for %r", row.form, row.lemma)
            if report is not None:
                report.inflections_without_entry += 1
            lemma_glosses = [""]
        try:
            records.extend(
                FormRecord(row.form, row.lemma, row.features, gloss, variety)
                for gloss in lemma_glosses
            )
        except MalformedEntry as e:
            logger.warning("Inflection line %d: %s", row.source_line, e)
            if report is not None:
                report.inflections_rejected += 1
    return records


def compile_variety(
    variety: Variety,
    entries: Iterable[RawEntry],
    inflections: Iterable[InflectionRow] = (),
    fallback_words: Iterable[str] = (),
    tags: frozenset[str] = DEFAULT_TAGS,
    report: VarietyReport | None = None,
) -> Lexicon:
    report = report or VarietyReport(variety)
    records, report.parse = parse_entries(entries, tags)
    records.extend(inflection_records(inflections, records, variety, report))
    fallback = list(fallback_words)
    report.fallback_words = len(fallback)

    lexicon = build(records, fallback, variety)
    report.records = len(lexicon.records)
    report.stats = lexicon.stats
    return lexicon


def _fallback_files(fallback_dir: Path, variety: Variety) -> list[Path]:
    exact = fallback_dir / f"{variety}.txt"
    extra = sorted(fallback_dir.glob(f"{variety}-*.txt"))
    return ([exact] if exact.is_file() else []) + extra


def build_lexicons(
    dict_dir: Path,
    out_dir: Path,
    inflections_dir: Path | None = None,
    fallback_dir: Path | None = None,
    tags: frozenset[str] = DEFAULT_TAGS,
) -> BuildReport:
    """Compile every ``<variety>.tsv`` dictionary in ``dict_dir`` into ``out_dir``."""
    if not dict_dir.is_dir():
        raise ConfigurationError(f"Dictionary directory not found: {dict_dir}")
    dictionaries = sorted(dict_dir.glob(f"*{DICTIONARY_SUFFIX}"))
    if not dictionaries:
        raise ConfigurationError(f"No dictionaries found in {dict_dir}")

    by_variety = sorted(
        ((_variety_from_path(path), path) for path in dictionaries),
        key=lambda item: item[0].rank,
    )
    seen = [variety for variety, _ in by_variety]
    duplicates = sorted({variety for variety in seen if seen.count(variety) > 1})
    if duplicates:
        raise ConfigurationError(f"Several dictionaries for {', '.join(duplicates)} in {dict_dir}")
    # All inputs are read before the first lexicon is written.
    inputs = []
    for variety, path in by_variety:
        variety_report = VarietyReport(variety)
        entries = read_dictionary(path, variety_report)

        inflections: list[InflectionRow] = []
        if inflections_dir is not None and (inflections_dir / path.name).is_file():
            inflections = read_inflections(inflections_dir / path.name, variety_report)

        fallback: list[str] = []
        if fallback_dir is not None:
            for fallback_path in _fallback_files(fallback_dir, variety):
                fallback.extend(read_word_list(fallback_path))
        inputs.append((variety, variety_report, entries, inflections, fallback))

    report = BuildReport()
    for variety, variety_report, entries, inflections, fallback in inputs:
        lexicon = compile_variety(variety, entries, inflections, fallback, tags, variety_report)
        target = lexicon_path(out_dir, variety)
        save(lexicon, target)

        report.varieties[variety] = variety_report
        report.lexicon_files.append(target)
        logger.log(NOTICE_LEVEL, "Built %s lexicon: %s", variety, variety_report.to_dict())

    report.write(out_dir / BUILD_REPORT_NAME)
    return report
