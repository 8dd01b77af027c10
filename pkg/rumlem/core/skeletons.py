"""Test skeletons: one annotated example per frequent (POS, pattern signature) pair.

File layout, one case per file::

    # signature: w(i), w(i)
    # pos: ADJ
    # occurrences: 12
    'antalg(iant)evel, antalg(iant)evla'; adj
    >>> antalgevel:
            antalgevel; ADJ;MASC;SG
            antalgevla; ADJ;FEM;SG
        antalgiantevel:
            antalgiantevel: ADJ;MASC;SG
            antalgiantevla: ADJ;FEM;SG

The entry line is ``'<romansh>'; <pos>; <gender>; <gloss>`` with trailing fields optional.
Form lines accept either ``;`` or ``:`` after the form.
"""

import logging
from collections import Counter, defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

import regex

from rumlem.core.entry_parser import (
    DEFAULT_TAGS,
    PatternSignature,
    compute_signature,
    resolve_pos,
)
from rumlem.core.errors import MalformedEntry
from rumlem.core.model import FeatureBundle, FormRecord, PosCategory, RawEntry, Variety

logger = logging.getLogger(__name__)

GOLD_MARKER = ">>>"
# RawEntry needs a gloss; gold files may omit it.
MISSING_GLOSS = "-"

_ENTRY_LINE = regex.compile(r"^'(?P<romansh>.*?)'(?:\s*;\s*(?P<rest>.*))?$")
_FORM_LINE = regex.compile(r"^(?P<form>[^\s;:]+)\s*[;:]\s*(?P<features>\S.*)$")
_HEADER = regex.compile(r"^#\s*(?P<key>[a-z]+)\s*:\s*(?P<value>.*)$")


@dataclass
class SkeletonCase:
    signature: PatternSignature
    pos_category: PosCategory
    example_entry: RawEntry
    occurrence_count: int = 1
    gold_records: list[FormRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.occurrence_count < 1:
            raise ValueError("occurrence_count must be at least 1")


def generate_skeletons(
    entries: Iterable[RawEntry], min_count: int = 10, tags: frozenset[str] = DEFAULT_TAGS
) -> list[SkeletonCase]:
    """One case per (POS, signature) seen more than ``min_count`` times, most frequent first."""
    grouped: dict[tuple[PosCategory, str], list[RawEntry]] = defaultdict(list)
    signatures: dict[tuple[PosCategory, str], PatternSignature] = {}
    for entry in entries:
        try:
            signature = compute_signature(entry, tags)
        except MalformedEntry as e:
            logger.debug("Skipping malformed entry line %d: %s", entry.source_line, e)
            continue
        key = (resolve_pos(entry, tags), signature.rendered)
        grouped[key].append(entry)
        signatures.setdefault(key, signature)

    cases = []
    for key, group in grouped.items():
        if len(group) <= min_count:
            continue
        example_field, _ = Counter(entry.romansh_field for entry in group).most_common(1)[0]
        example = next(entry for entry in group if entry.romansh_field == example_field)
        cases.append(SkeletonCase(signatures[key], key[0], example, len(group)))

    pos_order = list(PosCategory)
    cases.sort(
        key=lambda case: (
            -case.occurrence_count,
            pos_order.index(case.pos_category),
            case.signature.rendered,
        )
    )
    return cases


def gold_shape(records: Iterable[FormRecord]) -> list[tuple[str, str, str]]:
    """(lemma, form, compact features), deduplicated in order; glosses are not annotated."""
    shapes = ((record.lemma, record.surface, record.features.compact()) for record in records)
    return list(dict.fromkeys(shapes))


def format_skeleton(case: SkeletonCase) -> str:
    entry = case.example_entry
    fields = [entry.pos_hint or "", entry.gender_hint or "", entry.german_field]
    lines = [
        f"# signature: {case.signature}",
        f"# pos: {case.pos_category}",
        f"# occurrences: {case.occurrence_count}",
        f"# variety: {entry.variety}",
        f"'{entry.romansh_field}'; " + "; ".join(fields),
    ]

    by_lemma: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for lemma, form, features in gold_shape(case.gold_records):
        by_lemma[lemma].append((form, features))
    if not by_lemma:
        lines.append(GOLD_MARKER)
    for index, (lemma, forms) in enumerate(by_lemma.items()):
        prefix = f"{GOLD_MARKER} " if index == 0 else "    "
        lines.append(f"{prefix}{lemma}:")
        lines.extend(f"        {form}; {features}" for form, features in forms)
    return "\n".join(lines) + "\n"


def parse_skeleton(text: str) -> SkeletonCase:
    headers: dict[str, str] = {}
    entry: RawEntry | None = None
    gold: list[FormRecord] = []
    lemma: str | None = None
    in_gold = False

    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if not in_gold and (header := _HEADER.match(line)):
            headers[header["key"]] = header["value"].strip()
            continue

        if entry is None:
            match = _ENTRY_LINE.match(line)
            if match is None:
                raise MalformedEntry(f"Line {number}: expected a quoted entry line, got {line!r}")
            rest = [part.strip() for part in (match["rest"] or "").split(";")]
            rest += [""] * (3 - len(rest))
            variety = Variety.parse(headers.get("variety", Variety.RUMANTSCH_GRISCHUN.value))
            entry = RawEntry(
                romansh_field=match["romansh"],
                german_field=";".join(rest[2:]).strip() or MISSING_GLOSS,
                variety=variety,
                pos_hint=rest[0] or None,
                gender_hint=rest[1] or None,
                source_line=number,
            )
            continue

        if line.startswith(GOLD_MARKER):
            in_gold = True
            line = line[len(GOLD_MARKER) :].strip()
            if not line:
                continue
        if not in_gold:
            raise MalformedEntry(f"Line {number}: expected {GOLD_MARKER!r}, got {line!r}")

        if line.endswith(":") and " " not in line:
            lemma = line[:-1]
            continue
        form_match = _FORM_LINE.match(line)
        if form_match is None or lemma is None:
            raise MalformedEntry(f"Line {number}: cannot read gold line {line!r}")
        features = FeatureBundle.parse(form_match["features"])
        gold.append(FormRecord(form_match["form"], lemma, features, "", entry.variety))

    if entry is None:
        raise MalformedEntry("Skeleton file has no entry line")
    return SkeletonCase(
        signature=compute_signature(entry),
        pos_category=resolve_pos(entry),
        example_entry=entry,
        occurrence_count=int(headers.get("occurrences", "1")),
        gold_records=gold,
    )


def write_skeletons(cases: Iterable[SkeletonCase], out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, case in enumerate(cases, start=1):
        slug = regex.sub(r"[^a-z0-9]+", "-", case.signature.rendered.lower()).strip("-")
        path = out_dir / f"{index:03d}-{case.pos_category.value.lower()}-{slug}.txt"
        path.write_text(format_skeleton(case), encoding="utf-8")
        paths.append(path)
    logger.info("Wrote %d skeleton files to %s", len(paths), out_dir)
    return paths
