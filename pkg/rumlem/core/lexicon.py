import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from rumlem.core.errors import (
    CorruptFile,
    IncompatibleVersion,
    LexiconNotFound,
    VarietyMismatch,
)
from rumlem.core.model import (
    Analysis,
    FeatureBundle,
    FormRecord,
    PosCategory,
    Recognition,
    Variety,
    lookup_key,
    sort_analyses,
)

logger = logging.getLogger(__name__)

FORMAT_NAME = "rumlem-lexicon"
FORMAT_VERSION = 1
LEXICON_SUFFIX = ".lexc"


@dataclass(frozen=True)
class LexiconStats:
    vocab_size: int = 0
    mapped_forms: int = 0
    lemma_count: int = 0
    lemmas_by_pos: dict[PosCategory, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, int]:
        # Column layout of the coverage table: Vocab, Mapped Forms, Lemmas, then per POS.
        return {
            "vocab": self.vocab_size,
            "mapped_forms": self.mapped_forms,
            "lemmas": self.lemma_count,
            **{pos.value.lower(): self.lemmas_by_pos.get(pos, 0) for pos in PosCategory},
        }


@dataclass(frozen=True)
class Lexicon:
    """Per-variety index from normalized surface form to analyses, plus fallback words.

    Equality covers variety, records and fallback vocabulary; the index and stats are
    derived from them.
    """

    variety: Variety
    records: tuple[FormRecord, ...] = ()
    fallback_vocab: frozenset[str] = frozenset()
    form_index: Mapping[str, tuple[Analysis, ...]] = field(
        default_factory=dict, compare=False, repr=False
    )
    stats: LexiconStats = field(default_factory=LexiconStats, compare=False)

    def __len__(self) -> int:
        return len(self.form_index)


LexiconSet = Mapping[Variety, Lexicon]


def build(
    records: Iterable[FormRecord], fallback_words: Iterable[str], variety: Variety
) -> Lexicon:
    """Compile records into a lexicon; independent of input order and duplication."""
    unique = set(records)
    for record in unique:
        if record.variety is not variety:
            raise VarietyMismatch(
                f"Record {record.surface!r} belongs to {record.variety}, not {variety}"
            )
    ordered = tuple(sorted(unique, key=FormRecord.sort_key))

    grouped: dict[str, list[Analysis]] = {}
    for record in ordered:
        grouped.setdefault(record.key, []).append(record.analysis())
    form_index = {key: tuple(sort_analyses(analyses)) for key, analyses in grouped.items()}

    fallback = frozenset(
        key for key in (lookup_key(word.strip()) for word in fallback_words) if key
    )

    lemmas = {(record.lemma, record.features.pos) for record in ordered}
    by_pos = Counter(pos for _, pos in lemmas)
    stats = LexiconStats(
        vocab_size=len(form_index.keys() | fallback),
        mapped_forms=len(form_index),
        lemma_count=len(lemmas),
        lemmas_by_pos={pos: by_pos.get(pos, 0) for pos in PosCategory},
    )
    return Lexicon(variety, ordered, fallback, form_index, stats)


def lookup(lexicon: Lexicon, surface: str) -> list[Analysis]:
    return list(lexicon.form_index.get(lookup_key(surface), ()))


def is_known(lexicon: Lexicon, surface: str) -> Recognition:
    key = lookup_key(surface)
    if key in lexicon.form_index:
        return Recognition.LEMMATIZABLE
    if key in lexicon.fallback_vocab:
        return Recognition.FALLBACK_ONLY
    return Recognition.UNKNOWN


def save(lexicon: Lexicon, path: Path) -> None:
    """Write the versioned, line-oriented ``.lexc`` format.

    Sections are length-prefixed so a truncated file is detected on load.
    """
    lines = [
        f"#{FORMAT_NAME} v{FORMAT_VERSION}",
        f"variety\t{lexicon.variety}",
        f"records\t{len(lexicon.records)}",
    ]
    for record in lexicon.records:
        lines.append(
            "\t".join(
                (
                    record.surface,
                    record.lemma,
                    record.features.serialize(),
                    record.gloss,
                )
            )
        )
    lines.append(f"fallback\t{len(lexicon.fallback_vocab)}")
    lines.extend(sorted(lexicon.fallback_vocab))
    lines.append("end")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("Saved %s lexicon (%d records) to %s", lexicon.variety, len(lexicon.records), path)


def _section_count(line: str | None, name: str, path: Path) -> int:
    if line is None:
        raise CorruptFile(f"{path}: truncated before the {name} section")
    label, _, count = line.partition("\t")
    if label != name or not count.isdigit():
        raise CorruptFile(f"{path}: expected {name!r} section header, got {line!r}")
    return int(count)


def load(path: Path) -> Lexicon:
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except FileNotFoundError:
        raise LexiconNotFound(f"Lexicon file not found: {path}") from None
    except UnicodeDecodeError as e:
        raise CorruptFile(f"{path}: not UTF-8 ({e})") from None

    if lines and lines[-1] == "":
        lines.pop()
    cursor = iter(lines)

    header = next(cursor, "")
    name, _, version = header.lstrip("#").partition(" v")
    if not header.startswith("#") or name != FORMAT_NAME or not version.isdigit():
        raise CorruptFile(f"{path}: missing {FORMAT_NAME} header")
    if int(version) != FORMAT_VERSION:
        raise IncompatibleVersion(
            f"{path}: format version {version}, this reader supports {FORMAT_VERSION}"
        )

    variety_line = next(cursor, None)
    if variety_line is None or not variety_line.startswith("variety\t"):
        raise CorruptFile(f"{path}: missing variety line")
    try:
        variety = Variety.parse(variety_line.partition("\t")[2])
    except ValueError as e:
        raise CorruptFile(f"{path}: {e}") from None

    records = []
    for _ in range(_section_count(next(cursor, None), "records", path)):
        line = next(cursor, None)
        if line is None:
            raise CorruptFile(f"{path}: truncated inside the records section")
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorruptFile(f"{path}: malformed record line {line!r}")
        surface, lemma, features, gloss = fields
        try:
            records.append(
                FormRecord(surface, lemma, FeatureBundle.parse(features), gloss, variety)
            )
        except ValueError as e:
            raise CorruptFile(f"{path}: malformed record line {line!r}: {e}") from None

    fallback = []
    for _ in range(_section_count(next(cursor, None), "fallback", path)):
        word = next(cursor, None)
        if word is None:
            raise CorruptFile(f"{path}: truncated inside the fallback section")
        fallback.append(word)

    if next(cursor, None) != "end" or next(cursor, None) is not None:
        raise CorruptFile(f"{path}: missing end marker or trailing data")
    return build(records, fallback, variety)


def lexicon_path(directory: Path, variety: Variety) -> Path:
    return directory / f"{variety}{LEXICON_SUFFIX}"


def load_lexicon_set(
    directory: Path, varieties: Iterable[Variety] | None = None
) -> dict[Variety, Lexicon]:
    """Load whichever of the requested varieties are installed; missing ones are skipped."""
    if not directory.is_dir():
        raise LexiconNotFound(f"Lexicon directory not found: {directory}")

    lexicons = {}
    for variety in varieties or list(Variety):
        path = lexicon_path(directory, variety)
        if not path.exists():
            logger.debug("No %s lexicon in %s", variety, directory)
            continue
        lexicons[variety] = load(path)
    if not lexicons:
        raise LexiconNotFound(f"No {LEXICON_SUFFIX} lexicons found in {directory}")
    return dict(sorted(lexicons.items(), key=lambda item: item[0].rank))
