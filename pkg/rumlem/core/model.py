import unicodedata
from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from rumlem.core.errors import MalformedEntry, UnknownVariety

# Dictionaries mix U+0027 and U+2019; running text ("d’eira") uses U+2019.
CANONICAL_APOSTROPHE = "’"


def normalize(text: str) -> str:
    """Compose to NFC and unify apostrophe variants. Case is preserved."""
    return unicodedata.normalize("NFC", text).replace("'", CANONICAL_APOSTROPHE)


def lookup_key(text: str) -> str:
    """Key used for every lexicon lookup: normalized and lowercased, diacritics kept."""
    return normalize(text).lower()


def collation_key(text: str) -> tuple[str, str]:
    """Accent-insensitive ordering key with the raw text as tie-breaker (fomantà < fomantada)."""
    decomposed = unicodedata.normalize("NFD", text.lower())
    base = "".join(char for char in decomposed if not unicodedata.combining(char))
    return base, text


_VARIETY_ALIASES = {
    "rg": "rumantsch-grischun",
    "rumantschgrischun": "rumantsch-grischun",
    "grischun": "rumantsch-grischun",
}


class Variety(StrEnum):
    # Declaration order is the canonical order used for every tie-break.
    SURSILVAN = "sursilvan"
    SUTSILVAN = "sutsilvan"
    SURMIRAN = "surmiran"
    PUTER = "puter"
    VALLADER = "vallader"
    RUMANTSCH_GRISCHUN = "rumantsch-grischun"

    @classmethod
    def parse(cls, label: str) -> "Variety":
        key = label.strip().lower().removeprefix("rm-").replace("_", "-").replace(" ", "-")
        key = _VARIETY_ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise UnknownVariety(f"Unknown variety: {label!r}") from None

    @property
    def rank(self) -> int:
        return list(Variety).index(self)

    @property
    def code(self) -> str:
        return f"rm-{self.value}"


def parse_varieties(labels: Iterable[str]) -> list[Variety]:
    """Parse labels, drop duplicates, return them in canonical order."""
    parsed = {Variety.parse(label) for label in labels if label.strip()}
    return sorted(parsed, key=lambda variety: variety.rank)


_POS_HINTS = {
    "n": "N",
    "s": "N",
    "subst": "N",
    "noun": "N",
    "v": "V",
    "vb": "V",
    "verb": "V",
    "adj": "ADJ",
    "adjective": "ADJ",
}


class PosCategory(StrEnum):
    NOUN = "N"
    VERB = "V"
    ADJECTIVE = "ADJ"
    OTHER = "OTHER"

    @classmethod
    def from_hint(cls, hint: str) -> "PosCategory":
        """Map a dictionary POS annotation; anything outside N/V/ADJ is treated jointly."""
        key = hint.strip().lower().rstrip(".")
        return cls(_POS_HINTS.get(key, cls.OTHER.value))


class Gender(StrEnum):
    MASC = "MASC"
    FEM = "FEM"


class Number(StrEnum):
    SG = "SG"
    PL = "PL"


class VerbForm(StrEnum):
    FIN = "FIN"
    INF = "INF"
    PTCP = "PTCP"
    GER = "GER"


class Tense(StrEnum):
    PRS = "PRS"
    PST = "PST"
    IMPF = "IMPF"
    FUT = "FUT"


class Person(StrEnum):
    FIRST = "1"
    SECOND = "2"
    THIRD = "3"


class Mood(StrEnum):
    IND = "IND"
    SUBJ = "SUBJ"
    COND = "COND"
    IMP = "IMP"


# Serialization order; reproduces "PoS=V; VerbForm=PTCP; Tense=PST; Gender=FEM; Number=SG".
_FEATURE_KEYS: dict[str, tuple[str, type[StrEnum]]] = {
    "PoS": ("pos", PosCategory),
    "VerbForm": ("verb_form", VerbForm),
    "Mood": ("mood", Mood),
    "Tense": ("tense", Tense),
    "Person": ("person", Person),
    "Gender": ("gender", Gender),
    "Number": ("number", Number),
}
_VERB_ONLY = ("verb_form", "tense", "person", "mood")


@dataclass(frozen=True)
class FeatureBundle:
    pos: PosCategory
    gender: Gender | None = None
    number: Number | None = None
    verb_form: VerbForm | None = None
    tense: Tense | None = None
    person: Person | None = None
    mood: Mood | None = None

    def __post_init__(self) -> None:
        if self.pos is not PosCategory.VERB:
            misplaced = [name for name in _VERB_ONLY if getattr(self, name) is not None]
            if misplaced:
                raise ValueError(f"Verb features {misplaced} on a {self.pos} bundle")

    def items(self) -> list[tuple[str, str]]:
        pairs = []
        for key, (attribute, _) in _FEATURE_KEYS.items():
            value = getattr(self, attribute)
            if value is not None:
                pairs.append((key, str(value.value)))
        return pairs

    def serialize(self) -> str:
        return "; ".join(f"{key}={value}" for key, value in self.items())

    def compact(self) -> str:
        """Skeleton-file notation, e.g. ``ADJ;MASC;SG``."""
        return ";".join(value for _, value in self.items())

    def __str__(self) -> str:
        return self.serialize()

    @classmethod
    def parse(cls, text: str) -> "FeatureBundle":
        """Parse ``PoS=ADJ; Gender=FEM`` or the compact alias ``ADJ;FEM``."""
        parts = [part.strip() for part in text.split(";") if part.strip()]
        if not parts:
            raise ValueError("Empty feature bundle")

        values: dict[str, Any] = {}
        if "=" in parts[0]:
            for part in parts:
                key, _, raw = part.partition("=")
                if key.strip() not in _FEATURE_KEYS:
                    raise ValueError(f"Unknown feature key {key!r} in {text!r}")
                attribute, enum_type = _FEATURE_KEYS[key.strip()]
                if attribute in values:
                    raise ValueError(f"Duplicate feature key {key!r} in {text!r}")
                values[attribute] = enum_type(raw.strip())
        else:
            values["pos"] = PosCategory(parts[0])
            for part in parts[1:]:
                for attribute, enum_type in list(_FEATURE_KEYS.values())[1:]:
                    if part in {member.value for member in enum_type}:
                        if attribute in values:
                            raise ValueError(f"Duplicate feature {part!r} in {text!r}")
                        values[attribute] = enum_type(part)
                        break
                else:
                    raise ValueError(f"Unknown feature value {part!r} in {text!r}")

        if "pos" not in values:
            raise ValueError(f"Feature bundle without PoS: {text!r}")
        return cls(**values)


@dataclass(frozen=True)
class RawEntry:
    romansh_field: str
    german_field: str
    variety: Variety
    pos_hint: str | None = None
    gender_hint: str | None = None
    source_line: int = 0

    def __post_init__(self) -> None:
        if not self.romansh_field.strip():
            raise MalformedEntry(f"Line {self.source_line}: empty Romansh field")
        if not self.german_field.strip():
            raise MalformedEntry(f"Line {self.source_line}: empty German field")
        for name in ("pos_hint", "gender_hint"):
            value = getattr(self, name)
            if value is not None and not value.strip():
                object.__setattr__(self, name, None)


@dataclass(frozen=True)
class Analysis:
    lemma: str
    features: FeatureBundle
    gloss: str
    variety: Variety

    def sort_key(self) -> tuple[str, tuple[str, str], str, str, str]:
        return (
            self.features.pos.value,
            collation_key(self.lemma),
            self.features.serialize(),
            self.gloss.casefold(),
            self.gloss,
        )

    def to_dict(self) -> dict[str, str]:
        return {
            "lemma": self.lemma,
            "features": self.features.serialize(),
            "gloss": self.gloss,
            "variety": self.variety.value,
        }


def sort_analyses(analyses: Iterable[Analysis]) -> list[Analysis]:
    """Deduplicate and order analyses deterministically."""
    return sorted(dict.fromkeys(analyses), key=Analysis.sort_key)


@dataclass(frozen=True)
class FormRecord:
    surface: str
    lemma: str
    features: FeatureBundle
    gloss: str
    variety: Variety

    def __post_init__(self) -> None:
        object.__setattr__(self, "surface", normalize(self.surface.strip()))
        object.__setattr__(self, "lemma", normalize(self.lemma.strip()))
        object.__setattr__(self, "gloss", " ".join(self.gloss.split()))
        for name in ("surface", "lemma"):
            value = getattr(self, name)
            if not value or any(char.isspace() for char in value):
                raise MalformedEntry(f"{name} must be a single word, got {value!r}")

    @property
    def key(self) -> str:
        return lookup_key(self.surface)

    def analysis(self) -> Analysis:
        return Analysis(self.lemma, self.features, self.gloss, self.variety)

    def sort_key(self) -> tuple[str, str, tuple[str, tuple[str, str], str, str, str]]:
        return (self.key, self.surface, self.analysis().sort_key())


class Recognition(StrEnum):
    LEMMATIZABLE = "lemmatizable"
    FALLBACK_ONLY = "fallback-only"
    UNKNOWN = "unknown"
