import logging
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from itertools import product

import regex

from rumlem.core.errors import MalformedEntry, MultiWordEntry, UnsupportedPattern
from rumlem.core.model import (
    FeatureBundle,
    FormRecord,
    Gender,
    Number,
    PosCategory,
    RawEntry,
    VerbForm,
    normalize,
)

logger = logging.getLogger(__name__)

DEFAULT_TAGS = frozenset(
    {"m", "f", "m/f", "sg", "pl", "adj", "v", "n", "adv", "pron", "prep", "conj"}
)
VERB_TAGS = frozenset({"v"})

_WORD_CHAR = r"[\p{L}\p{M}\p{N}’\-]"
_INFIX_GROUP = r"\(\p{L}+\)"
_WORD = (
    rf"{_WORD_CHAR}+(?:{_INFIX_GROUP}{_WORD_CHAR}*)*"
    rf"|{_INFIX_GROUP}{_WORD_CHAR}+(?:{_INFIX_GROUP}{_WORD_CHAR}*)*"
)
_LEXEME = regex.compile(
    rf"(?P<word>{_WORD})|(?P<bracket>\[[^\[\]]*\])|(?P<space>\s+)|(?P<punct>.)"
)
_PAREN_GROUP = regex.compile(r"\(([^()]*)\)")
_GLOSS_SUFFIX = regex.compile(r"(?<=\p{L})\((\p{L}+)\)")


class TokenKind(StrEnum):
    W = "w"
    WPLUS = "w+"
    PUNCT = "punct"
    MT = "MT"


@dataclass(frozen=True)
class PatternToken:
    kind: TokenKind
    text: str

    @property
    def has_infix(self) -> bool:
        return self.kind is TokenKind.W and "(" in self.text

    def render(self) -> str:
        if self.kind is TokenKind.PUNCT:
            return self.text
        if self.kind is TokenKind.MT:
            return "MT"
        if self.has_infix:
            return "w(i)"
        return self.kind.value


@dataclass(frozen=True)
class PatternSignature:
    """Structure of a Romansh field. Two signatures are equal iff their rendered forms are."""

    rendered: str
    tokens: tuple[PatternToken, ...] = field(default=(), compare=False, repr=False)

    def __str__(self) -> str:
        return self.rendered

    @property
    def has_multiword(self) -> bool:
        return any(token.kind is TokenKind.WPLUS and " " in token.text for token in self.tokens)


def _check_balanced(text: str) -> None:
    depth = 0
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise MalformedEntry(f"Unbalanced parentheses in {text!r}")
    if depth:
        raise MalformedEntry(f"Unbalanced parentheses in {text!r}")


def _is_tag(text: str, tags: frozenset[str]) -> bool:
    return text.lower().rstrip(".") in tags


def tokenize_field(text: str, tags: frozenset[str] = DEFAULT_TAGS) -> list[PatternToken]:
    """Split a Romansh dictionary field into pattern tokens; lossless up to whitespace."""
    text = normalize(text)
    _check_balanced(text)

    tokens: list[PatternToken] = []
    after_space = False
    for match in _LEXEME.finditer(text):
        kind = match.lastgroup
        value = match.group()
        if kind == "space":
            after_space = True
            continue

        if kind == "word":
            if _is_tag(value, tags):
                token = PatternToken(TokenKind.MT, value.lower().rstrip("."))
            else:
                token = PatternToken(TokenKind.W, value)
        elif kind == "bracket":
            inner = value[1:-1].strip()
            if _is_tag(inner, tags):
                token = PatternToken(TokenKind.MT, inner.lower().rstrip("."))
            else:
                token = PatternToken(TokenKind.WPLUS, value)
        elif value == "." and tokens and tokens[-1].kind is TokenKind.MT and not after_space:
            # "pl." is the tag "pl"
            after_space = False
            continue
        else:
            token = PatternToken(TokenKind.PUNCT, value)

        if (
            token.kind is TokenKind.MT
            and len(tokens) >= 2
            and tokens[-1] == PatternToken(TokenKind.PUNCT, "/")
            and tokens[-2].kind is TokenKind.MT
        ):
            merged = f"{tokens[-2].text}/{token.text}"
            del tokens[-2:]
            token = PatternToken(TokenKind.MT, merged)
        elif (
            token.kind in (TokenKind.W, TokenKind.WPLUS)
            and tokens
            and tokens[-1].kind in (TokenKind.W, TokenKind.WPLUS)
            and not token.text.startswith("[")
            and not tokens[-1].text.startswith("[")
        ):
            previous = tokens.pop()
            token = PatternToken(TokenKind.WPLUS, f"{previous.text} {token.text}")

        tokens.append(token)
        after_space = False
    return tokens


def render_signature(tokens: Sequence[PatternToken]) -> str:
    parts: list[str] = []
    previous: PatternToken | None = None
    for token in tokens:
        glued = previous is None or (
            token.kind is TokenKind.PUNCT and token.text in ",;)/"
        ) or (previous.kind is TokenKind.PUNCT and previous.text in "(/")
        parts.append(token.render() if glued else f" {token.render()}")
        previous = token
    return "".join(parts)


def compute_signature(entry: RawEntry, tags: frozenset[str] = DEFAULT_TAGS) -> PatternSignature:
    tokens = tuple(tokenize_field(entry.romansh_field, tags))
    return PatternSignature(render_signature(tokens), tokens)


def expand_parenthetical(word: str) -> list[str]:
    """Expand optional infixes: ``antalg(iant)evel`` -> ``[antalgevel, antalgiantevel]``.

    Groups are expanded independently, excluded before included, left to right.
    """
    _check_balanced(word)
    pieces = _PAREN_GROUP.split(word)
    literals, optionals = pieces[0::2], pieces[1::2]
    if any("(" in piece or ")" in piece for piece in literals):
        raise MalformedEntry(f"Nested parentheses in {word!r}")
    if any(not optional.isalpha() for optional in optionals):
        raise MalformedEntry(f"Parenthetical infix must be alphabetic in {word!r}")

    variants = []
    for choice in product((False, True), repeat=len(optionals)):
        text = literals[0]
        for include, optional, literal in zip(choice, optionals, literals[1:], strict=True):
            text += (optional if include else "") + literal
        variants.append(text)
    return variants


def expand_gloss(gloss: str) -> list[str]:
    """``Bewunderer(in)`` -> ``[Bewunderer, Bewundererin]``; all suffixes toggle together."""
    text = " ".join(gloss.split())
    try:
        _check_balanced(text)
    except MalformedEntry:
        return [text]
    if not _GLOSS_SUFFIX.search(text):
        return [text]
    return [_GLOSS_SUFFIX.sub("", text), _GLOSS_SUFFIX.sub(r"\1", text)]


def infer_pos(entry: RawEntry, tags: frozenset[str] = DEFAULT_TAGS) -> PosCategory | None:
    """Capitalized German gloss means noun, unless the Romansh field carries a verb tag."""
    if entry.pos_hint is not None:
        return PosCategory.from_hint(entry.pos_hint)

    try:
        tokens = tokenize_field(entry.romansh_field, tags)
    except MalformedEntry:
        tokens = []
    if any(token.kind is TokenKind.MT and token.text in VERB_TAGS for token in tokens):
        return None

    first_letter = next((char for char in entry.german_field if char.isalpha()), None)
    if first_letter is not None and first_letter.isupper():
        return PosCategory.NOUN
    return None


def resolve_pos(entry: RawEntry, tags: frozenset[str] = DEFAULT_TAGS) -> PosCategory:
    return infer_pos(entry, tags) or PosCategory.OTHER


@dataclass(frozen=True)
class _Item:
    """One comma-separated Romansh word with its ``(w, MT)`` inflected forms."""

    word: str
    forms: tuple[tuple[str, tuple[str, ...]], ...] = ()


def _split_top(tokens: Sequence[PatternToken], separator: str) -> list[list[PatternToken]]:
    chunks: list[list[PatternToken]] = [[]]
    depth = 0
    for token in tokens:
        if token.kind is TokenKind.PUNCT:
            if token.text == "(":
                depth += 1
            elif token.text == ")":
                depth -= 1
            elif token.text == separator and depth == 0:
                chunks.append([])
                continue
        chunks[-1].append(token)
    return chunks


def _parse_item(tokens: Sequence[PatternToken], signature: PatternSignature) -> _Item:
    def unsupported() -> UnsupportedPattern:
        return UnsupportedPattern(f"No rule for pattern {signature}", str(signature))

    if not tokens or tokens[0].kind is not TokenKind.W:
        raise unsupported()

    forms = []
    rest = list(tokens[1:])
    while rest:
        if rest[0] != PatternToken(TokenKind.PUNCT, "("):
            raise unsupported()
        try:
            close = rest.index(PatternToken(TokenKind.PUNCT, ")"))
        except ValueError:
            raise unsupported() from None
        inner, rest = rest[1:close], rest[close + 1 :]
        if len(inner) < 3 or inner[0].kind is not TokenKind.W or inner[0].has_infix:
            raise unsupported()
        form_tags = []
        for comma, tag in zip(inner[1::2], inner[2::2], strict=False):
            if comma != PatternToken(TokenKind.PUNCT, ",") or tag.kind is not TokenKind.MT:
                raise unsupported()
            form_tags.append(tag.text)
        if len(inner) % 2 == 0:
            raise unsupported()
        forms.append((inner[0].text, tuple(form_tags)))
    return _Item(tokens[0].text, tuple(forms))


def _parse_structure(signature: PatternSignature) -> list[list[_Item]]:
    if signature.has_multiword:
        raise MultiWordEntry(f"Multi-word entry {signature}", str(signature))
    if any(token.kind is TokenKind.WPLUS for token in signature.tokens):
        raise UnsupportedPattern(f"Unknown tag in pattern {signature}", str(signature))

    return [
        [_parse_item(item_tokens, signature) for item_tokens in _split_top(group, ",")]
        for group in _split_top(signature.tokens, ";")
    ]


_GENDER_TAGS = {"m": Gender.MASC, "f": Gender.FEM}
_NUMBER_TAGS = {"sg": Number.SG, "pl": Number.PL}


def _parse_gender_hint(hint: str | None) -> list[Gender]:
    if hint is None:
        return []
    parts = [part.strip().lower().rstrip(".") for part in hint.split("/")]
    return [_GENDER_TAGS[part] for part in parts if part in _GENDER_TAGS]


def _form_features(
    pos: PosCategory, tags: Sequence[str], gender: Gender | None, signature: PatternSignature
) -> FeatureBundle:
    number = Number.SG
    for tag in tags:
        if tag in _NUMBER_TAGS:
            number = _NUMBER_TAGS[tag]
        elif tag in _GENDER_TAGS:
            gender = _GENDER_TAGS[tag]
        else:
            raise UnsupportedPattern(
                f"Tag {tag!r} cannot mark an inflected form in {signature}", str(signature)
            )
    return FeatureBundle(pos, gender=gender, number=number)


def _item_records(
    item: _Item,
    pos: PosCategory,
    gender: Gender | None,
    glosses: Sequence[str],
    entry: RawEntry,
    signature: PatternSignature,
) -> list[FormRecord]:
    records = []
    for lemma in expand_parenthetical(item.word):
        base = FeatureBundle(pos, gender=gender, number=Number.SG)
        for gloss in glosses:
            records.append(FormRecord(lemma, lemma, base, gloss, entry.variety))
        for surface, tags in item.forms:
            features = _form_features(pos, tags, gender, signature)
            for gloss in glosses:
                records.append(FormRecord(surface, lemma, features, gloss, entry.variety))
    return records


def _noun_records(
    groups: list[list[_Item]], entry: RawEntry, signature: PatternSignature
) -> list[FormRecord]:
    # Several ;-groups receive one gender each; otherwise the comma items do.
    units = groups if len(groups) > 1 else [[item] for item in groups[0]]
    genders = _parse_gender_hint(entry.gender_hint)

    per_unit: list[list[Gender | None]]
    if len(genders) == len(units):
        per_unit = [[gender] for gender in genders]
    elif len(genders) == 1:
        per_unit = [[genders[0]] for _ in units]
    else:
        per_unit = [list(genders) or [None] for _ in units]

    variants = [
        (unit, gender)
        for unit, unit_genders in zip(units, per_unit, strict=True)
        for gender in unit_genders
    ]
    glosses = expand_gloss(entry.german_field)
    aligned = len(glosses) == len(variants) and len(variants) > 1

    records = []
    for index, (unit, gender) in enumerate(variants):
        unit_glosses = [glosses[index]] if aligned else glosses
        for item in unit:
            records.extend(
                _item_records(item, PosCategory.NOUN, gender, unit_glosses, entry, signature)
            )
    return records


def _adjective_records(
    groups: list[list[_Item]], entry: RawEntry, signature: PatternSignature
) -> list[FormRecord]:
    glosses = expand_gloss(entry.german_field)
    records = []
    for items in groups:
        if len(items) == 1:
            records.extend(
                _item_records(items[0], PosCategory.ADJECTIVE, None, glosses, entry, signature)
            )
            continue
        if len(items) != 2:
            raise UnsupportedPattern(f"No adjective rule for {signature}", str(signature))

        masculine, feminine = items
        masculine_variants = expand_parenthetical(masculine.word)
        feminine_variants = expand_parenthetical(feminine.word)
        if len(masculine_variants) != len(feminine_variants):
            raise UnsupportedPattern(
                f"Infix variants do not pair up in {entry.romansh_field!r}", str(signature)
            )
        for masc_word, fem_word in zip(masculine_variants, feminine_variants, strict=True):
            for word, item, gender in (
                (masc_word, masculine, Gender.MASC),
                (fem_word, feminine, Gender.FEM),
            ):
                base = FeatureBundle(PosCategory.ADJECTIVE, gender=gender, number=Number.SG)
                for gloss in glosses:
                    records.append(FormRecord(word, masc_word, base, gloss, entry.variety))
                for surface, tags in item.forms:
                    features = _form_features(PosCategory.ADJECTIVE, tags, gender, signature)
                    for gloss in glosses:
                        records.append(
                            FormRecord(surface, masc_word, features, gloss, entry.variety)
                        )
    return records


def _uninflected_records(features: FeatureBundle) -> Callable[..., list[FormRecord]]:
    """Verbs (paradigms come from inflection files) and the joint Other category."""

    def build(
        groups: list[list[_Item]], entry: RawEntry, signature: PatternSignature
    ) -> list[FormRecord]:
        glosses = expand_gloss(entry.german_field)
        records = []
        for items in groups:
            for item in items:
                if item.forms:
                    raise UnsupportedPattern(
                        f"No {features.pos} rule for inflected forms in {signature}",
                        str(signature),
                    )
                for lemma in expand_parenthetical(item.word):
                    for gloss in glosses:
                        records.append(FormRecord(lemma, lemma, features, gloss, entry.variety))
        return records

    return build


_RULES: dict[PosCategory, Callable[..., list[FormRecord]]] = {
    PosCategory.NOUN: _noun_records,
    PosCategory.ADJECTIVE: _adjective_records,
    PosCategory.VERB: _uninflected_records(
        FeatureBundle(PosCategory.VERB, verb_form=VerbForm.INF)
    ),
    PosCategory.OTHER: _uninflected_records(FeatureBundle(PosCategory.OTHER)),
}


def parse_entry(entry: RawEntry, tags: frozenset[str] = DEFAULT_TAGS) -> list[FormRecord]:
    """Turn one dictionary row into form records, or raise UnsupportedPattern."""
    signature = compute_signature(entry, tags)
    groups = _parse_structure(signature)
    pos = resolve_pos(entry, tags)
    records = _RULES[pos](groups, entry, signature)
    return list(dict.fromkeys(records))


@dataclass
class ParseStats:
    entries_total: int = 0
    entries_parsed: int = 0
    entries_rejected: int = 0
    multi_word: int = 0
    records_emitted: int = 0
    parsed_by_signature: Counter[str] = field(default_factory=Counter)
    rejected_by_signature: Counter[str] = field(default_factory=Counter)

    def to_dict(self) -> dict[str, object]:
        return {
            "entries_total": self.entries_total,
            "entries_parsed": self.entries_parsed,
            "entries_rejected": self.entries_rejected,
            "multi_word": self.multi_word,
            "records_emitted": self.records_emitted,
            "parsed_by_signature": dict(self.parsed_by_signature.most_common()),
            "rejected_by_signature": dict(self.rejected_by_signature.most_common()),
        }


def parse_entries(
    entries: Iterable[RawEntry], tags: frozenset[str] = DEFAULT_TAGS
) -> tuple[list[FormRecord], ParseStats]:
    """Parse every entry; rejected entries are logged and counted, never guessed."""
    stats = ParseStats()
    records: list[FormRecord] = []
    for entry in entries:
        stats.entries_total += 1
        try:
            signature = str(compute_signature(entry, tags))
        except MalformedEntry:
            signature = "<malformed>"
        try:
            parsed = parse_entry(entry, tags)
        except MultiWordEntry:
            stats.entries_rejected += 1
            stats.multi_word += 1
            stats.rejected_by_signature[signature] += 1
            logger.debug("Dropping multi-word entry line %d: %s", entry.source_line, entry)
            continue
        except (UnsupportedPattern, MalformedEntry) as e:
            stats.entries_rejected += 1
            stats.rejected_by_signature[signature] += 1
            logger.warning(
                "Rejected %s entry line %d %r: %s",
                entry.variety,
                entry.source_line,
                entry.romansh_field,
                e,
            )
            continue
        stats.entries_parsed += 1
        stats.parsed_by_signature[signature] += 1
        stats.records_emitted += len(parsed)
        records.extend(parsed)
    return records, stats
