import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import regex

from rumlem.core.model import Variety, lookup_key, normalize
from rumlem.core.wordlists import data_dir, read_word_list

logger = logging.getLogger(__name__)

# Sentence punctuation split off as standalone tokens. ASCII hyphens stay inside words.
DETACHABLE = '.,!?;:()"«»–'
# Tokens dropped before counting, for coverage and classification alike.
PUNCTUATION_FOR_COUNTING = frozenset(".,!?;:")

_DETACHABLE_CLASS = regex.escape(DETACHABLE)
_PIECE = regex.compile(
    rf"\p{{N}}+(?:[.,]\p{{N}}+)+|[{_DETACHABLE_CLASS}]|[^{_DETACHABLE_CLASS}]+"
)
_URL = regex.compile(r"^(?:https?://|www\.)\S+$", regex.IGNORECASE)
_ELISION = regex.compile(r"^(\p{L}{1,2}’)(.+)$")


@dataclass(frozen=True)
class TokenizerConfig:
    protected_patterns: Mapping[Variety, frozenset[str]] = field(default_factory=dict)
    elision_split: bool = True

    def __post_init__(self) -> None:
        cleaned = {}
        for variety, patterns in self.protected_patterns.items():
            for pattern in patterns:
                if not pattern or any(char.isspace() for char in pattern):
                    raise ValueError(f"Invalid protected pattern for {variety}: {pattern!r}")
            cleaned[variety] = frozenset(lookup_key(pattern) for pattern in patterns)
        object.__setattr__(self, "protected_patterns", cleaned)

    def protected_for(self, variety: Variety | None) -> frozenset[str]:
        """Patterns of one variety, or of all of them when the variety is not yet known."""
        if variety is not None:
            return self.protected_patterns.get(variety, frozenset())
        return frozenset[str]().union(*self.protected_patterns.values())


def load_protected_patterns(directory: str | Path | None = None) -> dict[Variety, frozenset[str]]:
    """Read ``<variety>.txt`` pattern files; varieties without a file get no patterns."""
    base = data_dir("protected", directory)
    patterns = {}
    for variety in Variety:
        path = base.joinpath(f"{variety}.txt")
        if not path.is_file():
            continue
        patterns[variety] = frozenset(read_word_list(path))
        logger.debug("Loaded %d protected patterns for %s", len(patterns[variety]), variety)
    return patterns


def load_tokenizer_config(
    directory: str | Path | None = None, elision_split: bool = True
) -> TokenizerConfig:
    return TokenizerConfig(load_protected_patterns(directory), elision_split)


def _split_elision(token: str) -> list[str]:
    parts = []
    while match := _ELISION.match(token):
        parts.append(match[1])
        token = match[2]
    parts.append(token)
    return parts


def _split_chunk(chunk: str, protected: frozenset[str], elision_split: bool) -> list[str]:
    if lookup_key(chunk) in protected:
        return [chunk]

    # Clitics come off first so that a number or URL behind them stays whole.
    rest = chunk.lstrip(DETACHABLE)
    lead = chunk[: len(chunk) - len(rest)]
    clitics: list[str] = []
    if elision_split and lookup_key(rest.rstrip(DETACHABLE)) not in protected:
        *clitics, rest = _split_elision(rest)

    core = rest.strip(DETACHABLE)
    if core and _URL.match(core):
        start = rest.index(core)
        return [*lead, *clitics, *rest[:start], core, *rest[start + len(core) :]]

    tokens = [*lead, *clitics]
    for piece in _PIECE.findall(rest):
        if len(piece) == 1 and piece in DETACHABLE:
            tokens.append(piece)
        elif elision_split and lookup_key(piece) not in protected:
            tokens.extend(_split_elision(piece))
        else:
            tokens.append(piece)
    return tokens


def tokenize(
    text: str, config: TokenizerConfig | None = None, variety: Variety | None = None
) -> list[str]:
    """Split text into word and punctuation tokens.

    Elided clitics keep their apostrophe: ``d’eira`` becomes ``d’`` and ``eira``. Numbers
    such as ``3.5``, URLs and hyphenated words stay whole, as do protected patterns.
    """
    config = config or TokenizerConfig()
    protected = config.protected_for(variety)
    tokens = []
    for chunk in normalize(text).split():
        tokens.extend(_split_chunk(chunk, protected, config.elision_split))
    return tokens


def strip_punctuation(tokens: Iterable[str]) -> list[str]:
    return [token for token in tokens if token not in PUNCTUATION_FOR_COUNTING]


def count_tokens(text: str, config: TokenizerConfig | None = None) -> int:
    return len(strip_punctuation(tokenize(text, config)))
