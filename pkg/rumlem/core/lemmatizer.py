import logging
from dataclasses import dataclass
from typing import Any

from rumlem.core.classifier import identify_variety
from rumlem.core.errors import EmptyInput, LexiconNotFound, UnknownVariety
from rumlem.core.lexicon import LexiconSet, is_known, lookup
from rumlem.core.model import Analysis, Recognition, Variety
from rumlem.core.tokenizer import TokenizerConfig, tokenize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TokenAnalysis:
    token: str
    analyses: tuple[Analysis, ...]
    known: Recognition

    def __post_init__(self) -> None:
        if bool(self.analyses) != (self.known is Recognition.LEMMATIZABLE):
            raise ValueError(f"{self.token!r}: analyses present iff the token is lemmatizable")

    def to_dict(self) -> dict[str, Any]:
        return {
            "token": self.token,
            "known": self.known.value,
            "analyses": [analysis.to_dict() for analysis in self.analyses],
        }


def analyze_token(token: str, variety: Variety, lexicons: LexiconSet) -> TokenAnalysis:
    lexicon = lexicons[variety]
    return TokenAnalysis(token, tuple(lookup(lexicon, token)), is_known(lexicon, token))


def lemmatize(
    text: str,
    variety: Variety | None,
    lexicons: LexiconSet,
    config: TokenizerConfig | None = None,
) -> tuple[Variety, list[TokenAnalysis]]:
    """Analyze every token of the text against one variety's lexicon.

    Without a variety the most likely one is identified first. Original token casing is
    kept in the output; lookups are case-insensitive.
    """
    if not lexicons:
        raise LexiconNotFound("No lexicons loaded")
    if variety is not None and variety not in lexicons:
        raise UnknownVariety(f"No lexicon loaded for {variety}")

    if variety is None:
        variety = identify_variety(text, lexicons, config).winning_variety
        logger.info("Identified variety: %s", variety)

    tokens = tokenize(text, config, variety)
    if not tokens:
        raise EmptyInput("No tokens in input text")
    return variety, [analyze_token(token, variety, lexicons) for token in tokens]


def lemmatize_all_varieties(token: str, lexicons: LexiconSet) -> list[Analysis]:
    """Analyses from every loaded lexicon, in canonical variety order."""
    analyses = []
    for variety in sorted(lexicons, key=lambda item: item.rank):
        analyses.extend(lookup(lexicons[variety], token))
    return analyses
