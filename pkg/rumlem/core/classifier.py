import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np

from rumlem.core.errors import ConfigurationError, EmptyInput, LexiconNotFound
from rumlem.core.lexicon import Lexicon, LexiconSet, is_known
from rumlem.core.model import Recognition, Variety, lookup_key, normalize
from rumlem.core.tokenizer import TokenizerConfig, strip_punctuation, tokenize
from rumlem.core.wordlists import data_dir, read_word_list

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.6
STOPWORD_LANGUAGES = ("fr", "it", "ca", "ro")


class ScoreMode(StrEnum):
    AS_IS = "as-is"
    SET_OF_WORDS = "set-of-words"
    SET_OF_WORDS_NO_STOPWORDS = "set-of-words-no-stopwords"


class ScoreMethod(StrEnum):
    """Which number a LID decision compares with the threshold."""

    WINNING = "winning"
    AVERAGE = "average"


@dataclass(frozen=True)
class ScoreReport:
    scores: dict[Variety, float]
    winning_variety: Variety
    winning_score: float
    token_count: int
    mode: ScoreMode = ScoreMode.AS_IS

    @classmethod
    def from_scores(
        cls, scores: dict[Variety, float], token_count: int, mode: ScoreMode
    ) -> "ScoreReport":
        if not scores:
            raise LexiconNotFound("No lexicons loaded to score against")
        ordered = dict(sorted(scores.items(), key=lambda item: item[0].rank))
        winner = next(iter(ordered))
        for variety, score in ordered.items():
            # Strict comparison keeps the canonically first variety on ties.
            if score > ordered[winner]:
                winner = variety
        return cls(ordered, winner, ordered[winner], token_count, mode)

    @property
    def average_score(self) -> float:
        return sum(self.scores.values()) / len(self.scores)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scores": {variety.value: score for variety, score in self.scores.items()},
            "winning_variety": self.winning_variety.value,
            "winning_score": self.winning_score,
            "token_count": self.token_count,
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class LidDecision:
    report: ScoreReport
    threshold: float
    is_romansh: bool
    method: ScoreMethod = ScoreMethod.WINNING

    @property
    def score(self) -> float:
        if self.method is ScoreMethod.AVERAGE:
            return self.report.average_score
        return self.report.winning_score

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.report.to_dict(),
            "method": self.method.value,
            "score": self.score,
            "threshold": self.threshold,
            "is_romansh": self.is_romansh,
        }


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    misclassified: int
    margin: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.threshold,
            "misclassified": self.misclassified,
            "margin": self.margin,
        }


def score_variety(tokens: Sequence[str], lexicon: Lexicon) -> float:
    """Share of tokens the lexicon lemmatizes or lists in its fallback vocabulary."""
    if not tokens:
        raise EmptyInput("Cannot score an empty token list")
    known = sum(1 for token in tokens if is_known(lexicon, token) is not Recognition.UNKNOWN)
    return known / len(tokens)


def score_tokens(
    tokens: Sequence[str], lexicons: LexiconSet, mode: ScoreMode = ScoreMode.AS_IS
) -> ScoreReport:
    if not lexicons:
        raise LexiconNotFound("No lexicons loaded to score against")
    scores = {variety: score_variety(tokens, lexicon) for variety, lexicon in lexicons.items()}
    return ScoreReport.from_scores(scores, len(tokens), mode)


def identify_variety(
    text: str, lexicons: LexiconSet, config: TokenizerConfig | None = None
) -> ScoreReport:
    tokens = strip_punctuation(tokenize(text, config))
    if not tokens:
        raise EmptyInput("No tokens left after removing punctuation")
    report = score_tokens(tokens, lexicons)
    logger.debug("Variety scores: %s", report.to_dict())
    return report


def preprocess_for_lid(
    tokens: Sequence[str], mode: ScoreMode, stopwords: Iterable[str] = ()
) -> list[str]:
    if mode is ScoreMode.AS_IS:
        return list(tokens)

    first_seen: dict[str, str] = {}
    for token in tokens:
        first_seen.setdefault(lookup_key(token), token)
    unique = list(first_seen.values())
    if mode is ScoreMode.SET_OF_WORDS:
        return unique

    folded = {normalize(word).casefold() for word in stopwords}
    return [token for token in unique if token.casefold() not in folded]


def _lid_report(
    text: str,
    lexicons: LexiconSet,
    mode: ScoreMode,
    stopwords: Iterable[str],
    config: TokenizerConfig | None,
) -> ScoreReport:
    tokens = strip_punctuation(tokenize(text, config))
    tokens = preprocess_for_lid(tokens, mode, stopwords)
    if not tokens:
        raise EmptyInput("No tokens left to score")
    return score_tokens(tokens, lexicons, mode)


def identify_language(
    text: str,
    lexicons: LexiconSet,
    mode: ScoreMode = ScoreMode.SET_OF_WORDS,
    threshold: float = DEFAULT_THRESHOLD,
    stopwords: Iterable[str] = (),
    config: TokenizerConfig | None = None,
    method: ScoreMethod = ScoreMethod.WINNING,
) -> LidDecision:
    """Romansh or not: the winning variety score (or the average) against the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ConfigurationError(f"Threshold must lie in [0, 1], got {threshold}")
    report = _lid_report(text, lexicons, mode, stopwords, config)
    score = report.average_score if method is ScoreMethod.AVERAGE else report.winning_score
    return LidDecision(report, threshold, score >= threshold, method)


def average_score(
    text: str,
    lexicons: LexiconSet,
    mode: ScoreMode = ScoreMode.SET_OF_WORDS,
    stopwords: Iterable[str] = (),
    config: TokenizerConfig | None = None,
) -> float:
    return _lid_report(text, lexicons, mode, stopwords, config).average_score


def find_threshold(
    positive_scores: Sequence[float], negative_scores: Sequence[float]
) -> ThresholdResult:
    """Pick the threshold that separates the two score lists best.

    Candidates are 0, 1 and the midpoints between adjacent distinct scores. Fewest
    misclassifications wins (a positive below the threshold, or a negative at or above
    it), then the widest margin to the nearest score, then the lowest threshold.
    """
    if len(positive_scores) == 0:
        raise EmptyInput("No positive scores to calibrate on")
    if len(negative_scores) == 0:
        raise EmptyInput("No negative scores to calibrate on")

    positive = np.asarray(positive_scores, dtype=np.float64)
    negative = np.asarray(negative_scores, dtype=np.float64)
    pooled = np.concatenate([positive, negative])
    if pooled.min() < 0.0 or pooled.max() > 1.0:
        raise ValueError("Scores must lie in [0, 1]")

    distinct = np.unique(pooled)
    midpoints = (distinct[:-1] + distinct[1:]) / 2
    candidates = np.unique(np.concatenate([[0.0, 1.0], midpoints]))[:, np.newaxis]

    misclassified = (positive < candidates).sum(axis=1) + (negative >= candidates).sum(axis=1)
    margins = np.abs(pooled - candidates).min(axis=1)

    fewest = misclassified == misclassified.min()
    widest = margins == margins[fewest].max()
    best = int(np.flatnonzero(fewest & widest)[0])
    return ThresholdResult(
        threshold=float(candidates[best, 0]),
        misclassified=int(misclassified[best]),
        margin=float(margins[best]),
    )


def load_stopwords(
    languages: Iterable[str] = STOPWORD_LANGUAGES, directory: str | Path | None = None
) -> frozenset[str]:
    """Union of the ``<language>.txt`` stopword lists, case-folded."""
    base = data_dir("stopwords", directory)
    words: set[str] = set()
    for language in languages:
        words.update(
            normalize(word).casefold() for word in read_word_list(base.joinpath(f"{language}.txt"))
        )
    logger.debug("Loaded %d stopwords for %s", len(words), ",".join(languages))
    return frozenset(words)
