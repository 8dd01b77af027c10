"""Evaluation over labeled samples: coverage, variety accuracy and LID score distributions.

Samples arrive as JSON lines with the fields ``id``, ``text``, and optionally ``variety`` and
``language``. Token counts are taken after punctuation removal, and every table is split
into length buckets by that count.
"""

import json
import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

from rumlem.core.classifier import (
    ScoreMethod,
    ScoreMode,
    ThresholdResult,
    find_threshold,
    identify_language,
    identify_variety,
)
from rumlem.core.errors import ConfigurationError, CorruptFile, EmptyInput
from rumlem.core.lexicon import Lexicon, LexiconSet, is_known
from rumlem.core.model import Recognition, Variety
from rumlem.core.tokenizer import TokenizerConfig, count_tokens, strip_punctuation, tokenize

logger = logging.getLogger(__name__)

POSITIVE_LANGUAGE_LABELS = frozenset({"rm", "roh", "romansh"})
ALL = "All"


@dataclass(frozen=True)
class LengthBucket:
    lower: int
    upper: int | None = None

    def __post_init__(self) -> None:
        if self.lower < 0 or (self.upper is not None and self.upper <= self.lower):
            raise ValueError(f"Invalid bucket bounds [{self.lower}, {self.upper})")

    def contains(self, token_count: int) -> bool:
        return self.lower <= token_count and (self.upper is None or token_count < self.upper)

    @property
    def label(self) -> str:
        return f"{self.lower}+" if self.upper is None else f"{self.lower}-{self.upper}"

    def __str__(self) -> str:
        return self.label


VARIETY_BUCKETS = (
    LengthBucket(2, 10),
    LengthBucket(10, 50),
    LengthBucket(50, 300),
    LengthBucket(300, 800),
    LengthBucket(800),
)
LID_BUCKETS = (
    LengthBucket(50, 300),
    LengthBucket(300, 800),
    LengthBucket(800, 2000),
)


def assign_bucket(token_count: int, buckets: Sequence[LengthBucket]) -> LengthBucket | None:
    return next((bucket for bucket in buckets if bucket.contains(token_count)), None)


@dataclass(frozen=True)
class LabeledSample:
    id: str
    text: str
    gold_variety: Variety | None = None
    gold_language: str | None = None
    token_count: int = 0

    @property
    def is_romansh(self) -> bool | None:
        if self.gold_language is None:
            return None
        return self.gold_language.strip().lower() in POSITIVE_LANGUAGE_LABELS

    @classmethod
    def from_dict(
        cls, data: dict[str, Any], config: TokenizerConfig | None = None, line: int = 0
    ) -> "LabeledSample":
        text = data.get("text")
        if not isinstance(text, str):
            raise CorruptFile(f"Sample on line {line} has no text")
        variety = data.get("variety")
        language = data.get("language")
        return cls(
            id=str(data.get("id", line)),
            text=text,
            gold_variety=Variety.parse(variety) if variety else None,
            gold_language=str(language) if language else None,
            token_count=count_tokens(text, config),
        )


def load_samples(content: str, config: TokenizerConfig | None = None) -> list[LabeledSample]:
    samples = []
    for number, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorruptFile(f"Invalid JSON on sample line {number}: {e}") from None
        if not isinstance(data, dict):
            raise CorruptFile(f"Sample line {number} is not a JSON object")
        samples.append(LabeledSample.from_dict(data, config, number))
    logger.info("Loaded %d samples", len(samples))
    return samples


def coverage(
    sample: LabeledSample, lexicon: Lexicon, config: TokenizerConfig | None = None
) -> tuple[int, int]:
    """(lemmatizable, total) tokens; fallback-only words do not count as covered."""
    tokens = strip_punctuation(tokenize(sample.text, config, lexicon.variety))
    if not tokens:
        raise EmptyInput(f"Sample {sample.id} has no tokens")
    lemmatizable = sum(
        1 for token in tokens if is_known(lexicon, token) is Recognition.LEMMATIZABLE
    )
    return lemmatizable, len(tokens)


@dataclass
class CoverageCell:
    lemmatizable_tokens: int = 0
    total_tokens: int = 0
    ratios: list[float] = field(default_factory=list)

    def add(self, lemmatizable: int, total: int) -> None:
        self.lemmatizable_tokens += lemmatizable
        self.total_tokens += total
        self.ratios.append(lemmatizable / total)

    @property
    def sample_count(self) -> int:
        return len(self.ratios)

    @property
    def mean_ratio(self) -> float | None:
        return sum(self.ratios) / len(self.ratios) if self.ratios else None

    @property
    def pooled_ratio(self) -> float | None:
        return self.lemmatizable_tokens / self.total_tokens if self.total_tokens else None


@dataclass
class CoverageReport:
    variety: Variety
    buckets: dict[LengthBucket, CoverageCell] = field(default_factory=dict)
    overall: CoverageCell = field(default_factory=CoverageCell)

    @property
    def ratio(self) -> float | None:
        return self.overall.pooled_ratio

    def cell(self, bucket: LengthBucket) -> float | None:
        """Mean of per-sample ratios in the bucket; None when it holds no sample."""
        found = self.buckets.get(bucket)
        return found.mean_ratio if found else None


@dataclass
class CoverageTable:
    buckets: tuple[LengthBucket, ...]
    reports: dict[Variety, CoverageReport] = field(default_factory=dict)
    skipped: int = 0

    def column_total(self, bucket: LengthBucket) -> float | None:
        cells = [
            report.buckets[bucket] for report in self.reports.values() if bucket in report.buckets
        ]
        lemmatizable = sum(cell.lemmatizable_tokens for cell in cells)
        total = sum(cell.total_tokens for cell in cells)
        return lemmatizable / total if total else None

    @property
    def overall(self) -> float | None:
        lemmatizable = sum(report.overall.lemmatizable_tokens for report in self.reports.values())
        total = sum(report.overall.total_tokens for report in self.reports.values())
        return lemmatizable / total if total else None


def _require_variety(sample: LabeledSample) -> Variety:
    if sample.gold_variety is None:
        raise ConfigurationError(f"Sample {sample.id} has no gold variety")
    return sample.gold_variety


def coverage_table(
    samples: Iterable[LabeledSample],
    lexicons: LexiconSet,
    buckets: Sequence[LengthBucket] = VARIETY_BUCKETS,
    config: TokenizerConfig | None = None,
) -> CoverageTable:
    table = CoverageTable(tuple(buckets))
    for sample in samples:
        variety = _require_variety(sample)
        bucket = assign_bucket(sample.token_count, buckets)
        if bucket is None or variety not in lexicons:
            logger.debug("Skipping sample %s (bucket %s, variety %s)", sample.id, bucket, variety)
            table.skipped += 1
            continue
        try:
            lemmatizable, total = coverage(sample, lexicons[variety], config)
        except EmptyInput:
            table.skipped += 1
            continue
        report = table.reports.setdefault(variety, CoverageReport(variety))
        report.buckets.setdefault(bucket, CoverageCell()).add(lemmatizable, total)
        report.overall.add(lemmatizable, total)

    table.reports = dict(sorted(table.reports.items(), key=lambda item: item[0].rank))
    return table


@dataclass
class AccuracyTable:
    buckets: tuple[LengthBucket, ...]
    correct: Counter[tuple[Variety, LengthBucket]] = field(default_factory=Counter)
    total: Counter[tuple[Variety, LengthBucket]] = field(default_factory=Counter)
    skipped: int = 0

    @property
    def varieties(self) -> list[Variety]:
        return sorted({variety for variety, _ in self.total}, key=lambda variety: variety.rank)

    def _ratio(self, keys: Iterable[tuple[Variety, LengthBucket]]) -> float | None:
        keys = list(keys)
        total = sum(self.total[key] for key in keys)
        return sum(self.correct[key] for key in keys) / total if total else None

    def cell(self, variety: Variety, bucket: LengthBucket) -> float | None:
        return self._ratio([(variety, bucket)])

    def row_total(self, variety: Variety) -> float | None:
        return self._ratio((variety, bucket) for bucket in self.buckets)

    def column_total(self, bucket: LengthBucket) -> float | None:
        return self._ratio((variety, bucket) for variety in self.varieties)

    @property
    def overall(self) -> float | None:
        return self._ratio(self.total)


def variety_accuracy_table(
    samples: Iterable[LabeledSample],
    lexicons: LexiconSet,
    buckets: Sequence[LengthBucket] = VARIETY_BUCKETS,
    config: TokenizerConfig | None = None,
) -> AccuracyTable:
    table = AccuracyTable(tuple(buckets))
    for sample in samples:
        variety = _require_variety(sample)
        bucket = assign_bucket(sample.token_count, buckets)
        if bucket is None:
            table.skipped += 1
            continue
        try:
            predicted = identify_variety(sample.text, lexicons, config).winning_variety
        except EmptyInput:
            table.skipped += 1
            continue
        table.total[variety, bucket] += 1
        if predicted is variety:
            table.correct[variety, bucket] += 1
    logger.info("Variety accuracy: overall %s, skipped %d", table.overall, table.skipped)
    return table


@dataclass(frozen=True)
class LidRow:
    sample_id: str
    gold_label: str
    is_romansh: bool
    score: float
    winning_score: float
    winning_variety: Variety
    token_count: int
    bucket: LengthBucket | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.sample_id,
            "gold_label": self.gold_label,
            "is_romansh": self.is_romansh,
            "score": self.score,
            "winning_score": self.winning_score,
            "winning_variety": self.winning_variety.value,
            "token_count": self.token_count,
            "bucket": self.bucket.label if self.bucket else "",
        }


@dataclass
class LidDistribution:
    rows: list[LidRow] = field(default_factory=list)
    # Keyed by bucket label plus "All"; None marks a group lacking one of the two classes.
    thresholds: dict[str, ThresholdResult | None] = field(default_factory=dict)
    skipped: int = 0


def _calibrate(name: str, rows: Sequence[LidRow]) -> ThresholdResult | None:
    positive = [row.score for row in rows if row.is_romansh]
    negative = [row.score for row in rows if not row.is_romansh]
    try:
        return find_threshold(positive, negative)
    except EmptyInput:
        logger.warning("Bucket %s: insufficient classes for threshold calibration", name)
        return None


def lid_distributions(
    samples: Iterable[LabeledSample],
    lexicons: LexiconSet,
    mode: ScoreMode = ScoreMode.SET_OF_WORDS,
    buckets: Sequence[LengthBucket] = LID_BUCKETS,
    stopwords: Iterable[str] = (),
    config: TokenizerConfig | None = None,
    method: ScoreMethod = ScoreMethod.WINNING,
) -> LidDistribution:
    stopwords = frozenset(stopwords)
    result = LidDistribution()
    for sample in samples:
        if sample.gold_language is None or sample.is_romansh is None:
            raise ConfigurationError(f"Sample {sample.id} has no gold language")
        try:
            decision = identify_language(
                sample.text, lexicons, mode, stopwords=stopwords, config=config, method=method
            )
        except EmptyInput:
            result.skipped += 1
            continue
        result.rows.append(
            LidRow(
                sample_id=sample.id,
                gold_label=sample.gold_language,
                is_romansh=sample.is_romansh,
                score=decision.score,
                winning_score=decision.report.winning_score,
                winning_variety=decision.report.winning_variety,
                token_count=sample.token_count,
                bucket=assign_bucket(sample.token_count, buckets),
            )
        )

    for bucket in buckets:
        in_bucket = [row for row in result.rows if row.bucket == bucket]
        if in_bucket:
            result.thresholds[bucket.label] = _calibrate(bucket.label, in_bucket)
    result.thresholds[ALL] = _calibrate(ALL, result.rows)
    return result
