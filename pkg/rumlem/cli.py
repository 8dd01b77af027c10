import argparse
import asyncio
import csv
import io
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from rumlem.config import NOTICE_LEVEL, configure_logging, load_config_file, settings
from rumlem.core.builder import build_lexicons, read_dictionary
from rumlem.core.classifier import (
    DEFAULT_THRESHOLD,
    ScoreMethod,
    ScoreMode,
    find_threshold,
    identify_language,
    identify_variety,
    load_stopwords,
)
from rumlem.core.errors import ConfigurationError, EmptyInput, LexiconNotFound, RumlemError
from rumlem.core.evaluation import (
    coverage_table,
    lid_distributions,
    load_samples,
    variety_accuracy_table,
)
from rumlem.core.fetcher import STDIN, fetch_text, fetch_texts
from rumlem.core.formatting import (
    OutputFormat,
    lid_csv,
    render_accuracy_table,
    render_analyses,
    render_build_report,
    render_coverage_table,
    render_decision,
    render_lemmatized,
    render_lid_summary,
    render_score_report,
    render_threshold,
)
from rumlem.core.lemmatizer import lemmatize, lemmatize_all_varieties
from rumlem.core.lexicon import Lexicon, load_lexicon_set
from rumlem.core.model import Variety, parse_varieties
from rumlem.core.skeletons import generate_skeletons, write_skeletons
from rumlem.core.tokenizer import TokenizerConfig, load_tokenizer_config, tokenize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CliConfig:
    lexicon_dir: Path
    varieties: list[Variety]
    mode: ScoreMode = ScoreMode.SET_OF_WORDS
    threshold: float = DEFAULT_THRESHOLD
    output_format: OutputFormat = OutputFormat.PRETTY
    protected_dir: Path | None = None
    stopwords_dir: Path | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(f"Threshold must lie in [0, 1], got {self.threshold}")

    def lexicons(self) -> dict[Variety, Lexicon]:
        return load_lexicon_set(self.lexicon_dir, self.varieties or None)

    def tokenizer(self) -> TokenizerConfig:
        return load_tokenizer_config(self.protected_dir)

    def stopwords(self) -> frozenset[str]:
        if self.mode is not ScoreMode.SET_OF_WORDS_NO_STOPWORDS:
            return frozenset()
        return load_stopwords(directory=self.stopwords_dir)


def _choice(enum_type: Any, value: Any, name: str) -> Any:
    try:
        return enum_type(str(value).strip().lower())
    except ValueError:
        allowed = ", ".join(member.value for member in enum_type)
        raise ConfigurationError(f"Invalid {name} {value!r}; choose one of {allowed}") from None


def resolve_config(args: argparse.Namespace, require_lexicons: bool = True) -> CliConfig:
    """Merge defaults and environment, then the config file, then command-line flags."""
    values: dict[str, Any] = settings.as_dict()
    if args.config:
        values.update(load_config_file(Path(args.config)))
    for key in values:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag

    varieties = values["varieties"]
    if isinstance(varieties, str):
        varieties = varieties.split(",")
    try:
        threshold = float(values["threshold"])
    except (TypeError, ValueError):
        raise ConfigurationError(f"Threshold is not a number: {values['threshold']!r}") from None

    config = CliConfig(
        lexicon_dir=Path(values["lexicon_dir"]),
        varieties=parse_varieties(varieties),
        mode=_choice(ScoreMode, values["mode"], "mode"),
        threshold=threshold,
        output_format=_choice(OutputFormat, values["output_format"], "output format"),
        protected_dir=Path(values["protected_dir"]) if values["protected_dir"] else None,
        stopwords_dir=Path(values["stopwords_dir"]) if values["stopwords_dir"] else None,
    )
    if require_lexicons and not config.lexicon_dir.is_dir():
        raise LexiconNotFound(f"Lexicon directory not found: {config.lexicon_dir}")
    return config


def _read_inputs(args: argparse.Namespace) -> list[str]:
    if args.text is not None:
        return [args.text]
    return asyncio.run(fetch_texts(args.input or [STDIN]))


def cmd_build(args: argparse.Namespace) -> int:
    config = resolve_config(args, require_lexicons=False)
    out_dir = Path(args.out) if args.out else config.lexicon_dir
    report = build_lexicons(
        Path(args.dict_dir),
        out_dir,
        inflections_dir=Path(args.inflections) if args.inflections else None,
        fallback_dir=Path(args.fallback) if args.fallback else None,
    )
    print(render_build_report(report, config.output_format))
    return 0


def cmd_lemmatize(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    lexicons = config.lexicons()
    tokenizer = config.tokenizer()
    variety = Variety.parse(args.variety) if args.variety else None

    outputs = []
    for text in _read_inputs(args):
        if args.all_varieties:
            tokens = list(dict.fromkeys(tokenize(text, tokenizer)))
            if not tokens:
                raise EmptyInput("No tokens in input text")
            for token in tokens:
                analyses = lemmatize_all_varieties(token, lexicons)
                outputs.append(render_analyses(token, analyses, config.output_format))
            continue
        resolved, analyses = lemmatize(text, variety, lexicons, tokenizer)
        logger.log(NOTICE_LEVEL, "Lemmatized %d tokens as %s", len(analyses), resolved)
        outputs.append(render_lemmatized(resolved, analyses, config.output_format))
    print("\n\n".join(outputs))
    return 0


def cmd_identify(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    lexicons = config.lexicons()
    tokenizer = config.tokenizer()
    for text in _read_inputs(args):
        report = identify_variety(text, lexicons, tokenizer)
        print(render_score_report(report, config.output_format))
    return 0


def cmd_lid(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    lexicons = config.lexicons()
    tokenizer = config.tokenizer()
    stopwords = config.stopwords()
    method = _choice(ScoreMethod, args.score, "score method")
    for text in _read_inputs(args):
        decision = identify_language(
            text, lexicons, config.mode, config.threshold, stopwords, tokenizer, method
        )
        print(render_decision(decision, config.output_format))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    lexicons = config.lexicons()
    tokenizer = config.tokenizer()
    samples = load_samples(asyncio.run(fetch_text(args.samples)), tokenizer)

    if args.task == "coverage":
        coverage = coverage_table(samples, lexicons, config=tokenizer)
        print(render_coverage_table(coverage, config.output_format))
    elif args.task == "variety":
        table = variety_accuracy_table(samples, lexicons, config=tokenizer)
        print(render_accuracy_table(table, config.output_format))
    else:
        distribution = lid_distributions(
            samples,
            lexicons,
            config.mode,
            stopwords=config.stopwords(),
            config=tokenizer,
            method=_choice(ScoreMethod, args.score, "score method"),
        )
        if args.histogram == STDIN:
            print(lid_csv(distribution), end="")
        elif args.histogram:
            Path(args.histogram).write_text(lid_csv(distribution), encoding="utf-8")
            logger.log(
                NOTICE_LEVEL,
                "Wrote %d histogram rows to %s",
                len(distribution.rows),
                args.histogram,
            )
        print(render_lid_summary(distribution, config.output_format))
    return 0


def read_scores(content: str, source: str) -> list[float]:
    """Scores from a CSV: the ``score`` column when there is a header, else the first column."""
    rows = [row for row in csv.reader(io.StringIO(content)) if row and row[0].strip()]
    column = 0
    if rows and "score" in rows[0]:
        column = rows[0].index("score")
        rows = rows[1:]
    scores = []
    for number, row in enumerate(rows, start=1):
        try:
            scores.append(float(row[column]))
        except (IndexError, ValueError):
            raise ConfigurationError(f"{source}: row {number} has no numeric score") from None
    return scores


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = resolve_config(args, require_lexicons=False)
    positive_text, negative_text = asyncio.run(fetch_texts([args.positive, args.negative]))
    result = find_threshold(
        read_scores(positive_text, args.positive), read_scores(negative_text, args.negative)
    )
    print(render_threshold(result, config.output_format))
    return 0


def cmd_skeletons(args: argparse.Namespace) -> int:
    resolve_config(args, require_lexicons=False)
    entries = [entry for path in args.dictionaries for entry in read_dictionary(Path(path))]
    cases = generate_skeletons(entries, args.min_count)
    paths = write_skeletons(cases, Path(args.out))
    logger.log(NOTICE_LEVEL, "Generated %d skeletons from %d entries", len(paths), len(entries))
    for path in paths:
        print(path)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML file with a [rumlem] table")
    parser.add_argument(
        "--lexicon-dir", dest="lexicon_dir", help="Compiled lexicons (env RUMLEM_LEXICON_DIR)"
    )
    parser.add_argument(
        "--varieties", help="Comma-separated varieties to load (env RUMLEM_VARIETIES; default all)"
    )
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=[fmt.value for fmt in OutputFormat],
        help="Output format (env RUMLEM_OUTPUT_FORMAT; default pretty)",
    )
    parser.add_argument("--protected-dir", dest="protected_dir", help="Protected-pattern files")
    parser.add_argument("--stopwords-dir", dest="stopwords_dir", help="Stopword files")
    parser.add_argument("--log-level", dest="log_level", help="Log level (env LOG_LEVEL)")


def _add_text_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("text", nargs="?", help="Text to analyze; omit to read --input or stdin")
    parser.add_argument(
        "--input",
        action="append",
        help="Path, URL or '-' for stdin; repeat for several inputs",
    )


def _add_lid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in ScoreMode],
        help="Token preprocessing before scoring (env RUMLEM_MODE; default set-of-words)",
    )
    parser.add_argument(
        "--score",
        choices=[method.value for method in ScoreMethod],
        default=ScoreMethod.WINNING.value,
        help="Compare the winning variety score or the average over varieties",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common)

    parser = argparse.ArgumentParser(
        prog="rumlem",
        description="Romansh lemmatizer, variety identifier and language identifier.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    build = subparsers.add_parser("build", parents=[common], help="Compile dictionaries")
    build.add_argument("dict_dir", help="Directory of <variety>.tsv dictionaries")
    build.add_argument("--inflections", help="Directory of <variety>.tsv verb inflections")
    build.add_argument("--fallback", help="Directory of <variety>.txt fallback word lists")
    build.add_argument("--out", help="Output directory (default: the lexicon directory)")
    build.set_defaults(handler=cmd_build)

    lemmatize_parser = subparsers.add_parser(
        "lemmatize", parents=[common], help="Analyze every token of a text"
    )
    _add_text_inputs(lemmatize_parser)
    lemmatize_parser.add_argument("--variety", help="Variety to use; identified when omitted")
    lemmatize_parser.add_argument(
        "--all-varieties",
        action="store_true",
        help="List analyses from every loaded variety for each distinct token",
    )
    lemmatize_parser.set_defaults(handler=cmd_lemmatize)

    identify = subparsers.add_parser("identify", parents=[common], help="Identify the variety")
    _add_text_inputs(identify)
    identify.set_defaults(handler=cmd_identify)

    lid = subparsers.add_parser("lid", parents=[common], help="Decide Romansh or not")
    _add_text_inputs(lid)
    _add_lid_options(lid)
    lid.add_argument(
        "--threshold", type=float, help="Decision threshold (env RUMLEM_THRESHOLD; default 0.6)"
    )
    lid.set_defaults(handler=cmd_lid)

    evaluate = subparsers.add_parser("eval", parents=[common], help="Evaluate on labeled samples")
    evaluate.add_argument("samples", help="JSON-lines samples: path, URL or '-'")
    evaluate.add_argument("--task", choices=["coverage", "variety", "lid"], required=True)
    _add_lid_options(evaluate)
    evaluate.add_argument("--histogram", help="Write LID score rows as CSV ('-' for stdout)")
    evaluate.set_defaults(handler=cmd_eval)

    calibrate = subparsers.add_parser(
        "calibrate", parents=[common], help="Find the best separating threshold"
    )
    calibrate.add_argument("positive", help="CSV of Romansh scores")
    calibrate.add_argument("negative", help="CSV of non-Romansh scores")
    calibrate.set_defaults(handler=cmd_calibrate)

    skeletons = subparsers.add_parser(
        "skeletons", parents=[common], help="Write test skeletons for frequent entry patterns"
    )
    skeletons.add_argument("dictionaries", nargs="+", help="<variety>.tsv dictionary files")
    skeletons.add_argument("--out", required=True, help="Output directory")
    skeletons.add_argument(
        "--min-count", type=int, default=10, help="Keep patterns seen more often than this"
    )
    skeletons.set_defaults(handler=cmd_skeletons)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level or settings.log_level)
        handler: Any = args.handler
        return int(handler(args))
    except RumlemError as e:
        logger.error("%s", e)
        return e.exit_code
    except Exception:
        logger.exception("Internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
