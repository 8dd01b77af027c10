"""Renderers for command output: JSON for machines, aligned tables for people, TSV for both."""

import csv
import io
import json
from collections.abc import Iterable, Sequence
from enum import StrEnum
from typing import Any

from rumlem.core.builder import BuildReport
from rumlem.core.classifier import LidDecision, ScoreReport, ThresholdResult
from rumlem.core.evaluation import ALL, AccuracyTable, CoverageTable, LidDistribution
from rumlem.core.lemmatizer import TokenAnalysis
from rumlem.core.model import Analysis, Variety

LID_CSV_FIELDS = (
    "id",
    "gold_label",
    "is_romansh",
    "score",
    "winning_score",
    "winning_variety",
    "token_count",
    "bucket",
)


class OutputFormat(StrEnum):
    JSON = "json"
    PRETTY = "pretty"
    TSV = "tsv"


def _json(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2)


def _ratio(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def _grid(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [cell.ljust(width) for cell, width in zip(row, widths, strict=True)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _tsv(rows: Iterable[Sequence[str]]) -> str:
    return "\n".join("\t".join(row) for row in rows)


def _analysis_row(analysis: Analysis) -> list[str]:
    return [
        analysis.variety.code,
        f"{analysis.lemma} [{analysis.features.serialize()}]",
        analysis.gloss,
    ]


def render_analyses(token: str, analyses: Sequence[Analysis], fmt: OutputFormat) -> str:
    """One form's analyses in the Variety | Form + features | Gloss layout."""
    if fmt is OutputFormat.JSON:
        return _json({"token": token, "analyses": [analysis.to_dict() for analysis in analyses]})
    if fmt is OutputFormat.TSV:
        return _tsv(
            [token, a.variety.value, a.lemma, a.features.serialize(), a.gloss] for a in analyses
        )
    if not analyses:
        return f"{token}: no analyses"
    header = ["Variety", "Form + features", "Gloss"]
    return f"{token}\n" + _grid([header, *(_analysis_row(analysis) for analysis in analyses)])


def render_lemmatized(
    variety: Variety, token_analyses: Sequence[TokenAnalysis], fmt: OutputFormat
) -> str:
    if fmt is OutputFormat.JSON:
        # One object per token, one per line.
        return "\n".join(
            json.dumps(item.to_dict(), ensure_ascii=False) for item in token_analyses
        )
    if fmt is OutputFormat.TSV:
        rows = []
        for item in token_analyses:
            if not item.analyses:
                rows.append([item.token, item.known.value, "", "", "", variety.value])
            for a in item.analyses:
                rows.append(
                    [
                        item.token,
                        item.known.value,
                        a.lemma,
                        a.features.serialize(),
                        a.gloss,
                        a.variety.value,
                    ]
                )
        return _tsv(rows)

    blocks = [f"Variety: {variety}"]
    for item in token_analyses:
        if item.analyses:
            blocks.append(render_analyses(item.token, item.analyses, fmt))
        else:
            blocks.append(f"{item.token}: {item.known}")
    return "\n\n".join(blocks)


def render_score_report(report: ScoreReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(report.to_dict())
    rows = [[variety.value, f"{score:.4f}"] for variety, score in report.scores.items()]
    if fmt is OutputFormat.TSV:
        return _tsv([["winner", report.winning_variety.value], *rows])
    return f"{report.winning_variety}\n" + _grid([["Variety", "Score"], *rows])


def render_decision(decision: LidDecision, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(decision.to_dict())
    verdict = "romansh" if decision.is_romansh else "not romansh"
    if fmt is OutputFormat.TSV:
        return _tsv(
            [[verdict, f"{decision.score:.4f}", f"{decision.threshold}", decision.method.value]]
        )
    return (
        f"{verdict} ({decision.method} score {decision.score:.2f}, "
        f"threshold {decision.threshold}, best variety {decision.report.winning_variety})"
    )


def render_threshold(result: ThresholdResult, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(result.to_dict())
    row = [f"{result.threshold:.4f}", str(result.misclassified), f"{result.margin:.4f}"]
    if fmt is OutputFormat.TSV:
        return _tsv([row])
    return _grid([["Threshold", "Misclassified", "Margin"], row])


def coverage_rows(table: CoverageTable) -> list[list[str]]:
    """Variety rows plus the pooled "All" row; empty cells stay empty."""
    rows = [["Variety", *(bucket.label for bucket in table.buckets), ALL]]
    for variety, report in table.reports.items():
        cells = [_ratio(report.cell(bucket)) for bucket in table.buckets]
        rows.append([variety.value, *cells, _ratio(report.ratio)])
    totals = [_ratio(table.column_total(bucket)) for bucket in table.buckets]
    rows.append([ALL, *totals, _ratio(table.overall)])
    return rows


def accuracy_rows(table: AccuracyTable) -> list[list[str]]:
    rows = [["Variety", *(bucket.label for bucket in table.buckets), ALL]]
    for variety in table.varieties:
        cells = [_ratio(table.cell(variety, bucket)) for bucket in table.buckets]
        rows.append([variety.value, *cells, _ratio(table.row_total(variety))])
    totals = [_ratio(table.column_total(bucket)) for bucket in table.buckets]
    rows.append([ALL, *totals, _ratio(table.overall)])
    return rows


def _table_json(rows: list[list[str]], skipped: int) -> str:
    header, *body = rows
    return _json(
        {
            "columns": header[1:],
            "rows": {row[0]: dict(zip(header[1:], row[1:], strict=True)) for row in body},
            "skipped": skipped,
        }
    )


def render_coverage_table(table: CoverageTable, fmt: OutputFormat) -> str:
    rows = coverage_rows(table)
    if fmt is OutputFormat.JSON:
        return _table_json(rows, table.skipped)
    return _tsv(rows) if fmt is OutputFormat.TSV else _grid(rows)


def render_accuracy_table(table: AccuracyTable, fmt: OutputFormat) -> str:
    rows = accuracy_rows(table)
    if fmt is OutputFormat.JSON:
        return _table_json(rows, table.skipped)
    return _tsv(rows) if fmt is OutputFormat.TSV else _grid(rows)


def lid_csv(distribution: LidDistribution) -> str:
    """Histogram rows for external plotting."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=LID_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in distribution.rows:
        writer.writerow(row.to_dict())
    return buffer.getvalue()


def render_lid_summary(distribution: LidDistribution, fmt: OutputFormat) -> str:
    thresholds = {
        name: result.to_dict() if result else None
        for name, result in distribution.thresholds.items()
    }
    if fmt is OutputFormat.JSON:
        return _json(
            {
                "rows": len(distribution.rows),
                "skipped": distribution.skipped,
                "thresholds": thresholds,
            }
        )
    rows = [["Bucket", "Threshold", "Misclassified", "Margin"]]
    for name, result in distribution.thresholds.items():
        if result is None:
            rows.append([name, "insufficient classes", "", ""])
        else:
            rows.append(
                [name, f"{result.threshold:.4f}", str(result.misclassified), f"{result.margin:.4f}"]
            )
    return _tsv(rows) if fmt is OutputFormat.TSV else _grid(rows)


def render_build_report(report: BuildReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(report.to_dict())
    header = ["Variety", "Parsed", "Rejected", "Vocab", "Mapped Forms", "Lemmas"]
    rows = [[*header, "N", "ADJ", "V", "Other"]]
    for variety, variety_report in report.varieties.items():
        stats = variety_report.stats.to_dict()
        rows.append(
            [
                variety.value,
                str(variety_report.parse.entries_parsed),
                str(variety_report.parse.entries_rejected),
                str(stats["vocab"]),
                str(stats["mapped_forms"]),
                str(stats["lemmas"]),
                str(stats["n"]),
                str(stats["adj"]),
                str(stats["v"]),
                str(stats["other"]),
            ]
        )
    return _tsv(rows) if fmt is OutputFormat.TSV else _grid(rows)
