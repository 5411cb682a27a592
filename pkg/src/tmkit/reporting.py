"""Markdown and CSV report emission.

The markdown report mirrors the evaluation tables: a raw-vs-refined metric
table (category, metric, raw, refined, signed difference), similarity
aggregate tables (component, metric, mean, SD, n), and a refinement-effort
table. The CSV twin is one long-format table: section, group, metric,
column, value. Formatting is fixed at four decimal places so identical
inputs emit byte-identical files.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

from .pipeline import JudgeScores, RefinementSession
from .similarity import COMPONENT_KINDS, METRIC_NAMES, CorpusAggregate
from .static_metrics import StaticReport

RAW = "raw"
REFINED = "refined"

STATIC_ROWS: tuple[tuple[str, str, str], ...] = (
    ("Instructional", "Alignment Score", "alignmentScore"),
    ("Structural", "T-M Binding", "tmBinding"),
    ("Structural", "M-K Binding", "mkBinding"),
    ("Structural", "T-K Binding", "tkBinding"),
    ("Procedural", "Guard Logic", "guardLogic"),
    ("Procedural", "Failure Modeling", "failureModeling"),
    ("Procedural", "Hierarchy Depth", "hierarchyDepth"),
)

JUDGE_ROWS: tuple[tuple[str, str, str], ...] = (
    ("Semantic", "Causal Chaining", "causalChaining"),
    ("Semantic", "Teleological Linkage", "teleologicalLinkage"),
    ("Semantic", "Procedural Fidelity", "proceduralFidelity"),
)


@dataclass(frozen=True)
class ReportOutput:
    markdown: str
    csv: str


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def _fmt_diff(raw: float | None, refined: float | None) -> str:
    if raw is None or refined is None:
        return "n/a"
    return f"{refined - raw:+.4f}"


def _metric_table(
    static_reports: Mapping[str, StaticReport] | None,
    judge_scores: Mapping[str, JudgeScores] | None,
) -> list[tuple[str, str, float | None, float | None]]:
    rows: list[tuple[str, str, float | None, float | None]] = []
    if static_reports:
        raw_values = (
            static_reports[RAW].metric_values() if RAW in static_reports else {}
        )
        refined_values = (
            static_reports[REFINED].metric_values() if REFINED in static_reports else {}
        )
        for category, metric, key in STATIC_ROWS:
            rows.append((category, metric, raw_values.get(key), refined_values.get(key)))
    if judge_scores:
        raw_judge = judge_scores.get(RAW)
        refined_judge = judge_scores.get(REFINED)
        for category, metric, key in JUDGE_ROWS:
            rows.append(
                (
                    category,
                    metric,
                    getattr(raw_judge, key) if raw_judge else None,
                    getattr(refined_judge, key) if refined_judge else None,
                )
            )
    return rows


def emit_report(
    static_reports: Mapping[str, StaticReport] | None = None,
    similarity_aggregate: CorpusAggregate | None = None,
    judge_scores: Mapping[str, JudgeScores] | None = None,
    sessions: Sequence[RefinementSession] | None = None,
    title: str = "Model Report",
) -> ReportOutput:
    """Renders whichever inputs are supplied; at least one is required."""
    if not (static_reports or similarity_aggregate or judge_scores or sessions):
        raise ValueError("emit_report needs at least one populated input")

    lines: list[str] = [f"# {title}", ""]
    csv_buffer = io.StringIO()
    writer = csv.writer(csv_buffer, lineterminator="\n")
    writer.writerow(["section", "group", "metric", "column", "value"])

    metric_rows = _metric_table(static_reports, judge_scores)
    if metric_rows:
        lines.append("## Raw vs Refined Metrics")
        lines.append("")
        lines.append("| Category | Metric | Raw | Refined | Abs. Diff |")
        lines.append("| --- | --- | --- | --- | --- |")
        for category, metric, raw_value, refined_value in metric_rows:
            lines.append(
                f"| {category} | {metric} | {_fmt(raw_value)} | {_fmt(refined_value)} "
                f"| {_fmt_diff(raw_value, refined_value)} |"
            )
            writer.writerow(["metrics", category, metric, "raw", _fmt(raw_value)])
            writer.writerow(["metrics", category, metric, "refined", _fmt(refined_value)])
            writer.writerow(
                ["metrics", category, metric, "diff", _fmt_diff(raw_value, refined_value)]
            )
        lines.append("")

    if similarity_aggregate is not None:
        lines.append("## Similarity Aggregates")
        lines.append("")
        lines.append("| Component | Metric | Mean | SD | n |")
        lines.append("| --- | --- | --- | --- | --- |")
        for component in COMPONENT_KINDS:
            for metric in METRIC_NAMES:
                cell = similarity_aggregate.cell(component, metric)
                lines.append(
                    f"| {component} | {metric} | {cell.mean:.4f} | {cell.sd:.4f} | {cell.n} |"
                )
                writer.writerow(["similarity", component, metric, "mean", f"{cell.mean:.4f}"])
                writer.writerow(["similarity", component, metric, "sd", f"{cell.sd:.4f}"])
                writer.writerow(["similarity", component, metric, "n", str(cell.n)])
        lines.append("")

    if sessions:
        lines.append("## Refinement Effort")
        lines.append("")
        lines.append("| Skill | Manual Hours | Refinement Hours | Reduction |")
        lines.append("| --- | --- | --- | --- |")
        for session in sessions:
            hours = session.refinement_hours
            reduction = session.reduction
            lines.append(
                f"| {session.skillName} | {_fmt(session.manualBaselineHours)} "
                f"| {_fmt(hours)} | {_fmt(reduction)} |"
            )
            writer.writerow(
                ["effort", session.skillName, "manualHours", "value",
                 _fmt(session.manualBaselineHours)]
            )
            writer.writerow(["effort", session.skillName, "refinementHours", "value", _fmt(hours)])
            writer.writerow(["effort", session.skillName, "reduction", "value", _fmt(reduction)])
        lines.append("")

    return ReportOutput(markdown="\n".join(lines), csv=csv_buffer.getvalue())
