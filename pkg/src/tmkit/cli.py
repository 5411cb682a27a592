"""Command-line entry point: a thin client over the toolkit.

Payloads go to stdout as JSON (or CSV where the format is tabular);
diagnostics go to stderr. Exit codes: 0 success, 1 domain failure
(validation errors, generation failure, ...), 2 usage errors.
"""

from __future__ import annotations

import csv as csv_module
import json
import sys
from pathlib import Path

import click

from . import __version__
from .bundle import load_bundle, write_bundle
from .conditions import PredicateEnv
from .config import resolve_config
from .diffing import diff_models
from .errors import TmkError
from .fsm import trace as run_trace
from .pipeline import (
    DigestJudgeClient,
    FixtureGenerationClient,
    HttpGenerationClient,
    HttpJudgeClient,
    JudgeScores,
    RefinementSession,
    generate_raw_model,
    judge_model,
)
from .reporting import emit_report
from .similarity import CorpusAggregate, aggregate, compare_models
from .static_metrics import StaticReport, Transcript, analyze
from .validation import validate_schema

CONFIG_HELP = (
    "Configuration precedence: flags > environment variables (prefix TMK_) > "
    "config file `tmk.toml-style key=value` > defaults. Recognized environment "
    "variables: TMK_CLIENT_ENDPOINT, TMK_CLIENT_KEY, TMK_OUTPUT_DIR, "
    "TMK_ALIGNMENT_THRESHOLD, TMK_MAX_REPAIRS, TMK_STRICT_EVAL."
)


class Context:
    def __init__(self, json_errors: bool, config_file: str | None):
        self.json_errors = json_errors
        self.config_file = config_file

    def config(self, **flags):
        try:
            return resolve_config(flags=flags, config_file=self.config_file)
        except ValueError as exc:
            raise click.UsageError(str(exc))


def emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


def fail(ctx_obj: Context, error: TmkError | str, code: str = "ERROR") -> None:
    if isinstance(error, TmkError):
        body = error.to_dict()
    else:
        body = {"code": code, "message": str(error)}
    if ctx_obj.json_errors:
        click.echo(json.dumps(body), err=True)
    else:
        click.echo(f"error: {body['message']}", err=True)
    sys.exit(1)


@click.group(epilog=CONFIG_HELP)
@click.version_option(__version__)
@click.option("--json", "json_errors", is_flag=True,
              help="Machine-readable mode: errors as JSON on stderr, JSON payloads "
                   "for commands whose default output is tabular.")
@click.option("--config", "config_file", type=click.Path(), default=None,
              help="Config file (key=value lines); defaults to ./tmk.toml.")
@click.pass_context
def main(ctx: click.Context, json_errors: bool, config_file: str | None) -> None:
    """Work with Task-Method-Knowledge (TMK) skill model bundles."""
    ctx.obj = Context(json_errors=json_errors, config_file=config_file)


def _load(ctx_obj: Context, directory: str):
    try:
        return load_bundle(directory)
    except TmkError as exc:
        fail(ctx_obj, exc)


@main.command()
@click.argument("model_dir", type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def validate(ctx_obj: Context, model_dir: str) -> None:
    """Validate a model bundle; exit 1 when error-severity violations exist."""
    model = _load(ctx_obj, model_dir)
    report = validate_schema(model)
    emit(report.to_dict())
    errors = sum(v.severity == "error" for v in report.violations)
    click.echo(
        f"{len(report.violations)} violations ({errors} errors)", err=True
    )
    if not report.valid:
        sys.exit(1)


@main.command("analyze")
@click.argument("model_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--threshold", type=float, default=None,
              help="Alignment similarity threshold (default 0.8).")
@click.pass_obj
def analyze_cmd(ctx_obj: Context, model_dir: str, transcript: str | None,
                threshold: float | None) -> None:
    """Compute the structural metric report (JSON on stdout)."""
    config = ctx_obj.config(alignment_threshold=threshold)
    model = _load(ctx_obj, model_dir)
    transcript_obj = Transcript.from_file(transcript) if transcript else None
    report = analyze(model, transcript_obj,
                     alignment_threshold=config.alignment_threshold)
    emit(report.to_dict())


@main.command()
@click.argument("model_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--method", "method_name", required=True)
@click.option("--env", "env_file", type=click.Path(exists=True, dir_okay=False),
              required=True, help='JSON env: {"p(x)": true, ...} or '
                                  '{"strict": true, "predicates": {...}}.')
@click.option("--strict/--no-strict", "strict_flag", default=None,
              help="Unknown predicates are errors (overrides env file).")
@click.option("--step-limit", type=int, default=256, show_default=True)
@click.pass_obj
def trace(ctx_obj: Context, model_dir: str, method_name: str, env_file: str,
          strict_flag: bool | None, step_limit: int) -> None:
    """Execute one method's organizer and print the trace."""
    model = _load(ctx_obj, model_dir)
    doc = json.loads(Path(env_file).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "predicates" in doc:
        mapping = doc["predicates"]
        strict = bool(doc.get("strict", False))
    else:
        mapping = doc
        strict = False
    if strict_flag is not None:
        strict = strict_flag
    try:
        env = PredicateEnv.from_strings(mapping, strict=strict)
        result = run_trace(model, method_name, env, step_limit=step_limit)
    except TmkError as exc:
        fail(ctx_obj, exc)
    emit(result.to_dict())


@main.command()
@click.argument("dir_a", type=click.Path(exists=True, file_okay=False))
@click.argument("dir_b", type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def compare(ctx_obj: Context, dir_a: str, dir_b: str) -> None:
    """Similarity report for two model bundles."""
    model_a = _load(ctx_obj, dir_a)
    model_b = _load(ctx_obj, dir_b)
    emit(compare_models(model_a, model_b).to_dict())


@main.command("aggregate")
@click.argument("pairs_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Write the aggregate CSV here instead of stdout.")
@click.pass_obj
def aggregate_cmd(ctx_obj: Context, pairs_csv: str, output: str | None) -> None:
    """Aggregate similarity over bundle pairs listed in a CSV (dirA,dirB)."""
    reports = []
    with open(pairs_csv, newline="", encoding="utf-8") as handle:
        for row in csv_module.reader(handle):
            if not row or row[0].strip().startswith("#") or row[0].strip() == "dirA":
                continue
            if len(row) < 2:
                raise click.UsageError(f"pairs CSV rows need two columns, got {row!r}")
            model_a = _load(ctx_obj, row[0].strip())
            model_b = _load(ctx_obj, row[1].strip())
            reports.append(compare_models(model_a, model_b))
    if not reports:
        fail(ctx_obj, "pairs CSV contained no comparable rows", code="EMPTY_INPUT")
    corpus = aggregate(reports)
    text = corpus.to_csv()
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"wrote {output}", err=True)
    elif ctx_obj.json_errors:
        emit(corpus.to_dict())
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mock", "mock_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Serve the canned bundle from this fixture directory.")
@click.option("--schema", "schema_files", type=click.Path(exists=True, dir_okay=False),
              multiple=True, help="Schema text(s) to embed in the prompt.")
@click.option("--max-repairs", type=int, default=None)
@click.option("-o", "--output-dir", type=click.Path(), default=None)
@click.pass_obj
def generate(ctx_obj: Context, transcript: str, mock_dir: str | None,
             schema_files: tuple[str, ...], max_repairs: int | None,
             output_dir: str | None) -> None:
    """Generate a model bundle from a transcript via the configured client."""
    config = ctx_obj.config(max_repairs=max_repairs, output_dir=output_dir)
    if mock_dir:
        client = FixtureGenerationClient(mock_dir)
    elif config.client_endpoint:
        client = HttpGenerationClient(config.client_endpoint, api_key=config.client_key)
    else:
        raise click.UsageError(
            "no generation client: pass --mock DIR or configure TMK_CLIENT_ENDPOINT"
        )
    transcript_obj = Transcript.from_file(transcript)
    try:
        model, log = generate_raw_model(
            client, transcript_obj.text,
            schema_texts=tuple(Path(f).read_text(encoding="utf-8") for f in schema_files),
            max_repairs=config.max_repairs,
        )
    except TmkError as exc:
        fail(ctx_obj, exc)
    destination = Path(config.output_dir) / model.skillName
    write_bundle(model, destination)
    emit({
        "skillName": model.skillName,
        "outputDir": str(destination),
        "attempts": len(log.attempts),
    })


@main.command()
@click.argument("model_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--transcript", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mock", "use_mock", is_flag=True,
              help="Use the deterministic offline judge.")
@click.pass_obj
def judge(ctx_obj: Context, model_dir: str, transcript: str, use_mock: bool) -> None:
    """Judge a model against its transcript on the three rubric dimensions."""
    config = ctx_obj.config()
    model = _load(ctx_obj, model_dir)
    if use_mock:
        client = DigestJudgeClient()
    elif config.client_endpoint:
        client = HttpJudgeClient(config.client_endpoint, api_key=config.client_key)
    else:
        raise click.UsageError(
            "no judge client: pass --mock or configure TMK_CLIENT_ENDPOINT"
        )
    transcript_obj = Transcript.from_file(transcript)
    try:
        scores = judge_model(client, model, transcript_obj.text)
    except TmkError as exc:
        fail(ctx_obj, exc)
    emit(scores.to_dict())


@main.command()
@click.argument("raw_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("refined_dir", type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def diff(ctx_obj: Context, raw_dir: str, refined_dir: str) -> None:
    """Field-level diff between a raw and a refined bundle."""
    raw = _load(ctx_obj, raw_dir)
    refined = _load(ctx_obj, refined_dir)
    try:
        emit(diff_models(raw, refined).to_dict())
    except TmkError as exc:
        fail(ctx_obj, exc)


@main.command()
@click.option("--static-raw", type=click.Path(exists=True, dir_okay=False), default=None,
              help="StaticReport JSON for the raw model (from `analyze`).")
@click.option("--static-refined", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--aggregate-csv", type=click.Path(exists=True, dir_okay=False),
              default=None, help="CorpusAggregate CSV (from `aggregate`).")
@click.option("--judge-raw", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--judge-refined", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--session", "session_files", type=click.Path(exists=True, dir_okay=False),
              multiple=True, help="RefinementSession JSON file(s).")
@click.option("-o", "--output-dir", type=click.Path(), default=None)
@click.pass_obj
def report(ctx_obj: Context, static_raw, static_refined, aggregate_csv,
           judge_raw, judge_refined, session_files, output_dir) -> None:
    """Emit report.md and report.csv from previously computed artifacts."""
    config = ctx_obj.config(output_dir=output_dir)

    def read_json(path):
        return json.loads(Path(path).read_text(encoding="utf-8"))

    static_reports = {}
    if static_raw:
        static_reports["raw"] = StaticReport.from_dict(read_json(static_raw))
    if static_refined:
        static_reports["refined"] = StaticReport.from_dict(read_json(static_refined))
    judge_scores = {}
    if judge_raw:
        judge_scores["raw"] = JudgeScores.from_dict(read_json(judge_raw))
    if judge_refined:
        judge_scores["refined"] = JudgeScores.from_dict(read_json(judge_refined))
    similarity = None
    if aggregate_csv:
        similarity = CorpusAggregate.from_csv(
            Path(aggregate_csv).read_text(encoding="utf-8")
        )
    sessions = [
        RefinementSession.from_dict(read_json(path)) for path in session_files
    ]
    if not (static_reports or judge_scores or similarity or sessions):
        raise click.UsageError("report needs at least one input artifact")
    output = emit_report(
        static_reports=static_reports or None,
        similarity_aggregate=similarity,
        judge_scores=judge_scores or None,
        sessions=sessions or None,
    )
    destination = Path(config.output_dir)
    destination.mkdir(parents=True, exist_ok=True)
    markdown_path = destination / "report.md"
    csv_path = destination / "report.csv"
    markdown_path.write_text(output.markdown, encoding="utf-8")
    csv_path.write_text(output.csv, encoding="utf-8")
    if ctx_obj.json_errors:
        emit({"reportMd": str(markdown_path), "reportCsv": str(csv_path)})
    click.echo(f"wrote {markdown_path} and {csv_path}", err=True)


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_dir", type=click.Path(), default="./tmk-store",
              show_default=True)
def serve(port: int, host: str, store_dir: str) -> None:
    """Run the HTTP service."""
    from .service.app import serve as run_service

    run_service(port=port, store_dir=store_dir, host=host)


if __name__ == "__main__":
    main()
