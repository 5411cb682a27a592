"""HTTP service exposing model storage, validation, metrics, tracing,
comparison, diffs, and refinement sessions.

Every write is validated before commit; an error-severity report aborts the
write unless the request sets allowInvalid, in which case the report is
stored alongside the snapshot. Edits ride optimistic version tokens: a PUT
based on a token that is no longer the head is answered with 409.
"""

from __future__ import annotations

import copy
from datetime import datetime, timezone
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import paths
from .. import __version__
from ..bundle import model_from_documents
from ..conditions import PredicateEnv
from ..diffing import diff_models
from ..errors import TmkError
from ..fsm import trace
from ..model import TmkModel
from ..pipeline import RefinementSession
from ..reporting import emit_report
from ..similarity import aggregate, compare_models
from ..static_metrics import StaticReport, Transcript, analyze
from ..validation import validate_schema
from . import schemas
from .store import (
    LABEL_REFINED,
    ModelStore,
    StoreError,
    VersionSnapshot,
)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _error_response(status: int, code: str, message: str, path: str | None = None,
                    validation: dict | None = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if path is not None:
        body["path"] = path
    if validation is not None:
        body["validation"] = validation
    return JSONResponse(status_code=status, content=body)


def _static_delta(before: StaticReport, after: StaticReport) -> dict[str, float | None]:
    deltas: dict[str, float | None] = {}
    before_values = before.metric_values()
    for key, after_value in after.metric_values().items():
        before_value = before_values.get(key)
        if before_value is None or after_value is None:
            deltas[key] = None
        else:
            deltas[key] = after_value - before_value
    return deltas


def create_app(store_dir: str, allow_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    app = FastAPI(title="tmkit service", version=__version__, docs_url="/docs")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(allow_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = ModelStore(store_dir)
    app.state.store = store

    @app.exception_handler(StoreError)
    async def store_error_handler(request: Request, exc: StoreError):
        return _error_response(exc.status, exc.code, str(exc))

    @app.exception_handler(TmkError)
    async def tmk_error_handler(request: Request, exc: TmkError):
        payload = exc.to_dict()
        return _error_response(
            400, payload.pop("code"), payload.pop("message"), path=payload.get("path")
        )

    def model_of(snapshot: VersionSnapshot, skill: str) -> TmkModel:
        return snapshot.to_model(skill)

    @app.get("/api", response_model=schemas.ApiListing, summary="List endpoints")
    def api_listing() -> schemas.ApiListing:
        endpoints = []
        for route in app.routes:
            methods = getattr(route, "methods", None)
            if not methods:
                continue
            for method in sorted(methods - {"HEAD", "OPTIONS"}):
                endpoints.append(
                    schemas.EndpointInfo(
                        method=method,
                        path=route.path,
                        summary=getattr(route, "summary", None) or route.name or "",
                    )
                )
        return schemas.ApiListing(service="tmkit", version=__version__, endpoints=endpoints)

    @app.post(
        "/models",
        response_model=schemas.UploadBundleResponse,
        summary="Upload a model bundle",
    )
    def upload_model(request: schemas.UploadBundleRequest) -> schemas.UploadBundleResponse:
        methods = request.method if isinstance(request.method, list) else [request.method]
        skill, snapshot = store.upload(
            request.task, methods, request.knowledge, request.skillName, _now()
        )
        return schemas.UploadBundleResponse(
            skillName=skill, token=snapshot.token, validation=snapshot.validation
        )

    @app.get("/models", response_model=schemas.ModelListResponse, summary="List models")
    def list_models() -> schemas.ModelListResponse:
        summaries = []
        for skill in store.skills():
            head = store.head(skill)
            summaries.append(
                schemas.ModelSummary(
                    skillName=skill,
                    token=head.token,
                    label=head.label,
                    valid=bool(head.validation.get("valid")),
                    versionCount=len(store.versions(skill)),
                    sessionCount=len(store.sessions(skill)),
                )
            )
        return schemas.ModelListResponse(models=summaries)

    @app.get(
        "/models/{skill}", response_model=schemas.ModelResponse, summary="Fetch a model"
    )
    def get_model(skill: str, version: str | None = None) -> schemas.ModelResponse:
        snapshot = store.resolve(skill, version)
        return schemas.ModelResponse(
            skillName=skill,
            token=snapshot.token,
            label=snapshot.label,
            createdAt=snapshot.createdAt,
            task=snapshot.task,
            methods=snapshot.methods,
            knowledge=snapshot.knowledge,
            validation=snapshot.validation,
        )

    @app.put(
        "/models/{skill}/working",
        response_model=schemas.UpdateWorkingResponse,
        summary="Update the working version",
    )
    def update_working(skill: str, request: schemas.UpdateWorkingRequest):
        base = store.resolve(skill)
        if request.edits is None and request.task is None:
            return _error_response(
                400, "EMPTY_UPDATE", "provide either a full bundle or a list of edits"
            )
        if request.edits is not None and request.task is not None:
            return _error_response(
                400, "AMBIGUOUS_UPDATE", "provide a full bundle or edits, not both"
            )

        if request.task is not None:
            task = request.task
            methods = request.method if isinstance(request.method, list) else (
                [request.method] if request.method else base.methods
            )
            knowledge = request.knowledge if request.knowledge is not None else base.knowledge
        else:
            doc = {
                "task": copy.deepcopy(base.task),
                "methods": copy.deepcopy(base.methods),
                "knowledge": copy.deepcopy(base.knowledge),
            }
            for edit in request.edits or []:
                try:
                    paths.set_at(doc, edit.fieldPath, edit.value)
                except paths.PathError as exc:
                    return _error_response(400, "BAD_FIELD_PATH", str(exc),
                                           path=edit.fieldPath)
            task, methods, knowledge = doc["task"], doc["methods"], doc["knowledge"]

        previous_model = model_of(base, skill)
        candidate = model_from_documents(task, methods, knowledge, skill_name=skill)
        report = validate_schema(candidate)
        if not report.valid and not request.allowInvalid:
            return _error_response(
                400,
                "VALIDATION_FAILED",
                "update rejected: the bundle has error-severity violations",
                validation=report.to_dict(),
            )
        snapshot = store.commit_working(
            skill,
            request.baseToken,
            candidate.to_canonical()["task"],
            candidate.to_canonical()["methods"],
            candidate.to_canonical()["knowledge"],
            report,
            _now(),
        )
        transcript = Transcript.from_text(request.transcript) if request.transcript else None
        previous_static = analyze(previous_model, transcript)
        current_static = analyze(candidate, transcript)
        return schemas.UpdateWorkingResponse(
            skillName=skill,
            token=snapshot.token,
            validation=report.to_dict(),
            static=current_static.to_dict(),
            previousStatic=previous_static.to_dict(),
            staticDelta=_static_delta(previous_static, current_static),
        )

    @app.post(
        "/models/{skill}/validate",
        summary="Validate a stored model",
    )
    def validate_model(skill: str, version: str | None = None) -> dict:
        model = store.model(skill, version)
        return validate_schema(model).to_dict()

    @app.post("/models/{skill}/analyze", summary="Compute structural metrics")
    def analyze_model(skill: str, request: schemas.AnalyzeRequest) -> dict:
        model = store.model(skill, request.version)
        transcript = (
            Transcript.from_text(request.transcript) if request.transcript else None
        )
        report = analyze(model, transcript, alignment_threshold=request.alignmentThreshold)
        return report.to_dict()

    @app.post("/models/{skill}/trace", summary="Execute a method organizer")
    def trace_model(skill: str, request: schemas.TraceRequest) -> dict:
        model = store.model(skill, request.version)
        env = PredicateEnv.from_strings(request.env, strict=request.strict)
        result = trace(model, request.method, env, step_limit=request.stepLimit)
        return result.to_dict()

    @app.post("/compare", summary="Compare two stored models")
    def compare(request: schemas.CompareRequest) -> dict:
        model_a = store.model(request.skillA, request.versionA)
        model_b = store.model(request.skillB, request.versionB)
        return compare_models(model_a, model_b).to_dict()

    @app.post("/models/{skill}/diff", summary="Diff two versions of a skill")
    def diff_versions(skill: str, request: schemas.DiffRequest) -> dict:
        before = store.model(skill, request.fromVersion)
        after = store.model(skill, request.toVersion)
        return diff_models(before, after).to_dict()

    @app.post("/sessions/{skill}/start", summary="Start a refinement session")
    def start_session(skill: str, request: schemas.SessionStartRequest) -> dict:
        head = store.head(skill)
        session = RefinementSession.start(
            skill,
            manual_baseline_hours=request.manualBaselineHours,
            raw_model_ref=str(head.token),
        )
        store.put_session(skill, session.to_dict())
        return session.to_dict()

    @app.post("/sessions/{skill}/event", summary="Record a session edit event")
    def session_event(skill: str, request: schemas.SessionEventRequest) -> dict:
        session = RefinementSession.from_dict(store.open_session(skill))
        session = session.record(
            request.fieldPath, request.before, request.after, request.note
        )
        store.put_session(skill, session.to_dict())
        return session.to_dict()

    @app.post(
        "/sessions/{skill}/end",
        response_model=schemas.SessionEndResponse,
        summary="End a session; promotes the head to refined",
    )
    def end_session(skill: str, request: schemas.SessionEndRequest):
        session = RefinementSession.from_dict(store.open_session(skill))
        refined = store.promote_head(skill, LABEL_REFINED, _now())
        session = session.end(
            logged_hours=request.loggedHours, refined_model_ref=str(refined.token)
        )
        store.put_session(skill, session.to_dict())
        diff_payload = None
        if session.rawModelRef is not None:
            raw_model = store.model(skill, session.rawModelRef)
            refined_model = store.model(skill, refined.token)
            diff_payload = diff_models(raw_model, refined_model).to_dict()
        reduction = session.reduction
        return schemas.SessionEndResponse(
            session=session.to_dict(),
            reduction=reduction if reduction is not None else 0.0,
            refinedToken=refined.token,
            diff=diff_payload,
        )

    @app.get(
        "/reports/{skill}",
        response_model=schemas.ReportResponse,
        summary="Render the markdown/CSV report for a skill",
    )
    def report_for_skill(skill: str, transcript: str | None = None):
        store.record(skill)  # 404 for unknown skills
        static_reports = {}
        transcript_obj = Transcript.from_text(transcript) if transcript else None
        for label in ("raw", "refined"):
            try:
                model = store.model(skill, label)
            except StoreError:
                continue
            static_reports[label] = analyze(model, transcript_obj)
        similarity = None
        if "raw" in static_reports and "refined" in static_reports:
            similarity = aggregate(
                [compare_models(store.model(skill, "raw"), store.model(skill, "refined"))]
            )
        sessions = [
            RefinementSession.from_dict(s)
            for s in store.sessions(skill)
            if s.get("endedAt") is not None
        ]
        output = emit_report(
            static_reports=static_reports or None,
            similarity_aggregate=similarity,
            sessions=sessions or None,
            title=f"Model Report: {skill}",
        )
        return schemas.ReportResponse(skillName=skill, markdown=output.markdown,
                                      csv=output.csv)

    return app


def serve(port: int = 8000, store_dir: str = "./tmk-store", host: str = "127.0.0.1") -> None:
    """Runs the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store_dir), host=host, port=port)
