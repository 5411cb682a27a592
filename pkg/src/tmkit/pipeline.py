"""Authoring workflow around the core: prompt assembly, schema-constrained
generation with validate-and-repair retries, rubric-based judging, and
refinement-session accounting.

Generation and judging are defined purely as client interfaces. The
deterministic mock clients make the whole pipeline runnable offline; the
HTTP clients speak a minimal JSON POST contract for hosted model services.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Protocol, Sequence

import httpx

from .bundle import parse_model_bundle, serialize_model
from .errors import (
    EmptyTranscript,
    GenerationFailed,
    InvalidJudgeResponse,
    NonPositiveBaseline,
    ParseError,
    TransportError,
)
from .model import JsonDict, TmkModel
from .validation import ValidationReport, validate_schema

DEFAULT_MAX_REPAIRS = 2
DEFAULT_MANUAL_HOURS = 7.0

JUDGE_DIMENSIONS = ("causalChaining", "teleologicalLinkage", "proceduralFidelity")

# Default rubric texts, replaceable per call; nothing downstream depends on
# this exact wording.
DEFAULT_RUBRICS: dict[str, str] = {
    "causalChaining": (
        "Score 1-5 how well the state transitions reflect domain-specific "
        "mechanisms from the lesson rather than abstract placeholders."
    ),
    "teleologicalLinkage": (
        "Score 1-5 the clarity of goal decomposition and the alignment "
        "between tasks and the methods that realize them."
    ),
    "proceduralFidelity": (
        "Score 1-5 how faithfully the model represents the algorithmic "
        "structure of the lesson, including loops and edge cases."
    ),
}

PROMPT_SECTIONS: tuple[tuple[str, str], ...] = (
    (
        "## 1. Objective and Setup",
        "You produce three JSON documents (Task, Method, Knowledge) that "
        "model one procedural skill taught in the supplied course material. "
        "Every document must conform to the supplied schema. Do not invent "
        "content that the material does not support.",
    ),
    (
        "## 2. Core Philosophy",
        "Stay strictly faithful to the source material. Prefer the "
        "instructor's terminology over generic vocabulary, and omit steps "
        "or concepts the material does not mention.",
    ),
    (
        "## 3. Modeling Instructions",
        "Task: state the goal, typed input and output parameters, given and "
        "makes conditions, and means references to the methods that realize "
        "it. Method: model the mechanism as an organizer, a finite-state "
        "machine whose states invoke subtasks or atomic operations. "
        "Knowledge: declare the concepts, instances, and relations the task "
        "and methods rely on, including parameter types.",
    ),
    (
        "## 4. Mandatory Patterns",
        "Every organizer declares explicit Done and Fail states. Every "
        "transition carries a dataCondition guard, and guards must be "
        "substantive predicates, not bare existence checks or literals. "
        "Every task lists at least one means reference.",
    ),
    (
        "## 5. Step-by-Step Workflow",
        "Build the Knowledge document first, then the Task document, then "
        "the Method document, and finally check the bundle against the "
        "schemas and the mandatory patterns before answering.",
    ),
)

REPAIR_INSTRUCTION = (
    "The previous bundle failed validation. Fix every violation listed "
    "below and return all three corrected documents."
)


@dataclass(frozen=True)
class PromptBundle:
    systemPrompt: str
    schemaTexts: tuple[str, ...]
    transcriptText: str

    def to_dict(self) -> JsonDict:
        return {
            "systemPrompt": self.systemPrompt,
            "schemaTexts": list(self.schemaTexts),
            "transcriptText": self.transcriptText,
        }


def assemble_generation_prompt(
    transcript_text: str, schema_texts: Sequence[str] = ()
) -> PromptBundle:
    """Builds the five-section system prompt, schemas appended, transcript last."""
    if not transcript_text.strip():
        raise EmptyTranscript("cannot assemble a prompt from an empty transcript")
    blocks = [f"{header}\n\n{body}" for header, body in PROMPT_SECTIONS]
    for index, schema in enumerate(schema_texts, start=1):
        blocks.append(f"## Schema {index}\n\n{schema}")
    system_prompt = "\n\n".join(blocks)
    return PromptBundle(
        systemPrompt=system_prompt,
        schemaTexts=tuple(schema_texts),
        transcriptText=transcript_text,
    )


@dataclass(frozen=True)
class BundleTexts:
    taskText: str
    methodText: str
    knowledgeText: str

    @classmethod
    def from_model(cls, model: TmkModel) -> "BundleTexts":
        task_text, method_text, knowledge_text = serialize_model(model)
        return cls(task_text, method_text, knowledge_text)

    def to_dict(self) -> JsonDict:
        return {
            "taskText": self.taskText,
            "methodText": self.methodText,
            "knowledgeText": self.knowledgeText,
        }


@dataclass(frozen=True)
class GenerationRequest:
    systemPrompt: str
    schemaTexts: tuple[str, ...]
    transcriptText: str
    repairFeedback: str | None = None

    def to_dict(self) -> JsonDict:
        return {
            "systemPrompt": self.systemPrompt,
            "schemaTexts": list(self.schemaTexts),
            "transcriptText": self.transcriptText,
            "repairFeedback": self.repairFeedback,
        }


class GenerationClient(Protocol):
    def generate(self, request: GenerationRequest) -> BundleTexts: ...


@dataclass(frozen=True)
class JudgeRequest:
    componentTexts: BundleTexts
    transcriptText: str
    dimension: str
    rubricText: str


class JudgeClient(Protocol):
    def score(self, request: JudgeRequest) -> int: ...


class MockGenerationClient:
    """Scripted client: returns canned bundles in order, repeating the last.

    Requests are recorded for assertions; the pipeline itself treats the
    client as stateless.
    """

    def __init__(self, responses: Sequence[BundleTexts], repeat_last: bool = True):
        if not responses:
            raise ValueError("scripted client needs at least one response")
        self.responses = list(responses)
        self.repeat_last = repeat_last
        self.requests: list[GenerationRequest] = []

    def generate(self, request: GenerationRequest) -> BundleTexts:
        self.requests.append(request)
        index = len(self.requests) - 1
        if index < len(self.responses):
            return self.responses[index]
        if self.repeat_last:
            return self.responses[-1]
        raise RuntimeError("scripted responses exhausted")


class FixtureGenerationClient:
    """Always returns the bundle stored in a fixture directory."""

    def __init__(self, directory):
        from .bundle import load_bundle

        self._bundle = BundleTexts.from_model(load_bundle(directory))

    def generate(self, request: GenerationRequest) -> BundleTexts:
        return self._bundle


class HttpGenerationClient:
    """POSTs the request as JSON and expects the three document texts back."""

    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def generate(self, request: GenerationRequest) -> BundleTexts:
        response = self._client.post(self.endpoint, json=request.to_dict())
        response.raise_for_status()
        body = response.json()
        return BundleTexts(
            taskText=body["taskText"],
            methodText=body["methodText"],
            knowledgeText=body["knowledgeText"],
        )


class MockJudgeClient:
    """Fixed or per-dimension scripted judge scores."""

    def __init__(self, scores: int | Mapping[str, int] | Callable[[JudgeRequest], int]):
        self._scores = scores
        self.requests: list[JudgeRequest] = []

    def score(self, request: JudgeRequest) -> int:
        self.requests.append(request)
        if callable(self._scores):
            return self._scores(request)
        if isinstance(self._scores, Mapping):
            return self._scores[request.dimension]
        return self._scores


class DigestJudgeClient:
    """Deterministic offline judge: scores derive from a content digest."""

    def score(self, request: JudgeRequest) -> int:
        digest = hashlib.sha256()
        digest.update(request.dimension.encode())
        digest.update(request.componentTexts.taskText.encode())
        digest.update(request.componentTexts.methodText.encode())
        digest.update(request.componentTexts.knowledgeText.encode())
        return 1 + digest.digest()[0] % 5


class HttpJudgeClient:
    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 120.0,
                 transport: httpx.BaseTransport | None = None):
        self.endpoint = endpoint
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def score(self, request: JudgeRequest) -> int:
        response = self._client.post(
            self.endpoint,
            json={
                "componentTexts": request.componentTexts.to_dict(),
                "transcriptText": request.transcriptText,
                "dimension": request.dimension,
                "rubricText": request.rubricText,
            },
        )
        response.raise_for_status()
        return int(response.json()["score"])


@dataclass(frozen=True)
class GenerationAttempt:
    index: int
    repairFeedback: str | None
    response: BundleTexts | None = None
    report: ValidationReport | None = None
    parseError: str | None = None

    def to_dict(self) -> JsonDict:
        return {
            "index": self.index,
            "repairFeedback": self.repairFeedback,
            "response": self.response.to_dict() if self.response else None,
            "report": self.report.to_dict() if self.report else None,
            "parseError": self.parseError,
        }


@dataclass(frozen=True)
class GenerationLog:
    attempts: tuple[GenerationAttempt, ...]

    def to_dict(self) -> JsonDict:
        return {"attempts": [a.to_dict() for a in self.attempts]}


def _repair_feedback(report: ValidationReport | None, parse_error: str | None) -> str:
    if report is not None:
        payload = report.to_dict()
    else:
        payload = {
            "valid": False,
            "violations": [
                {"code": "PARSE_ERROR", "path": "", "message": parse_error or "",
                 "severity": "error"}
            ],
        }
    return REPAIR_INSTRUCTION + "\n" + json.dumps(payload, indent=2)


def generate_raw_model(
    client: GenerationClient,
    transcript_text: str,
    schema_texts: Sequence[str] = (),
    max_repairs: int = DEFAULT_MAX_REPAIRS,
) -> tuple[TmkModel, GenerationLog]:
    """Calls the client, validates, and retries with repair feedback.

    Returns the first schema-valid model with the attempt log. Raises
    GenerationFailed once 1 + max_repairs attempts are exhausted;
    client/transport exceptions surface as TransportError with the attempt
    index.
    """
    prompt = assemble_generation_prompt(transcript_text, schema_texts)
    attempts: list[GenerationAttempt] = []
    feedback: str | None = None
    for attempt_index in range(1 + max_repairs):
        request = GenerationRequest(
            systemPrompt=prompt.systemPrompt,
            schemaTexts=prompt.schemaTexts,
            transcriptText=prompt.transcriptText,
            repairFeedback=feedback,
        )
        try:
            response = client.generate(request)
        except Exception as exc:
            raise TransportError(
                f"generation call failed on attempt {attempt_index + 1}: {exc}",
                attempt=attempt_index + 1,
            ) from exc
        try:
            model = parse_model_bundle(
                response.taskText, response.methodText, response.knowledgeText
            )
        except ParseError as exc:
            attempts.append(
                GenerationAttempt(
                    index=attempt_index + 1,
                    repairFeedback=feedback,
                    response=response,
                    parseError=str(exc),
                )
            )
            feedback = _repair_feedback(None, str(exc))
            continue
        report = validate_schema(model)
        attempts.append(
            GenerationAttempt(
                index=attempt_index + 1,
                repairFeedback=feedback,
                response=response,
                report=report,
            )
        )
        if report.valid:
            return model, GenerationLog(attempts=tuple(attempts))
        feedback = _repair_feedback(report, None)
    raise GenerationFailed(
        f"no valid bundle after {1 + max_repairs} attempts",
        log=GenerationLog(attempts=tuple(attempts)),
    )


def normalize_judge_score(raw: int) -> float:
    """Maps the 1..5 scale onto [0, 1]; rejects out-of-range responses."""
    if not isinstance(raw, int) or isinstance(raw, bool) or not 1 <= raw <= 5:
        raise InvalidJudgeResponse(f"judge returned {raw!r}, expected an integer in 1..5")
    return (raw - 1) / 4


@dataclass(frozen=True)
class JudgeScores:
    causalChaining: float
    teleologicalLinkage: float
    proceduralFidelity: float

    def to_dict(self) -> JsonDict:
        return {
            "causalChaining": self.causalChaining,
            "teleologicalLinkage": self.teleologicalLinkage,
            "proceduralFidelity": self.proceduralFidelity,
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "JudgeScores":
        return cls(
            causalChaining=data["causalChaining"],
            teleologicalLinkage=data["teleologicalLinkage"],
            proceduralFidelity=data["proceduralFidelity"],
        )


def judge_model(
    client: JudgeClient,
    model: TmkModel,
    transcript_text: str,
    rubrics: Mapping[str, str] = DEFAULT_RUBRICS,
) -> JudgeScores:
    """One client call per dimension, each normalized to [0, 1]."""
    texts = BundleTexts.from_model(model)
    normalized: dict[str, float] = {}
    for dimension in JUDGE_DIMENSIONS:
        raw = client.score(
            JudgeRequest(
                componentTexts=texts,
                transcriptText=transcript_text,
                dimension=dimension,
                rubricText=rubrics[dimension],
            )
        )
        normalized[dimension] = normalize_judge_score(raw)
    return JudgeScores(**normalized)


def refinement_reduction(manual_hours: float, refinement_hours: float) -> float:
    """(manual - refinement) / manual; the effort saved by refining a draft."""
    if manual_hours <= 0:
        raise NonPositiveBaseline(f"manual baseline must be positive, got {manual_hours}")
    if refinement_hours < 0:
        raise ValueError(f"refinement hours must be non-negative, got {refinement_hours}")
    return (manual_hours - refinement_hours) / manual_hours


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _parse_iso(text: str) -> datetime:
    return datetime.fromisoformat(text)


@dataclass(frozen=True)
class SessionEvent:
    timestamp: str
    fieldPath: str
    before: str | None = None
    after: str | None = None
    note: str | None = None

    def to_dict(self) -> JsonDict:
        return {
            "timestamp": self.timestamp,
            "fieldPath": self.fieldPath,
            "before": self.before,
            "after": self.after,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "SessionEvent":
        return cls(
            timestamp=data["timestamp"],
            fieldPath=data.get("fieldPath", ""),
            before=data.get("before"),
            after=data.get("after"),
            note=data.get("note"),
        )


@dataclass(frozen=True)
class RefinementSession:
    """Timestamped edit log for turning a raw draft into a refined model."""

    skillName: str
    startedAt: str
    endedAt: str | None = None
    manualBaselineHours: float = DEFAULT_MANUAL_HOURS
    loggedHours: float | None = None
    events: tuple[SessionEvent, ...] = ()
    rawModelRef: str | None = None
    refinedModelRef: str | None = None

    @classmethod
    def start(
        cls,
        skill_name: str,
        manual_baseline_hours: float = DEFAULT_MANUAL_HOURS,
        raw_model_ref: str | None = None,
        started_at: str | None = None,
    ) -> "RefinementSession":
        return cls(
            skillName=skill_name,
            startedAt=started_at or _now_iso(),
            manualBaselineHours=manual_baseline_hours,
            rawModelRef=raw_model_ref,
        )

    def record(self, field_path: str, before: str | None, after: str | None,
               note: str | None = None, timestamp: str | None = None) -> "RefinementSession":
        event = SessionEvent(
            timestamp=timestamp or _now_iso(),
            fieldPath=field_path,
            before=before,
            after=after,
            note=note,
        )
        return replace(self, events=self.events + (event,))

    def end(
        self,
        logged_hours: float | None = None,
        refined_model_ref: str | None = None,
        ended_at: str | None = None,
    ) -> "RefinementSession":
        ended = ended_at or _now_iso()
        if _parse_iso(ended) < _parse_iso(self.startedAt):
            raise ValueError("session cannot end before it started")
        return replace(
            self,
            endedAt=ended,
            loggedHours=logged_hours if logged_hours is not None else self.loggedHours,
            refinedModelRef=refined_model_ref or self.refinedModelRef,
        )

    @property
    def refinement_hours(self) -> float | None:
        """Explicitly logged hours win over the wall-clock span."""
        if self.loggedHours is not None:
            return self.loggedHours
        if self.endedAt is None:
            return None
        span = _parse_iso(self.endedAt) - _parse_iso(self.startedAt)
        return span.total_seconds() / 3600

    @property
    def reduction(self) -> float | None:
        hours = self.refinement_hours
        if hours is None:
            return None
        return refinement_reduction(self.manualBaselineHours, hours)

    def to_dict(self) -> JsonDict:
        return {
            "skillName": self.skillName,
            "startedAt": self.startedAt,
            "endedAt": self.endedAt,
            "manualBaselineHours": self.manualBaselineHours,
            "loggedHours": self.loggedHours,
            "events": [e.to_dict() for e in self.events],
            "rawModelRef": self.rawModelRef,
            "refinedModelRef": self.refinedModelRef,
            "refinementHours": self.refinement_hours,
            "reduction": self.reduction,
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "RefinementSession":
        return cls(
            skillName=data["skillName"],
            startedAt=data["startedAt"],
            endedAt=data.get("endedAt"),
            manualBaselineHours=data.get("manualBaselineHours", DEFAULT_MANUAL_HOURS),
            loggedHours=data.get("loggedHours"),
            events=tuple(SessionEvent.from_dict(e) for e in data.get("events", [])),
            rawModelRef=data.get("rawModelRef"),
            refinedModelRef=data.get("refinedModelRef"),
        )


def save_session(session: RefinementSession, directory: str | Path) -> Path:
    """Persists a session as `<skill>.session.json` in the sessions directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{session.skillName}.session.json"
    path.write_text(json.dumps(session.to_dict(), indent=2), encoding="utf-8")
    return path


def load_session(directory: str | Path, skill_name: str) -> RefinementSession:
    path = Path(directory) / f"{skill_name}.session.json"
    return RefinementSession.from_dict(json.loads(path.read_text(encoding="utf-8")))
