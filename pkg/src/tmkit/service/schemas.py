"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class UploadBundleRequest(BaseModel):
    task: dict[str, Any]
    method: dict[str, Any] | list[dict[str, Any]]
    knowledge: dict[str, Any]
    skillName: str | None = None


class UploadBundleResponse(BaseModel):
    skillName: str
    token: int
    validation: dict[str, Any]


class ModelSummary(BaseModel):
    skillName: str
    token: int
    label: str
    valid: bool
    versionCount: int
    sessionCount: int


class ModelListResponse(BaseModel):
    models: list[ModelSummary]


class ModelResponse(BaseModel):
    skillName: str
    token: int
    label: str
    createdAt: str
    task: dict[str, Any]
    methods: list[dict[str, Any]]
    knowledge: dict[str, Any]
    validation: dict[str, Any]


class FieldEdit(BaseModel):
    fieldPath: str
    value: Any = None


class UpdateWorkingRequest(BaseModel):
    baseToken: int
    task: dict[str, Any] | None = None
    method: dict[str, Any] | list[dict[str, Any]] | None = None
    knowledge: dict[str, Any] | None = None
    edits: list[FieldEdit] | None = None
    allowInvalid: bool = False
    transcript: str | None = None


class UpdateWorkingResponse(BaseModel):
    skillName: str
    token: int
    validation: dict[str, Any]
    static: dict[str, Any]
    previousStatic: dict[str, Any]
    staticDelta: dict[str, float | None]


class AnalyzeRequest(BaseModel):
    transcript: str | None = None
    version: str | int | None = None
    alignmentThreshold: float = Field(default=0.8, gt=0.0, le=1.0)


class TraceRequest(BaseModel):
    method: str
    env: dict[str, bool] = Field(default_factory=dict)
    strict: bool = False
    stepLimit: int = Field(default=256, ge=1, le=100_000)
    version: str | int | None = None


class CompareRequest(BaseModel):
    skillA: str
    skillB: str
    versionA: str | int | None = None
    versionB: str | int | None = None


class DiffRequest(BaseModel):
    fromVersion: str | int = "raw"
    toVersion: str | int = "working"


class SessionStartRequest(BaseModel):
    manualBaselineHours: float = Field(default=7.0, gt=0.0)


class SessionEventRequest(BaseModel):
    fieldPath: str
    before: str | None = None
    after: str | None = None
    note: str | None = None


class SessionEndRequest(BaseModel):
    loggedHours: float | None = Field(default=None, ge=0.0)


class SessionEndResponse(BaseModel):
    session: dict[str, Any]
    reduction: float
    refinedToken: int
    diff: dict[str, Any] | None = None


class ReportResponse(BaseModel):
    skillName: str
    markdown: str
    csv: str


class ErrorBody(BaseModel):
    code: str
    message: str
    path: str | None = None
    validation: dict[str, Any] | None = None


class EndpointInfo(BaseModel):
    method: str
    path: str
    summary: str


class ApiListing(BaseModel):
    service: str
    version: str
    endpoints: list[EndpointInfo]
