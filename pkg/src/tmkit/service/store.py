"""File-backed model store with optimistic version tokens.

One JSON file per skill under the store directory. Version lists are
append-only; the "working" head only advances through check-and-commit
updates guarded by a per-skill lock, so two updates racing on the same base
token cannot both win. Every mutation is flushed to disk atomically
(write to a temp file, then rename), which is what makes the store survive
restarts.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..bundle import model_from_documents
from ..model import JsonDict, TmkModel
from ..validation import ValidationReport, validate_schema

LABEL_RAW = "raw"
LABEL_WORKING = "working"
LABEL_REFINED = "refined"


class StoreError(Exception):
    def __init__(self, message: str, status: int = 400, code: str = "STORE_ERROR"):
        super().__init__(message)
        self.status = status
        self.code = code


class UnknownSkill(StoreError):
    def __init__(self, skill: str):
        super().__init__(f"unknown skill '{skill}'", status=404, code="UNKNOWN_SKILL")


class UnknownVersion(StoreError):
    def __init__(self, skill: str, selector: Any):
        super().__init__(
            f"skill '{skill}' has no version {selector!r}", status=404,
            code="UNKNOWN_VERSION",
        )


class StaleToken(StoreError):
    def __init__(self, expected: int, got: int):
        super().__init__(
            f"working version is at token {expected}, update was based on {got}",
            status=409,
            code="STALE_TOKEN",
        )


@dataclass(frozen=True)
class VersionSnapshot:
    token: int
    label: str
    createdAt: str
    task: JsonDict
    methods: list
    knowledge: JsonDict
    validation: JsonDict

    def to_model(self, skill_name: str) -> TmkModel:
        return model_from_documents(
            self.task, self.methods, self.knowledge, skill_name=skill_name
        )

    def to_dict(self) -> JsonDict:
        return {
            "token": self.token,
            "label": self.label,
            "createdAt": self.createdAt,
            "task": self.task,
            "methods": self.methods,
            "knowledge": self.knowledge,
            "validation": self.validation,
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "VersionSnapshot":
        return cls(
            token=data["token"],
            label=data["label"],
            createdAt=data["createdAt"],
            task=data["task"],
            methods=data["methods"],
            knowledge=data["knowledge"],
            validation=data["validation"],
        )


class ModelStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._records: dict[str, JsonDict] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load_all()

    # -- persistence ------------------------------------------------------

    def _path_for(self, skill: str) -> Path:
        return self.directory / f"{skill}.json"

    def _load_all(self) -> None:
        for path in sorted(self.directory.glob("*.json")):
            record = json.loads(path.read_text(encoding="utf-8"))
            self._records[record["skillName"]] = record

    def _flush(self, skill: str) -> None:
        record = self._records[skill]
        path = self._path_for(skill)
        temp = path.with_suffix(".json.tmp")
        temp.write_text(json.dumps(record, indent=2, ensure_ascii=False), encoding="utf-8")
        os.replace(temp, path)

    def _lock_for(self, skill: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(skill, threading.Lock())

    # -- reads ------------------------------------------------------------

    def skills(self) -> list[str]:
        return sorted(self._records)

    def record(self, skill: str) -> JsonDict:
        if skill not in self._records:
            raise UnknownSkill(skill)
        return self._records[skill]

    def versions(self, skill: str) -> list[VersionSnapshot]:
        return [VersionSnapshot.from_dict(v) for v in self.record(skill)["versions"]]

    def head(self, skill: str) -> VersionSnapshot:
        return self.versions(skill)[-1]

    def resolve(self, skill: str, selector: Any = None) -> VersionSnapshot:
        """Version addressing: None/"working"/"latest" = head, a label =
        newest snapshot with that label, an integer = exact token."""
        versions = self.versions(skill)
        if selector is None or selector in (LABEL_WORKING, "latest", "head"):
            labelled = [v for v in versions if v.label == LABEL_WORKING]
            if selector == LABEL_WORKING and labelled:
                return labelled[-1]
            return versions[-1]
        if isinstance(selector, str) and not selector.isdigit():
            labelled = [v for v in versions if v.label == selector]
            if not labelled:
                raise UnknownVersion(skill, selector)
            return labelled[-1]
        token = int(selector)
        for version in versions:
            if version.token == token:
                return version
        raise UnknownVersion(skill, selector)

    def model(self, skill: str, selector: Any = None) -> TmkModel:
        return self.resolve(skill, selector).to_model(skill)

    def sessions(self, skill: str) -> list[JsonDict]:
        return self.record(skill)["sessions"]

    # -- writes -----------------------------------------------------------

    def _append_version(
        self,
        skill: str,
        label: str,
        task: JsonDict,
        methods: list,
        knowledge: JsonDict,
        validation: JsonDict,
        created_at: str,
    ) -> VersionSnapshot:
        record = self._records[skill]
        snapshot = VersionSnapshot(
            token=record["nextToken"],
            label=label,
            createdAt=created_at,
            task=task,
            methods=methods,
            knowledge=knowledge,
            validation=validation,
        )
        record["versions"].append(snapshot.to_dict())
        record["nextToken"] += 1
        self._flush(skill)
        return snapshot

    def upload(
        self,
        task: JsonDict,
        methods: list,
        knowledge: JsonDict,
        skill_name: str | None,
        created_at: str,
    ) -> tuple[str, VersionSnapshot]:
        model = model_from_documents(task, methods, knowledge, skill_name=skill_name)
        skill = model.skillName
        if not skill or any(sep in skill for sep in ("/", "\\", "..")):
            raise StoreError(f"unusable skill name {skill!r}", code="BAD_SKILL_NAME")
        report = validate_schema(model)
        canonical = model.to_canonical()
        with self._lock_for(skill):
            if skill not in self._records:
                self._records[skill] = {
                    "skillName": skill,
                    "nextToken": 1,
                    "versions": [],
                    "sessions": [],
                }
            snapshot = self._append_version(
                skill,
                LABEL_RAW,
                canonical["task"],
                canonical["methods"],
                canonical["knowledge"],
                report.to_dict(),
                created_at,
            )
        return skill, snapshot

    def commit_working(
        self,
        skill: str,
        base_token: int,
        task: JsonDict,
        methods: list,
        knowledge: JsonDict,
        report: ValidationReport,
        created_at: str,
    ) -> VersionSnapshot:
        """Check-and-commit: the head token must still equal base_token."""
        with self._lock_for(skill):
            head = self.head(skill)
            if head.token != base_token:
                raise StaleToken(expected=head.token, got=base_token)
            return self._append_version(
                skill, LABEL_WORKING, task, methods, knowledge, report.to_dict(),
                created_at,
            )

    def promote_head(self, skill: str, label: str, created_at: str) -> VersionSnapshot:
        """Re-labels the current head as a new appended snapshot."""
        with self._lock_for(skill):
            head = self.head(skill)
            return self._append_version(
                skill, label, head.task, head.methods, head.knowledge,
                head.validation, created_at,
            )

    def put_session(self, skill: str, session: JsonDict) -> None:
        with self._lock_for(skill):
            record = self.record(skill)
            sessions = record["sessions"]
            for index, existing in enumerate(sessions):
                if existing.get("startedAt") == session.get("startedAt"):
                    sessions[index] = session
                    break
            else:
                sessions.append(session)
            self._flush(skill)

    def open_session(self, skill: str) -> JsonDict:
        sessions = self.sessions(skill)
        for session in reversed(sessions):
            if session.get("endedAt") is None:
                return session
        raise StoreError(f"no open session for '{skill}'", status=404, code="NO_OPEN_SESSION")
