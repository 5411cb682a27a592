"""Structural diff and patch for model bundles.

Diffs are computed over the canonical bundle documents. Objects diff key
by key; arrays whose elements all carry unique `name` fields are matched by
name (so inserting a state does not touch its siblings), other arrays are
matched by index. Applying a diff to the original model reproduces the
revised model exactly.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Any

from . import paths
from .bundle import model_from_documents
from .errors import SkillMismatch
from .model import JsonDict, TmkModel

ADDED = "added"
REMOVED = "removed"
MODIFIED = "modified"


@dataclass(frozen=True)
class DiffEntry:
    kind: str  # added | removed | modified
    fieldPath: str
    before: Any = None
    after: Any = None
    index: int | None = None  # insertion position for array additions

    def to_dict(self) -> JsonDict:
        out: JsonDict = {"kind": self.kind, "fieldPath": self.fieldPath}
        if self.kind in (REMOVED, MODIFIED):
            out["before"] = self.before
        if self.kind in (ADDED, MODIFIED):
            out["after"] = self.after
        if self.index is not None:
            out["index"] = self.index
        return out


@dataclass(frozen=True)
class ModelDiff:
    skillName: str
    entries: tuple[DiffEntry, ...]

    def summary(self) -> dict[str, dict[str, int]]:
        """Entry counts per component per kind."""
        counts: dict[str, dict[str, int]] = {
            component: {ADDED: 0, REMOVED: 0, MODIFIED: 0}
            for component in ("task", "methods", "knowledge")
        }
        for entry in self.entries:
            component = entry.fieldPath.split(".", 1)[0].split("[", 1)[0]
            if component in counts:
                counts[component][entry.kind] += 1
        return counts

    def to_dict(self) -> JsonDict:
        return {
            "skillName": self.skillName,
            "entries": [e.to_dict() for e in self.entries],
            "summary": self.summary(),
        }


def _named_array(items: list) -> bool:
    if not items:
        return False
    names = []
    for item in items:
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            return False
        names.append(item["name"])
    return len(set(names)) == len(names)


def _diff_value(before: Any, after: Any, path: str, entries: list[DiffEntry]) -> None:
    if isinstance(before, dict) and isinstance(after, dict):
        for key in sorted(set(before) | set(after)):
            sub = f"{path}.{key}" if path else key
            if key not in after:
                entries.append(DiffEntry(REMOVED, sub, before=before[key]))
            elif key not in before:
                entries.append(DiffEntry(ADDED, sub, after=after[key]))
            else:
                _diff_value(before[key], after[key], sub, entries)
        return
    if isinstance(before, list) and isinstance(after, list):
        _diff_array(before, after, path, entries)
        return
    if before != after:
        entries.append(DiffEntry(MODIFIED, path, before=before, after=after))


def _diff_array(before: list, after: list, path: str, entries: list[DiffEntry]) -> None:
    if _named_array(before) and _named_array(after):
        before_names = [item["name"] for item in before]
        after_names = [item["name"] for item in after]
        common = set(before_names) & set(after_names)
        # Name matching is only sound while the shared elements keep their
        # relative order; otherwise replace the array wholesale.
        if [n for n in before_names if n in common] != [n for n in after_names if n in common]:
            entries.append(DiffEntry(MODIFIED, path, before=before, after=after))
            return
        by_name_before = {item["name"]: item for item in before}
        by_name_after = {item["name"]: item for item in after}
        for name in before_names:
            if name not in common:
                entries.append(
                    DiffEntry(REMOVED, f"{path}[name={name}]", before=by_name_before[name])
                )
        for position, name in enumerate(after_names):
            if name not in common:
                entries.append(
                    DiffEntry(
                        ADDED, f"{path}[name={name}]", after=by_name_after[name], index=position
                    )
                )
        for name in after_names:
            if name in common:
                _diff_value(
                    by_name_before[name], by_name_after[name], f"{path}[name={name}]", entries
                )
        return
    shared = min(len(before), len(after))
    for index in range(shared):
        _diff_value(before[index], after[index], f"{path}[{index}]", entries)
    for index in range(shared, len(before)):
        entries.append(DiffEntry(REMOVED, f"{path}[{index}]", before=before[index]))
    for index in range(shared, len(after)):
        entries.append(DiffEntry(ADDED, f"{path}[{index}]", after=after[index], index=index))


def diff_models(raw: TmkModel, refined: TmkModel) -> ModelDiff:
    """Field-path-level diff between two versions of the same skill."""
    if raw.skillName != refined.skillName:
        raise SkillMismatch(
            f"cannot diff '{raw.skillName}' against '{refined.skillName}'"
        )
    before = raw.to_canonical()
    after = refined.to_canonical()
    entries: list[DiffEntry] = []
    for component in ("task", "methods", "knowledge"):
        _diff_value(before[component], after[component], component, entries)
    return ModelDiff(skillName=raw.skillName, entries=tuple(entries))


def _array_path_and_selector(field_path: str) -> tuple[str, str]:
    """Splits "a.b[name=X]" into ("a.b", "[name=X]")."""
    cut = field_path.rfind("[")
    return field_path[:cut], field_path[cut:]


def apply_diff(raw: TmkModel, diff: ModelDiff) -> TmkModel:
    """Replays a diff onto a model; apply_diff(raw, diff_models(raw, refined)) == refined."""
    if raw.skillName != diff.skillName:
        raise SkillMismatch(
            f"diff for '{diff.skillName}' cannot apply to '{raw.skillName}'"
        )
    doc = copy.deepcopy(raw.to_canonical())

    removals = [e for e in diff.entries if e.kind == REMOVED]
    modifications = [e for e in diff.entries if e.kind == MODIFIED]
    additions = [e for e in diff.entries if e.kind == ADDED]

    # Index-addressed removals must run deepest-index first within an array.
    def removal_key(entry: DiffEntry) -> tuple[str, int]:
        array_path, selector = _array_path_and_selector(entry.fieldPath) if "[" in entry.fieldPath else (entry.fieldPath, "")
        if selector.startswith("[") and selector[1:-1].isdigit():
            return (array_path, -int(selector[1:-1]))
        return (entry.fieldPath, 0)

    for entry in sorted(removals, key=removal_key):
        paths.remove_at(doc, entry.fieldPath)
    for entry in modifications:
        paths.set_at(doc, entry.fieldPath, copy.deepcopy(entry.after))
    for entry in sorted(additions, key=lambda e: (e.fieldPath, e.index or 0)):
        if entry.index is not None and "[" in entry.fieldPath:
            array_path, _ = _array_path_and_selector(entry.fieldPath)
            paths.insert_at(doc, array_path, entry.index, copy.deepcopy(entry.after))
        else:
            paths.set_at(doc, entry.fieldPath, copy.deepcopy(entry.after))

    return model_from_documents(
        doc["task"], doc["methods"], doc["knowledge"], skill_name=raw.skillName
    )
