"""Parse and serialize TMK model bundles.

A bundle is three JSON documents: the Task document (one task object, with
optional nested subtasks), the Method document (an array of method objects,
or a single object treated as a one-element array), and the Knowledge
document (concepts / instances / relations).

Parsing is shape-strict and content-tolerant: wrong JSON types for known
fields are rejected with a ParseError, but unknown keys are preserved in
`extras` maps and all semantic problems (dangling references, missing
states, empty names) are left for the validator to report.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import MissingComponent, ParseError
from .model import (
    Concept,
    GoalInvocation,
    Instance,
    JsonDict,
    KnowledgeSpec,
    MethodSpec,
    Organizer,
    Parameter,
    Relation,
    State,
    TaskSpec,
    TmkModel,
    Transition,
)

TASK_SUFFIX = ".task.json"
METHOD_SUFFIX = ".method.json"
KNOWLEDGE_SUFFIX = ".knowledge.json"

# Table-derived alias: task documents may reference methods under either key.
MEANS_ALIAS = "mechanismReference"


def _offending_token(text: str, pos: int) -> str:
    snippet = text[pos : pos + 16].split("\n")[0]
    return snippet if snippet else "<end of input>"


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{source} document: {exc.msg} at line {exc.lineno} column {exc.colno}",
            line=exc.lineno,
            column=exc.colno,
            token=_offending_token(text, exc.pos),
            source=source,
        ) from exc


class _Reader:
    """Pulls typed fields out of one JSON object, collecting leftovers as extras."""

    def __init__(self, obj: JsonDict, source: str, where: str):
        self.obj = obj
        self.source = source
        self.where = where
        self.consumed: set[str] = set()

    def fail(self, message: str) -> ParseError:
        return ParseError(f"{self.source} document: {self.where}: {message}", source=self.source)

    def text(self, key: str, default: str = "") -> str:
        if key not in self.obj:
            return default
        self.consumed.add(key)
        value = self.obj[key]
        if not isinstance(value, str):
            raise self.fail(f"'{key}' must be a string")
        return value

    def optional_text(self, key: str) -> str | None:
        if key not in self.obj:
            return None
        self.consumed.add(key)
        value = self.obj[key]
        if value is None:
            return None
        if not isinstance(value, str):
            raise self.fail(f"'{key}' must be a string")
        return value

    def text_list(self, key: str, allow_scalar: bool = False) -> tuple[str, ...]:
        if key not in self.obj:
            return ()
        self.consumed.add(key)
        value = self.obj[key]
        if allow_scalar and isinstance(value, str):
            return (value,)
        if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
            raise self.fail(f"'{key}' must be an array of strings")
        return tuple(value)

    def object_list(self, key: str) -> list[JsonDict]:
        if key not in self.obj:
            return []
        self.consumed.add(key)
        value = self.obj[key]
        if not isinstance(value, list) or any(not isinstance(v, dict) for v in value):
            raise self.fail(f"'{key}' must be an array of objects")
        return value

    def object(self, key: str) -> JsonDict | None:
        if key not in self.obj:
            return None
        self.consumed.add(key)
        value = self.obj[key]
        if value is None:
            return None
        if not isinstance(value, dict):
            raise self.fail(f"'{key}' must be an object")
        return value

    def extras(self) -> JsonDict:
        return {k: v for k, v in self.obj.items() if k not in self.consumed}


def _parameter_from(obj: JsonDict, source: str, where: str) -> Parameter:
    reader = _Reader(obj, source, where)
    return Parameter(
        name=reader.text("name"),
        type=reader.text("type"),
        extras=reader.extras(),
    )


def task_from_dict(obj: JsonDict, source: str = "task", where: str = "task") -> TaskSpec:
    reader = _Reader(obj, source, where)
    name = reader.text("name")
    means = reader.text_list("means", allow_scalar=True)
    if "means" not in obj and MEANS_ALIAS in obj:
        means = reader.text_list(MEANS_ALIAS, allow_scalar=True)
    elif MEANS_ALIAS in obj:
        # Both keys present: the canonical key wins, the alias is dropped.
        reader.consumed.add(MEANS_ALIAS)
    return TaskSpec(
        name=name,
        description=reader.text("description"),
        inputParameters=tuple(
            _parameter_from(p, source, f"{where}.inputParameters[{i}]")
            for i, p in enumerate(reader.object_list("inputParameters"))
        ),
        outputParameters=tuple(
            _parameter_from(p, source, f"{where}.outputParameters[{i}]")
            for i, p in enumerate(reader.object_list("outputParameters"))
        ),
        given=reader.text_list("given"),
        makes=reader.text_list("makes"),
        means=means,
        subtasks=tuple(
            task_from_dict(t, source, f"{where}.subtasks[{i}]")
            for i, t in enumerate(reader.object_list("subtasks"))
        ),
        extras=reader.extras(),
    )


def _goal_invocation_from(obj: JsonDict, source: str, where: str) -> GoalInvocation:
    reader = _Reader(obj, source, where)
    return GoalInvocation(
        goalReference=reader.text("goalReference"),
        type=reader.text("type"),
        actualArguments=reader.text_list("actualArguments"),
        extras=reader.extras(),
    )


def _state_from(obj: JsonDict, source: str, where: str) -> State:
    reader = _Reader(obj, source, where)
    invocation = reader.object("goalInvocation")
    return State(
        name=reader.text("name"),
        goalInvocation=(
            _goal_invocation_from(invocation, source, f"{where}.goalInvocation")
            if invocation is not None
            else None
        ),
        extras=reader.extras(),
    )


def _transition_from(obj: JsonDict, source: str, where: str) -> Transition:
    reader = _Reader(obj, source, where)
    return Transition(
        sourceState=reader.text("sourceState"),
        targetState=reader.text("targetState"),
        dataCondition=reader.optional_text("dataCondition"),
        extras=reader.extras(),
    )


def _organizer_from(obj: JsonDict, source: str, where: str) -> Organizer:
    reader = _Reader(obj, source, where)
    return Organizer(
        startState=reader.text("startState"),
        states=tuple(
            _state_from(s, source, f"{where}.states[{i}]")
            for i, s in enumerate(reader.object_list("states"))
        ),
        transitions=tuple(
            _transition_from(t, source, f"{where}.transitions[{i}]")
            for i, t in enumerate(reader.object_list("transitions"))
        ),
        extras=reader.extras(),
    )


def method_from_dict(obj: JsonDict, source: str = "method", where: str = "method") -> MethodSpec:
    reader = _Reader(obj, source, where)
    organizer = reader.object("organizer")
    return MethodSpec(
        name=reader.text("name"),
        description=reader.text("description"),
        inputParameters=tuple(
            _parameter_from(p, source, f"{where}.inputParameters[{i}]")
            for i, p in enumerate(reader.object_list("inputParameters"))
        ),
        outputParameters=tuple(
            _parameter_from(p, source, f"{where}.outputParameters[{i}]")
            for i, p in enumerate(reader.object_list("outputParameters"))
        ),
        requires=reader.text_list("requires"),
        provides=reader.text_list("provides"),
        organizer=(
            _organizer_from(organizer, source, f"{where}.organizer")
            if organizer is not None
            else None
        ),
        extras=reader.extras(),
    )


def knowledge_from_dict(obj: JsonDict, source: str = "knowledge") -> KnowledgeSpec:
    reader = _Reader(obj, source, "knowledge")

    def concept_from(c: JsonDict, where: str) -> Concept:
        sub = _Reader(c, source, where)
        return Concept(
            name=sub.text("name"),
            superConcept=sub.optional_text("superConcept"),
            properties=tuple(
                _parameter_from(p, source, f"{where}.properties[{i}]")
                for i, p in enumerate(sub.object_list("properties"))
            ),
            extras=sub.extras(),
        )

    def instance_from(i: JsonDict, where: str) -> Instance:
        sub = _Reader(i, source, where)
        values = sub.object("values")
        return Instance(
            name=sub.text("name"),
            concept=sub.text("concept"),
            values=dict(values) if values is not None else {},
            extras=sub.extras(),
        )

    def relation_from(r: JsonDict, where: str) -> Relation:
        sub = _Reader(r, source, where)
        return Relation(
            name=sub.text("name"),
            domain=sub.text("domain"),
            range=sub.text("range"),
            extras=sub.extras(),
        )

    return KnowledgeSpec(
        concepts=tuple(
            concept_from(c, f"concepts[{i}]") for i, c in enumerate(reader.object_list("concepts"))
        ),
        instances=tuple(
            instance_from(x, f"instances[{i}]")
            for i, x in enumerate(reader.object_list("instances"))
        ),
        relations=tuple(
            relation_from(r, f"relations[{i}]")
            for i, r in enumerate(reader.object_list("relations"))
        ),
        extras=reader.extras(),
    )


def methods_from_document(root: Any) -> tuple[MethodSpec, ...]:
    """Accepts a single method object or a non-empty array of them."""
    if isinstance(root, dict):
        return (method_from_dict(root, where="method"),)
    if isinstance(root, list):
        if not root or any(not isinstance(m, dict) for m in root):
            raise MissingComponent(
                "method document root must be a method object or a non-empty array of them",
                source="method",
            )
        return tuple(method_from_dict(m, where=f"method[{i}]") for i, m in enumerate(root))
    raise MissingComponent("method document root must be an object or array", source="method")


def model_from_documents(
    task_doc: Any,
    method_doc: Any,
    knowledge_doc: Any,
    skill_name: str | None = None,
    source_refs: JsonDict | None = None,
) -> TmkModel:
    """Builds a model from already-decoded JSON documents."""
    if not isinstance(task_doc, dict):
        raise MissingComponent("task document root must be an object", source="task")
    if not isinstance(knowledge_doc, dict):
        raise MissingComponent("knowledge document root must be an object", source="knowledge")
    task = task_from_dict(task_doc)
    methods = methods_from_document(method_doc)
    knowledge = knowledge_from_dict(knowledge_doc)
    return TmkModel(
        skillName=skill_name if skill_name is not None else task.name,
        task=task,
        methods=methods,
        knowledge=knowledge,
        sourceRefs=source_refs,
    )


def parse_model_bundle(
    task_text: str,
    method_text: str,
    knowledge_text: str,
    skill_name: str | None = None,
) -> TmkModel:
    """Parses the three component documents into one model.

    The skill name defaults to the task's name. The `mechanismReference`
    alias is accepted on tasks and normalized to `means`.
    """
    task_doc = _load_json(task_text, "task")
    method_doc = _load_json(method_text, "method")
    knowledge_doc = _load_json(knowledge_text, "knowledge")
    return model_from_documents(task_doc, method_doc, knowledge_doc, skill_name=skill_name)


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize_model(model: TmkModel) -> tuple[str, str, str]:
    """Canonical JSON texts (task, method, knowledge); key order is fixed.

    The method document is always an array; the `means` key is always
    canonical. parse_model_bundle(*serialize_model(m)) is structurally
    equal to m (modulo provenance).
    """
    canonical = model.to_canonical()
    return (
        _dump(canonical["task"]),
        _dump(canonical["methods"]),
        _dump(canonical["knowledge"]),
    )


def bundle_paths(directory: str | Path) -> tuple[Path, Path, Path, str]:
    """Locates the three component files in a bundle directory."""
    directory = Path(directory)
    task_files = sorted(directory.glob(f"*{TASK_SUFFIX}"))
    if not task_files:
        raise ParseError(f"no *{TASK_SUFFIX} file in {directory}", source="task")
    task_path = task_files[0]
    skill = task_path.name[: -len(TASK_SUFFIX)]
    method_path = directory / f"{skill}{METHOD_SUFFIX}"
    knowledge_path = directory / f"{skill}{KNOWLEDGE_SUFFIX}"
    for path, source in ((method_path, "method"), (knowledge_path, "knowledge")):
        if not path.is_file():
            raise ParseError(f"missing bundle file {path.name} in {directory}", source=source)
    return task_path, method_path, knowledge_path, skill


def load_bundle(directory: str | Path) -> TmkModel:
    """Loads `<skill>.task.json` + `.method.json` + `.knowledge.json` from a directory."""
    task_path, method_path, knowledge_path, skill = bundle_paths(directory)
    model = parse_model_bundle(
        task_path.read_text(encoding="utf-8"),
        method_path.read_text(encoding="utf-8"),
        knowledge_path.read_text(encoding="utf-8"),
        skill_name=skill,
    )
    refs = {
        "taskFile": str(task_path),
        "methodFile": str(method_path),
        "knowledgeFile": str(knowledge_path),
    }
    return TmkModel(
        skillName=model.skillName,
        task=model.task,
        methods=model.methods,
        knowledge=model.knowledge,
        sourceRefs=refs,
    )


def write_bundle(model: TmkModel, directory: str | Path) -> tuple[Path, Path, Path]:
    """Writes the canonical bundle files for a model into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    task_text, method_text, knowledge_text = serialize_model(model)
    paths = (
        directory / f"{model.skillName}{TASK_SUFFIX}",
        directory / f"{model.skillName}{METHOD_SUFFIX}",
        directory / f"{model.skillName}{KNOWLEDGE_SUFFIX}",
    )
    for path, text in zip(paths, (task_text, method_text, knowledge_text)):
        path.write_text(text, encoding="utf-8")
    return paths
