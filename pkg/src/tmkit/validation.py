"""Schema validation for TMK models.

Every problem is a report entry, never an exception: error-severity entries
make the model invalid, warning-severity entries flag tolerated drift
(unknown fields, unparseable precondition text, suspicious Fail states).
Violation paths are JSON-pointer style, rooted at the bundle:
"/methods/0/organizer/transitions/1/dataCondition".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from . import conditions
from .errors import ParseError
from .model import (
    JsonDict,
    MethodSpec,
    Organizer,
    TaskSpec,
    TmkModel,
    is_fail_state_name,
)


class Code(str, Enum):
    # Error severity.
    EMPTY_SKILL_NAME = "EMPTY_SKILL_NAME"
    EMPTY_TASK_NAME = "EMPTY_TASK_NAME"
    EMPTY_METHOD_NAME = "EMPTY_METHOD_NAME"
    EMPTY_CONCEPT_NAME = "EMPTY_CONCEPT_NAME"
    EMPTY_PARAMETER_FIELD = "EMPTY_PARAMETER_FIELD"
    EMPTY_RELATION_FIELD = "EMPTY_RELATION_FIELD"
    DUPLICATE_PARAMETER_NAME = "DUPLICATE_PARAMETER_NAME"
    DUPLICATE_STATE_NAME = "DUPLICATE_STATE_NAME"
    DUPLICATE_CONCEPT_NAME = "DUPLICATE_CONCEPT_NAME"
    MISSING_MEANS = "MISSING_MEANS"
    DANGLING_MEANS = "DANGLING_MEANS"
    DANGLING_START_STATE = "DANGLING_START_STATE"
    DANGLING_TRANSITION_ENDPOINT = "DANGLING_TRANSITION_ENDPOINT"
    MISSING_DATA_CONDITION = "MISSING_DATA_CONDITION"
    MISSING_DONE_STATE = "MISSING_DONE_STATE"
    MISSING_FAIL_STATE = "MISSING_FAIL_STATE"
    CYCLIC_SUPER_CONCEPT = "CYCLIC_SUPER_CONCEPT"
    DANGLING_INSTANCE_CONCEPT = "DANGLING_INSTANCE_CONCEPT"
    DANGLING_RELATION_CONCEPT = "DANGLING_RELATION_CONCEPT"
    UNKNOWN_INSTANCE_PROPERTY = "UNKNOWN_INSTANCE_PROPERTY"
    # Warning severity.
    UNKNOWN_FIELD = "UNKNOWN_FIELD"
    UNPARSEABLE_CONDITION = "UNPARSEABLE_CONDITION"
    FAIL_STATE_WITHOUT_FAILURE_GOAL = "FAIL_STATE_WITHOUT_FAILURE_GOAL"
    NO_ORGANIZER = "NO_ORGANIZER"


ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str
    severity: str = ERROR

    def to_dict(self) -> JsonDict:
        return {
            "code": self.code,
            "path": self.path,
            "message": self.message,
            "severity": self.severity,
        }


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not any(v.severity == ERROR for v in self.violations)

    def error_codes(self) -> set[str]:
        return {v.code for v in self.violations if v.severity == ERROR}

    def warning_codes(self) -> set[str]:
        return {v.code for v in self.violations if v.severity == WARNING}

    def to_dict(self) -> JsonDict:
        return {
            "valid": self.valid,
            "violations": [v.to_dict() for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _Collector:
    def __init__(self) -> None:
        self.violations: list[Violation] = []

    def error(self, code: Code, path: str, message: str) -> None:
        self.violations.append(Violation(code.value, path, message, ERROR))

    def warning(self, code: Code, path: str, message: str) -> None:
        self.violations.append(Violation(code.value, path, message, WARNING))

    def unknown_fields(self, extras: JsonDict, path: str) -> None:
        for key in sorted(extras):
            self.warning(Code.UNKNOWN_FIELD, f"{path}/{key}", f"unknown field '{key}' preserved")

    def condition_text(self, text: str | None, path: str) -> None:
        if not text:
            return
        try:
            conditions.parse_condition(text)
        except ParseError as exc:
            self.warning(Code.UNPARSEABLE_CONDITION, path, f"condition does not parse: {exc}")


def _check_parameters(out: _Collector, params, path: str, owner: str) -> None:
    seen: set[str] = set()
    for index, param in enumerate(params):
        p_path = f"{path}/{index}"
        if not param.name or not param.type:
            out.error(
                Code.EMPTY_PARAMETER_FIELD,
                p_path,
                f"parameter of {owner} must have non-empty name and type",
            )
        if param.name and param.name in seen:
            out.error(
                Code.DUPLICATE_PARAMETER_NAME,
                f"{p_path}/name",
                f"duplicate parameter name '{param.name}' in {owner}",
            )
        seen.add(param.name)
        out.unknown_fields(param.extras, p_path)


def _check_task(out: _Collector, task: TaskSpec, path: str, method_names: set[str]) -> None:
    if not task.name:
        out.error(Code.EMPTY_TASK_NAME, f"{path}/name", "task name must be non-empty")
    # Parameter names are unique within a task across inputs and outputs.
    seen: set[str] = set()
    for group, params in (("inputParameters", task.inputParameters),
                          ("outputParameters", task.outputParameters)):
        for index, param in enumerate(params):
            p_path = f"{path}/{group}/{index}"
            if not param.name or not param.type:
                out.error(
                    Code.EMPTY_PARAMETER_FIELD,
                    p_path,
                    f"parameter of task '{task.name}' must have non-empty name and type",
                )
            if param.name and param.name in seen:
                out.error(
                    Code.DUPLICATE_PARAMETER_NAME,
                    f"{p_path}/name",
                    f"duplicate parameter name '{param.name}' in task '{task.name}'",
                )
            seen.add(param.name)
            out.unknown_fields(param.extras, p_path)
    if not task.means:
        out.error(
            Code.MISSING_MEANS,
            f"{path}/means",
            f"task '{task.name}' must reference at least one method",
        )
    for index, reference in enumerate(task.means):
        if reference not in method_names:
            out.error(
                Code.DANGLING_MEANS,
                f"{path}/means/{index}",
                f"task '{task.name}' references unknown method '{reference}'",
            )
    for group, texts in (("given", task.given), ("makes", task.makes)):
        for index, text in enumerate(texts):
            out.condition_text(text, f"{path}/{group}/{index}")
    out.unknown_fields(task.extras, path)
    for index, subtask in enumerate(task.subtasks):
        _check_task(out, subtask, f"{path}/subtasks/{index}", method_names)


def _check_organizer(out: _Collector, organizer: Organizer, path: str, method: MethodSpec) -> None:
    state_names: set[str] = set()
    has_done = False
    has_fail = False
    for index, state in enumerate(organizer.states):
        s_path = f"{path}/states/{index}"
        if state.name in state_names:
            out.error(
                Code.DUPLICATE_STATE_NAME,
                f"{s_path}/name",
                f"duplicate state name '{state.name}' in organizer of '{method.name}'",
            )
        state_names.add(state.name)
        has_done = has_done or state.is_done
        has_fail = has_fail or state.is_fail
        if is_fail_state_name(state.name):
            inv = state.goalInvocation
            if inv is None or inv.goalReference != "FailureGoal":
                out.warning(
                    Code.FAIL_STATE_WITHOUT_FAILURE_GOAL,
                    f"{s_path}/goalInvocation",
                    f"fail state '{state.name}' does not invoke FailureGoal",
                )
        if state.goalInvocation is not None:
            out.unknown_fields(state.goalInvocation.extras, f"{s_path}/goalInvocation")
        out.unknown_fields(state.extras, s_path)
    if organizer.startState not in state_names:
        out.error(
            Code.DANGLING_START_STATE,
            f"{path}/startState",
            f"startState '{organizer.startState}' is not a declared state",
        )
    if not has_done:
        out.error(
            Code.MISSING_DONE_STATE,
            f"{path}/states",
            f"organizer of '{method.name}' has no Done state",
        )
    if not has_fail:
        out.error(
            Code.MISSING_FAIL_STATE,
            f"{path}/states",
            f"organizer of '{method.name}' has no Fail state",
        )
    for index, transition in enumerate(organizer.transitions):
        t_path = f"{path}/transitions/{index}"
        for endpoint in ("sourceState", "targetState"):
            name = getattr(transition, endpoint)
            if name not in state_names:
                out.error(
                    Code.DANGLING_TRANSITION_ENDPOINT,
                    f"{t_path}/{endpoint}",
                    f"transition {endpoint} '{name}' is not a declared state",
                )
        if not transition.dataCondition:
            out.error(
                Code.MISSING_DATA_CONDITION,
                f"{t_path}/dataCondition",
                "every transition must carry a non-empty dataCondition",
            )
        else:
            out.condition_text(transition.dataCondition, f"{t_path}/dataCondition")
        out.unknown_fields(transition.extras, t_path)
    out.unknown_fields(organizer.extras, path)


def _check_method(out: _Collector, method: MethodSpec, path: str) -> None:
    if not method.name:
        out.error(Code.EMPTY_METHOD_NAME, f"{path}/name", "method name must be non-empty")
    _check_parameters(out, method.inputParameters, f"{path}/inputParameters",
                      f"method '{method.name}'")
    _check_parameters(out, method.outputParameters, f"{path}/outputParameters",
                      f"method '{method.name}'")
    for group, texts in (("requires", method.requires), ("provides", method.provides)):
        for index, text in enumerate(texts):
            out.condition_text(text, f"{path}/{group}/{index}")
    if method.organizer is None:
        out.warning(
            Code.NO_ORGANIZER,
            f"{path}/organizer",
            f"method '{method.name}' has no organizer",
        )
    else:
        _check_organizer(out, method.organizer, f"{path}/organizer", method)
    out.unknown_fields(method.extras, path)


def _check_knowledge(out: _Collector, model: TmkModel) -> None:
    knowledge = model.knowledge
    path = "/knowledge"
    concept_names: set[str] = set()
    for index, concept in enumerate(knowledge.concepts):
        c_path = f"{path}/concepts/{index}"
        if not concept.name:
            out.error(Code.EMPTY_CONCEPT_NAME, f"{c_path}/name", "concept name must be non-empty")
        elif concept.name in concept_names:
            out.error(
                Code.DUPLICATE_CONCEPT_NAME,
                f"{c_path}/name",
                f"duplicate concept name '{concept.name}'",
            )
        concept_names.add(concept.name)
        _check_parameters(out, concept.properties, f"{c_path}/properties",
                          f"concept '{concept.name}'")
        out.unknown_fields(concept.extras, c_path)

    # superConcept chains must be acyclic.
    parents = {c.name: c.superConcept for c in knowledge.concepts}
    flagged: set[str] = set()
    for index, concept in enumerate(knowledge.concepts):
        seen = {concept.name}
        current = concept.superConcept
        while current is not None and current in parents:
            if current in seen:
                if concept.name not in flagged:
                    out.error(
                        Code.CYCLIC_SUPER_CONCEPT,
                        f"{path}/concepts/{index}/superConcept",
                        f"superConcept chain starting at '{concept.name}' forms a cycle",
                    )
                    flagged.update(seen)
                break
            seen.add(current)
            current = parents.get(current)

    def own_properties(concept_name: str) -> set[str]:
        names: set[str] = set()
        seen: set[str] = set()
        current: str | None = concept_name
        while current is not None and current not in seen:
            seen.add(current)
            concept = knowledge.concept_named(current)
            if concept is None:
                break
            names.update(p.name for p in concept.properties)
            current = concept.superConcept
        return names

    for index, instance in enumerate(knowledge.instances):
        i_path = f"{path}/instances/{index}"
        if instance.concept not in concept_names:
            out.error(
                Code.DANGLING_INSTANCE_CONCEPT,
                f"{i_path}/concept",
                f"instance '{instance.name}' names undeclared concept '{instance.concept}'",
            )
        else:
            known = own_properties(instance.concept)
            for key in sorted(instance.values):
                if key not in known:
                    out.error(
                        Code.UNKNOWN_INSTANCE_PROPERTY,
                        f"{i_path}/values/{key}",
                        f"'{key}' is not a property of concept '{instance.concept}'",
                    )
        out.unknown_fields(instance.extras, i_path)

    for index, relation in enumerate(knowledge.relations):
        r_path = f"{path}/relations/{index}"
        if not (relation.name and relation.domain and relation.range):
            out.error(
                Code.EMPTY_RELATION_FIELD,
                r_path,
                "relation must have non-empty name, domain, and range",
            )
        for side in ("domain", "range"):
            value = getattr(relation, side)
            if value and value not in concept_names:
                out.error(
                    Code.DANGLING_RELATION_CONCEPT,
                    f"{r_path}/{side}",
                    f"relation '{relation.name}' {side} names undeclared concept '{value}'",
                )
        out.unknown_fields(relation.extras, r_path)
    out.unknown_fields(knowledge.extras, path)


def validate_schema(model: TmkModel) -> ValidationReport:
    """Checks a parsed model against the normative schema and mandatory patterns."""
    out = _Collector()
    if not model.skillName:
        out.error(Code.EMPTY_SKILL_NAME, "/skillName", "skill name must be non-empty")
    method_names = {m.name for m in model.methods}
    _check_task(out, model.task, "/task", method_names)
    for index, method in enumerate(model.methods):
        _check_method(out, method, f"/methods/{index}")
    _check_knowledge(out, model)
    return ValidationReport(violations=tuple(out.violations))
