"""Domain types for Task-Method-Knowledge (TMK) skill models.

All types are frozen dataclasses: construct once, share freely across
threads. Sequences are stored as tuples so equality is structural. Field
names mirror the wire keys exactly (camelCase) so that field paths used in
validation, flattening, and diffing read the same as the JSON documents.
Unknown JSON keys survive in each node's `extras` map and are emitted back
on serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator

JsonDict = dict[str, Any]

TASK_GOAL_TYPE = "task"
OPERATION_GOAL_TYPE = "operation"
FAILURE_GOAL = "FailureGoal"


def is_done_state_name(name: str) -> bool:
    """Done-state naming rule: exactly "Done" or "<prefix>_Done" (case-sensitive)."""
    return name == "Done" or name.endswith("_Done")


def is_fail_state_name(name: str) -> bool:
    """Fail-state naming rule: exactly "Fail" or "<prefix>_Fail" (case-sensitive)."""
    return name == "Fail" or name.endswith("_Fail")


def _canonical_extras(extras: JsonDict) -> Iterator[tuple[str, Any]]:
    return iter(sorted(extras.items()))


@dataclass(frozen=True)
class Parameter:
    """A typed name; used for task/method parameters and concept properties."""

    name: str
    type: str
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {"name": self.name, "type": self.type}
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class GoalInvocation:
    goalReference: str
    type: str
    actualArguments: tuple[str, ...] = ()
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "goalReference": self.goalReference,
            "type": self.type,
            "actualArguments": list(self.actualArguments),
        }
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class State:
    name: str
    goalInvocation: GoalInvocation | None = None
    extras: JsonDict = field(default_factory=dict)

    @property
    def is_done(self) -> bool:
        return is_done_state_name(self.name)

    @property
    def is_fail(self) -> bool:
        if is_fail_state_name(self.name):
            return True
        inv = self.goalInvocation
        return inv is not None and inv.goalReference == FAILURE_GOAL

    @property
    def is_terminal(self) -> bool:
        return self.is_done or self.is_fail

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {"name": self.name}
        if self.goalInvocation is not None:
            out["goalInvocation"] = self.goalInvocation.to_canonical()
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class Transition:
    sourceState: str
    targetState: str
    dataCondition: str | None = None
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {"sourceState": self.sourceState, "targetState": self.targetState}
        if self.dataCondition is not None:
            out["dataCondition"] = self.dataCondition
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class Organizer:
    """A method's finite-state machine: states invoking goals, guarded transitions."""

    startState: str
    states: tuple[State, ...] = ()
    transitions: tuple[Transition, ...] = ()
    extras: JsonDict = field(default_factory=dict)

    def state_named(self, name: str) -> State | None:
        for state in self.states:
            if state.name == name:
                return state
        return None

    def outgoing(self, state_name: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.sourceState == state_name)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "startState": self.startState,
            "states": [s.to_canonical() for s in self.states],
            "transitions": [t.to_canonical() for t in self.transitions],
        }
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class TaskSpec:
    name: str
    description: str = ""
    inputParameters: tuple[Parameter, ...] = ()
    outputParameters: tuple[Parameter, ...] = ()
    given: tuple[str, ...] = ()
    makes: tuple[str, ...] = ()
    means: tuple[str, ...] = ()
    subtasks: tuple["TaskSpec", ...] = ()
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "name": self.name,
            "description": self.description,
            "inputParameters": [p.to_canonical() for p in self.inputParameters],
            "outputParameters": [p.to_canonical() for p in self.outputParameters],
            "given": list(self.given),
            "makes": list(self.makes),
            "means": list(self.means),
        }
        if self.subtasks:
            out["subtasks"] = [t.to_canonical() for t in self.subtasks]
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class MethodSpec:
    name: str
    description: str = ""
    inputParameters: tuple[Parameter, ...] = ()
    outputParameters: tuple[Parameter, ...] = ()
    requires: tuple[str, ...] = ()
    provides: tuple[str, ...] = ()
    organizer: Organizer | None = None
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "name": self.name,
            "description": self.description,
            "inputParameters": [p.to_canonical() for p in self.inputParameters],
            "outputParameters": [p.to_canonical() for p in self.outputParameters],
            "requires": list(self.requires),
            "provides": list(self.provides),
        }
        if self.organizer is not None:
            out["organizer"] = self.organizer.to_canonical()
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class Concept:
    name: str
    superConcept: str | None = None
    properties: tuple[Parameter, ...] = ()
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {"name": self.name}
        if self.superConcept is not None:
            out["superConcept"] = self.superConcept
        out["properties"] = [p.to_canonical() for p in self.properties]
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class Instance:
    name: str
    concept: str
    values: JsonDict = field(default_factory=dict)
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "name": self.name,
            "concept": self.concept,
            "values": dict(sorted(self.values.items())),
        }
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class Relation:
    name: str
    domain: str
    range: str
    extras: JsonDict = field(default_factory=dict)

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {"name": self.name, "domain": self.domain, "range": self.range}
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class KnowledgeSpec:
    concepts: tuple[Concept, ...] = ()
    instances: tuple[Instance, ...] = ()
    relations: tuple[Relation, ...] = ()
    extras: JsonDict = field(default_factory=dict)

    def concept_named(self, name: str) -> Concept | None:
        for concept in self.concepts:
            if concept.name == name:
                return concept
        return None

    def to_canonical(self) -> JsonDict:
        out: JsonDict = {
            "concepts": [c.to_canonical() for c in self.concepts],
            "instances": [i.to_canonical() for i in self.instances],
            "relations": [r.to_canonical() for r in self.relations],
        }
        out.update(_canonical_extras(self.extras))
        return out


@dataclass(frozen=True)
class TmkModel:
    """One skill's three-component bundle plus optional provenance."""

    skillName: str
    task: TaskSpec
    methods: tuple[MethodSpec, ...]
    knowledge: KnowledgeSpec
    sourceRefs: JsonDict | None = None

    def method_named(self, name: str) -> MethodSpec | None:
        for method in self.methods:
            if method.name == name:
                return method
        return None

    def all_tasks(self) -> Iterator[TaskSpec]:
        """Root task followed by subtasks, depth-first in declaration order."""

        def walk(task: TaskSpec) -> Iterator[TaskSpec]:
            yield task
            for sub in task.subtasks:
                yield from walk(sub)

        yield from walk(self.task)

    def task_named(self, name: str) -> TaskSpec | None:
        for task in self.all_tasks():
            if task.name == name:
                return task
        return None

    def to_canonical(self) -> JsonDict:
        """Whole bundle as one JSON-able dict (provenance excluded)."""
        return {
            "skillName": self.skillName,
            "task": self.task.to_canonical(),
            "methods": [m.to_canonical() for m in self.methods],
            "knowledge": self.knowledge.to_canonical(),
        }


Component = TaskSpec | MethodSpec | KnowledgeSpec


def flatten_json(value: Any, prefix: str = "") -> list[tuple[str, str]]:
    """Depth-first enumeration of leaf fields of a JSON-able value.

    Path syntax: dotted keys with bracketed list indexes, e.g.
    "organizer.transitions[0].dataCondition". Scalars other than strings
    are rendered as JSON so the output is always (path, text) pairs.
    """
    leaves: list[tuple[str, str]] = []
    if isinstance(value, dict):
        for key, item in value.items():
            sub = f"{prefix}.{key}" if prefix else key
            leaves.extend(flatten_json(item, sub))
    elif isinstance(value, (list, tuple)):
        for index, item in enumerate(value):
            leaves.extend(flatten_json(item, f"{prefix}[{index}]"))
    else:
        text = value if isinstance(value, str) else json.dumps(value)
        leaves.append((prefix, text))
    return leaves


def canonical_flatten(component: Component) -> list[tuple[str, str]]:
    """Deterministic (fieldPath, text) pairs for one component's leaf fields."""
    return flatten_json(component.to_canonical())


def overall_text(component: Component) -> str:
    """All leaf texts of a component joined in path order."""
    return " ".join(text for _, text in canonical_flatten(component))
