"""Rule-based structural metrics for a TMK model.

Covers lexical grounding against a lesson transcript, the three
cross-component binding ratios, guard non-triviality, failure-state
presence, and decomposition depth. Every aggregate comes with per-item
details from which it can be recomputed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import conditions
from .errors import ParseError
from .model import (
    JsonDict,
    MethodSpec,
    TaskSpec,
    TmkModel,
    OPERATION_GOAL_TYPE,
    TASK_GOAL_TYPE,
    is_fail_state_name,
)
from .textnorm import normalize_tokens, similarity_ratio

DEFAULT_ALIGNMENT_THRESHOLD = 0.8


@dataclass(frozen=True)
class Transcript:
    """Instructional text plus its normalized token sequence."""

    text: str
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        return cls(text=text, tokens=tuple(normalize_tokens(text)))

    @classmethod
    def from_file(cls, path: str | Path) -> "Transcript":
        """Loads plain text, or JSON of the form {"text": ...}."""
        raw = Path(path).read_text(encoding="utf-8")
        if str(path).endswith(".json"):
            doc = json.loads(raw)
            if not isinstance(doc, dict) or not isinstance(doc.get("text"), str):
                raise ParseError('transcript JSON must be an object with a "text" field')
            return cls.from_text(doc["text"])
        return cls.from_text(raw)


@dataclass(frozen=True)
class StaticReport:
    """All structural metric values for one model."""

    tmBinding: float
    mkBinding: float
    tkBinding: float
    guardLogic: float
    failureModeling: float
    hierarchyDepth: int
    alignmentScore: float | None = None
    perItemDetails: JsonDict = field(default_factory=dict)

    def to_dict(self) -> JsonDict:
        out: JsonDict = {
            "alignmentScore": self.alignmentScore,
            "tmBinding": self.tmBinding,
            "mkBinding": self.mkBinding,
            "tkBinding": self.tkBinding,
            "guardLogic": self.guardLogic,
            "failureModeling": self.failureModeling,
            "hierarchyDepth": self.hierarchyDepth,
            "perItemDetails": self.perItemDetails,
        }
        return out

    def metric_values(self) -> dict[str, float | None]:
        return {
            "alignmentScore": self.alignmentScore,
            "tmBinding": self.tmBinding,
            "mkBinding": self.mkBinding,
            "tkBinding": self.tkBinding,
            "guardLogic": self.guardLogic,
            "failureModeling": self.failureModeling,
            "hierarchyDepth": float(self.hierarchyDepth),
        }

    @classmethod
    def from_dict(cls, data: JsonDict) -> "StaticReport":
        return cls(
            alignmentScore=data.get("alignmentScore"),
            tmBinding=data["tmBinding"],
            mkBinding=data["mkBinding"],
            tkBinding=data["tkBinding"],
            guardLogic=data["guardLogic"],
            failureModeling=data["failureModeling"],
            hierarchyDepth=data["hierarchyDepth"],
            perItemDetails=data.get("perItemDetails", {}),
        )


def collect_terms(model: TmkModel) -> list[str]:
    """Model vocabulary: task, method, concept, relation, and parameter names.

    Deduplicated, first occurrence wins, deterministic order.
    """
    terms: list[str] = []
    seen: set[str] = set()

    def add(name: str) -> None:
        if name and name not in seen:
            seen.add(name)
            terms.append(name)

    for task in model.all_tasks():
        add(task.name)
    for method in model.methods:
        add(method.name)
    for concept in model.knowledge.concepts:
        add(concept.name)
    for relation in model.knowledge.relations:
        add(relation.name)
    for task in model.all_tasks():
        for param in (*task.inputParameters, *task.outputParameters):
            add(param.name)
    for method in model.methods:
        for param in (*method.inputParameters, *method.outputParameters):
            add(param.name)
    return terms


def _best_window_similarity(term_tokens: list[str], transcript_tokens: tuple[str, ...]) -> tuple[float, str]:
    """Best contiguous same-length window match for a multi-token term."""
    width = len(term_tokens)
    if width == 0:
        return 0.0, ""
    joined_term = " ".join(term_tokens)
    best = 0.0
    best_window = ""
    for start in range(len(transcript_tokens) - width + 1):
        window = " ".join(transcript_tokens[start : start + width])
        score = similarity_ratio(joined_term, window)
        if score > best:
            best = score
            best_window = window
            if best == 1.0:
                break
    return best, best_window


def instructional_alignment(
    model: TmkModel,
    transcript: Transcript,
    threshold: float = DEFAULT_ALIGNMENT_THRESHOLD,
) -> tuple[float, list[JsonDict]]:
    """Fraction of model terms lexically grounded in the transcript.

    Each term is normalized like transcript tokens and matched against the
    best same-width token window; a term is aligned when the edit-distance
    ratio reaches the threshold. An empty term set scores 0.
    """
    terms = collect_terms(model)
    details: list[JsonDict] = []
    aligned = 0
    for term in terms:
        term_tokens = normalize_tokens(term)
        best, window = _best_window_similarity(term_tokens, transcript.tokens)
        hit = best >= threshold
        aligned += hit
        details.append(
            {
                "term": term,
                "normalized": " ".join(term_tokens),
                "bestSimilarity": best,
                "bestWindow": window,
                "aligned": hit,
            }
        )
    score = aligned / len(terms) if terms else 0.0
    return score, details


def structural_bindings(model: TmkModel) -> tuple[float, float, float, JsonDict]:
    """Task-Method, Method-Knowledge, and Task-Knowledge binding ratios.

    A ratio with an empty denominator is vacuously 1.
    """
    method_names = {m.name for m in model.methods}
    concept_names = {c.name for c in model.knowledge.concepts}

    tasks = list(model.all_tasks())
    unbound_tasks = [
        t.name for t in tasks if not any(ref in method_names for ref in t.means)
    ]
    tm = 1.0 if not tasks else (len(tasks) - len(unbound_tasks)) / len(tasks)

    method_params = [
        (m.name, p)
        for m in model.methods
        for p in (*m.inputParameters, *m.outputParameters)
    ]
    untyped_method = [
        {"method": owner, "parameter": p.name, "type": p.type}
        for owner, p in method_params
        if p.type not in concept_names
    ]
    mk = 1.0 if not method_params else (len(method_params) - len(untyped_method)) / len(method_params)

    task_params = [
        (t.name, p) for t in tasks for p in (*t.inputParameters, *t.outputParameters)
    ]
    untyped_task = [
        {"task": owner, "parameter": p.name, "type": p.type}
        for owner, p in task_params
        if p.type not in concept_names
    ]
    tk = 1.0 if not task_params else (len(task_params) - len(untyped_task)) / len(task_params)

    details: JsonDict = {
        "totalTasks": len(tasks),
        "unboundTasks": unbound_tasks,
        "totalMethodParameters": len(method_params),
        "untypedMethodParameters": untyped_method,
        "totalTaskParameters": len(task_params),
        "untypedTaskParameters": untyped_task,
    }
    return tm, mk, tk, details


def guard_logic_score(
    model: TmkModel,
    trivial_prefixes: tuple[str, ...] = conditions.DEFAULT_TRIVIAL_PREFIXES,
) -> tuple[float, JsonDict]:
    """Fraction of transitions guarded by non-trivial conditions.

    An unparseable or missing guard counts as trivial and is flagged.
    Vacuously 1 when the model has no transitions.
    """
    total = 0
    trivial: list[JsonDict] = []
    for m_index, method in enumerate(model.methods):
        if method.organizer is None:
            continue
        for t_index, transition in enumerate(method.organizer.transitions):
            total += 1
            path = f"/methods/{m_index}/organizer/transitions/{t_index}/dataCondition"
            text = transition.dataCondition
            if not text:
                trivial.append({"path": path, "condition": text or "", "reason": "missing"})
                continue
            try:
                ast = conditions.parse_condition(text)
            except ParseError:
                trivial.append({"path": path, "condition": text, "reason": "unparseable"})
                continue
            if conditions.is_trivial(ast, trivial_prefixes):
                trivial.append({"path": path, "condition": text, "reason": "trivial"})
    score = 1.0 if total == 0 else (total - len(trivial)) / total
    details: JsonDict = {"totalTransitions": total, "trivialTransitions": trivial}
    return score, details


def failure_modeling(model: TmkModel) -> tuple[float, JsonDict]:
    """Mean presence of a Fail state across organizers.

    A Fail state is recognized by the naming rule or by a FailureGoal
    invocation; Fail-named states lacking the invocation are flagged as
    warnings in the details.
    """
    organizers: list[JsonDict] = []
    warnings: list[JsonDict] = []
    present = 0
    for method in model.methods:
        if method.organizer is None:
            continue
        fail_states = [s.name for s in method.organizer.states if s.is_fail]
        organizers.append(
            {"method": method.name, "hasFailState": bool(fail_states), "failStates": fail_states}
        )
        present += bool(fail_states)
        for state in method.organizer.states:
            if is_fail_state_name(state.name):
                inv = state.goalInvocation
                if inv is None or inv.goalReference != "FailureGoal":
                    warnings.append(
                        {"method": method.name, "state": state.name,
                         "warning": "fail state does not invoke FailureGoal"}
                    )
    score = 1.0 if not organizers else present / len(organizers)
    return score, {"organizers": organizers, "warnings": warnings}


@dataclass(frozen=True)
class DecompositionNode:
    """One node of the task-method decomposition tree."""

    kind: str  # "task" | "method" | "operation"
    name: str
    children: tuple["DecompositionNode", ...] = ()
    annotation: str | None = None  # "cycle" | "unresolved"

    def to_dict(self) -> JsonDict:
        out: JsonDict = {"kind": self.kind, "name": self.name}
        if self.annotation:
            out["annotation"] = self.annotation
        out["children"] = [c.to_dict() for c in self.children]
        return out


def _node_depth(node: DecompositionNode) -> int:
    own = 1 if node.kind in (TASK_GOAL_TYPE, OPERATION_GOAL_TYPE) else 0
    return own + max((_node_depth(c) for c in node.children), default=0)


def hierarchy_depth(model: TmkModel) -> tuple[int, DecompositionNode, list[str]]:
    """Maximum count of task/operation nodes on any root-to-leaf path.

    The tree roots at the top-level task; tasks expand into their means
    methods, methods into the goals their organizer states invoke.
    Task-type invocations recurse; operation-type invocations are leaves.
    Cycles are cut at the first revisited task.
    """
    warnings: list[str] = []
    task_index: dict[str, TaskSpec] = {}
    for task in model.all_tasks():
        task_index.setdefault(task.name, task)

    def build_task(task: TaskSpec, on_path: frozenset[str]) -> DecompositionNode:
        children = []
        for reference in task.means:
            method = model.method_named(reference)
            if method is None:
                children.append(
                    DecompositionNode("method", reference, annotation="unresolved")
                )
            else:
                children.append(build_method(method, on_path))
        return DecompositionNode(TASK_GOAL_TYPE, task.name, tuple(children))

    def build_method(method: MethodSpec, on_path: frozenset[str]) -> DecompositionNode:
        children = []
        if method.organizer is not None:
            for state in method.organizer.states:
                inv = state.goalInvocation
                if inv is None:
                    continue
                if inv.type == OPERATION_GOAL_TYPE:
                    children.append(DecompositionNode(OPERATION_GOAL_TYPE, inv.goalReference))
                elif inv.type == TASK_GOAL_TYPE:
                    name = inv.goalReference
                    if name in on_path:
                        warnings.append(f"decomposition cycle cut at task '{name}'")
                        children.append(
                            DecompositionNode(TASK_GOAL_TYPE, name, annotation="cycle")
                        )
                    elif name in task_index:
                        children.append(
                            build_task(task_index[name], on_path | {name})
                        )
                    else:
                        children.append(
                            DecompositionNode(TASK_GOAL_TYPE, name, annotation="unresolved")
                        )
        return DecompositionNode("method", method.name, tuple(children))

    root = build_task(model.task, frozenset({model.task.name}))
    return _node_depth(root), root, warnings


def analyze(
    model: TmkModel,
    transcript: Transcript | None = None,
    alignment_threshold: float = DEFAULT_ALIGNMENT_THRESHOLD,
    trivial_prefixes: tuple[str, ...] = conditions.DEFAULT_TRIVIAL_PREFIXES,
) -> StaticReport:
    """Composes every structural metric into one report.

    The alignment score is absent when no transcript is supplied.
    """
    alignment_score = None
    alignment_details: list[JsonDict] | None = None
    if transcript is not None:
        alignment_score, alignment_details = instructional_alignment(
            model, transcript, alignment_threshold
        )
    tm, mk, tk, binding_details = structural_bindings(model)
    guard_score, guard_details = guard_logic_score(model, trivial_prefixes)
    failure_score, failure_details = failure_modeling(model)
    depth, tree, depth_warnings = hierarchy_depth(model)
    return StaticReport(
        alignmentScore=alignment_score,
        tmBinding=tm,
        mkBinding=mk,
        tkBinding=tk,
        guardLogic=guard_score,
        failureModeling=failure_score,
        hierarchyDepth=depth,
        perItemDetails={
            "alignment": alignment_details,
            "bindings": binding_details,
            "guards": guard_details,
            "failure": failure_details,
            "hierarchy": {"tree": tree.to_dict(), "warnings": depth_warnings},
        },
    )
