"""Execution engine for method organizers.

`trace` walks an organizer against a predicate environment, recording every
guard evaluation and recursing into task-type goal invocations.
`enumerate_outcomes` is a deliberately separate brute-force interpreter used
as an oracle in tests: it re-implements the walk and the guard semantics
without sharing code with `trace`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import conditions
from .conditions import ConditionAst, PredicateEnv
from .errors import GuardParseError, ParseError, TooManyPredicates, UnknownMethod
from .model import JsonDict, MethodSpec, Organizer, State, TmkModel, TASK_GOAL_TYPE

DEFAULT_STEP_LIMIT = 256
MAX_PREDICATES = 16


class Outcome(str, Enum):
    DONE = "Done"
    FAIL = "Fail"
    STUCK = "Stuck"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class TransitionEval:
    condition: str
    targetState: str
    result: bool

    def to_dict(self) -> JsonDict:
        return {"condition": self.condition, "targetState": self.targetState,
                "result": self.result}


@dataclass(frozen=True)
class TraceStep:
    stateName: str
    invokedGoal: JsonDict | None = None
    evaluatedTransitions: tuple[TransitionEval, ...] = ()
    subTrace: "ExecutionTrace | None" = None
    unexploredMeans: tuple[str, ...] = ()

    def to_dict(self) -> JsonDict:
        out: JsonDict = {
            "stateName": self.stateName,
            "invokedGoal": self.invokedGoal,
            "evaluatedTransitions": [e.to_dict() for e in self.evaluatedTransitions],
        }
        if self.subTrace is not None:
            out["subTrace"] = self.subTrace.to_dict()
        if self.unexploredMeans:
            out["unexploredMeans"] = list(self.unexploredMeans)
        return out


@dataclass(frozen=True)
class ExecutionTrace:
    methodName: str
    steps: tuple[TraceStep, ...]
    outcome: Outcome
    warnings: tuple[str, ...] = ()
    requiresEvaluated: tuple[tuple[str, bool | None], ...] = ()

    def to_dict(self) -> JsonDict:
        return {
            "methodName": self.methodName,
            "steps": [s.to_dict() for s in self.steps],
            "outcome": self.outcome.value,
            "warnings": list(self.warnings),
            "requiresEvaluated": [
                {"condition": text, "result": result} for text, result in self.requiresEvaluated
            ],
        }


@dataclass(frozen=True)
class ReachabilityReport:
    doneReachable: bool
    failReachable: bool
    unreachableStates: tuple[str, ...]
    deadEndStates: tuple[str, ...]

    def to_dict(self) -> JsonDict:
        return {
            "doneReachable": self.doneReachable,
            "failReachable": self.failReachable,
            "unreachableStates": list(self.unreachableStates),
            "deadEndStates": list(self.deadEndStates),
        }


def _parse_guards(
    organizer: Organizer, method_index: int
) -> list[tuple[int, ConditionAst]]:
    """Pre-parses every guard; raises GuardParseError with the transition path."""
    parsed = []
    for index, transition in enumerate(organizer.transitions):
        path = f"/methods/{method_index}/organizer/transitions/{index}/dataCondition"
        text = transition.dataCondition or ""
        try:
            parsed.append((index, conditions.parse_condition(text)))
        except ParseError as exc:
            raise GuardParseError(f"guard does not parse: {exc}", path=path) from exc
    return parsed


def _evaluate_requires(method: MethodSpec, env: PredicateEnv) -> tuple[tuple[str, bool | None], ...]:
    """Annotation only: requires clauses are recorded, never gate the walk."""
    results: list[tuple[str, bool | None]] = []
    lenient = PredicateEnv(assignments=env.assignments, strict=False)
    for text in method.requires:
        try:
            results.append((text, conditions.evaluate(conditions.parse_condition(text), lenient)))
        except ParseError:
            results.append((text, None))
    return tuple(results)


def trace(
    model: TmkModel,
    method_name: str,
    env: PredicateEnv,
    step_limit: int = DEFAULT_STEP_LIMIT,
    _active_tasks: frozenset[str] = frozenset(),
) -> ExecutionTrace:
    """Walks a method's organizer from its start state.

    At each state, all outgoing transitions are evaluated in declaration
    order and the first true one is taken; extra true transitions produce a
    nondeterminism warning. Task-type goal invocations recurse into the
    invoked task's first resolvable means method; remaining means entries
    are recorded as unexplored. The walk halts at a Done/Fail state, when no
    transition fires (Stuck), or at the step limit.
    """
    method = model.method_named(method_name)
    if method is None:
        raise UnknownMethod(f"no method named '{method_name}'")
    method_index = model.methods.index(method)
    organizer = method.organizer
    if organizer is None:
        raise UnknownMethod(f"method '{method_name}' has no organizer")
    guards = dict(_parse_guards(organizer, method_index))

    warnings: list[str] = []
    steps: list[TraceStep] = []
    outcome = Outcome.STEP_LIMIT
    state = organizer.state_named(organizer.startState)
    if state is None:
        raise UnknownMethod(
            f"method '{method_name}' startState '{organizer.startState}' is not declared"
        )

    for _ in range(step_limit):
        invoked, sub_trace, unexplored = _invocation(
            model, state, env, step_limit, _active_tasks, warnings
        )
        if state.is_done or state.is_fail:
            steps.append(TraceStep(state.name, invoked, (), sub_trace, unexplored))
            outcome = Outcome.DONE if state.is_done else Outcome.FAIL
            break

        outgoing = [
            (index, transition)
            for index, transition in enumerate(organizer.transitions)
            if transition.sourceState == state.name
        ]
        evals = []
        chosen = None
        extra_true: list[str] = []
        for index, transition in outgoing:
            result = conditions.evaluate(guards[index], env)
            evals.append(
                TransitionEval(transition.dataCondition or "", transition.targetState, result)
            )
            if result:
                if chosen is None:
                    chosen = transition
                else:
                    extra_true.append(transition.targetState)
        steps.append(TraceStep(state.name, invoked, tuple(evals), sub_trace, unexplored))
        if extra_true:
            warnings.append(
                f"nondeterministic choice at state '{state.name}': "
                f"took first true transition, skipped true transitions to "
                + ", ".join(f"'{t}'" for t in extra_true)
            )
        if chosen is None:
            outcome = Outcome.STUCK
            break
        next_state = organizer.state_named(chosen.targetState)
        if next_state is None:
            warnings.append(
                f"transition from '{state.name}' targets undeclared state "
                f"'{chosen.targetState}'; walk stuck"
            )
            outcome = Outcome.STUCK
            break
        state = next_state

    return ExecutionTrace(
        methodName=method_name,
        steps=tuple(steps),
        outcome=outcome,
        warnings=tuple(warnings),
        requiresEvaluated=_evaluate_requires(method, env),
    )


def _invocation(
    model: TmkModel,
    state: State,
    env: PredicateEnv,
    step_limit: int,
    active_tasks: frozenset[str],
    warnings: list[str],
) -> tuple[JsonDict | None, ExecutionTrace | None, tuple[str, ...]]:
    """Resolves a state's goal invocation, recursing into task-type goals."""
    inv = state.goalInvocation
    if inv is None:
        return None, None, ()
    invoked = inv.to_canonical()
    if inv.type != TASK_GOAL_TYPE:
        return invoked, None, ()
    task = model.task_named(inv.goalReference)
    if task is None:
        return invoked, None, ()
    if task.name in active_tasks:
        warnings.append(f"recursive invocation of task '{task.name}' cut")
        return invoked, None, ()
    resolvable = [ref for ref in task.means if model.method_named(ref) is not None]
    if not resolvable:
        return invoked, None, tuple(task.means)
    first, rest = resolvable[0], tuple(resolvable[1:])
    sub = trace(model, first, env, step_limit, active_tasks | {task.name})
    return invoked, sub, rest


def check_reachability(organizer: Organizer) -> ReachabilityReport:
    """Graph search over transitions, ignoring guard truth.

    An edge exists unless its guard is the literal `false`; unparseable
    guards keep their edge. Dead ends are non-terminal states with no
    outgoing edge in that pruned graph.
    """
    edges: dict[str, list[str]] = {state.name: [] for state in organizer.states}
    for transition in organizer.transitions:
        text = transition.dataCondition or ""
        try:
            ast = conditions.parse_condition(text)
            if isinstance(ast, conditions.LiteralFalse):
                continue
        except ParseError:
            pass
        if transition.sourceState in edges:
            edges[transition.sourceState].append(transition.targetState)

    reachable: set[str] = set()
    frontier = [organizer.startState] if organizer.state_named(organizer.startState) else []
    while frontier:
        name = frontier.pop()
        if name in reachable:
            continue
        reachable.add(name)
        frontier.extend(t for t in edges.get(name, ()) if t not in reachable)

    states = organizer.states
    done_reachable = any(s.is_done for s in states if s.name in reachable)
    fail_reachable = any(s.is_fail for s in states if s.name in reachable)
    unreachable = tuple(s.name for s in states if s.name not in reachable)
    dead_ends = tuple(
        s.name for s in states if not s.is_terminal and not edges.get(s.name)
    )
    return ReachabilityReport(
        doneReachable=done_reachable,
        failReachable=fail_reachable,
        unreachableStates=unreachable,
        deadEndStates=dead_ends,
    )


@dataclass(frozen=True)
class OutcomeRow:
    assignment: tuple[bool, ...]
    outcome: Outcome

    def to_dict(self) -> JsonDict:
        return {"assignment": list(self.assignment), "outcome": self.outcome.value}


@dataclass(frozen=True)
class OutcomeTable:
    """Brute-force outcome for every boolean assignment of the guard predicates."""

    predicates: tuple[str, ...]
    rows: tuple[OutcomeRow, ...]

    def outcome_for(self, mapping: dict[str, bool]) -> Outcome:
        assignment = tuple(mapping[name] for name in self.predicates)
        for row in self.rows:
            if row.assignment == assignment:
                return row.outcome
        raise KeyError(f"no row for assignment {mapping!r}")

    def to_dict(self) -> JsonDict:
        return {"predicates": list(self.predicates), "rows": [r.to_dict() for r in self.rows]}


def _oracle_eval(node: ConditionAst, truth: dict[conditions.Signature, bool]) -> bool:
    # Independent of conditions.evaluate on purpose: this is the oracle side.
    if isinstance(node, conditions.LiteralTrue):
        return True
    if isinstance(node, conditions.LiteralFalse):
        return False
    if isinstance(node, conditions.Predicate):
        return truth[(node.name, node.args)]
    if isinstance(node, conditions.Not):
        return not _oracle_eval(node.child, truth)
    if isinstance(node, conditions.And):
        return _oracle_eval(node.left, truth) and _oracle_eval(node.right, truth)
    if isinstance(node, conditions.Or):
        return _oracle_eval(node.left, truth) or _oracle_eval(node.right, truth)
    raise TypeError(f"not a condition AST node: {node!r}")


def enumerate_outcomes(organizer: Organizer, step_limit: int = DEFAULT_STEP_LIMIT) -> OutcomeTable:
    """Runs the single-organizer walk for all 2^k guard-predicate assignments.

    Rows are ordered as a binary counter over the sorted predicate
    signatures (first predicate is the most significant bit, all-false row
    first). No recursion into invoked goals.
    """
    parsed: list[tuple[int, ConditionAst]] = []
    for index, transition in enumerate(organizer.transitions):
        text = transition.dataCondition or ""
        try:
            parsed.append((index, conditions.parse_condition(text)))
        except ParseError as exc:
            raise GuardParseError(
                f"guard does not parse: {exc}",
                path=f"/organizer/transitions/{index}/dataCondition",
            ) from exc
    guard_by_index = dict(parsed)

    signatures: set[conditions.Signature] = set()
    for _, ast in parsed:
        signatures.update(conditions.collect_predicates(ast))
    ordered = sorted(signatures)
    if len(ordered) > MAX_PREDICATES:
        raise TooManyPredicates(
            f"{len(ordered)} distinct predicates exceed the limit of {MAX_PREDICATES}"
        )

    states = {state.name: state for state in organizer.states}
    outgoing: dict[str, list[int]] = {name: [] for name in states}
    for index, transition in enumerate(organizer.transitions):
        if transition.sourceState in outgoing:
            outgoing[transition.sourceState].append(index)

    count = len(ordered)
    rows: list[OutcomeRow] = []
    for counter in range(2 ** count):
        bits = tuple(bool((counter >> (count - 1 - j)) & 1) for j in range(count))
        truth = dict(zip(ordered, bits))

        outcome = Outcome.STEP_LIMIT
        current = states.get(organizer.startState)
        if current is None:
            outcome = Outcome.STUCK
        else:
            for _ in range(step_limit):
                if current.is_done:
                    outcome = Outcome.DONE
                    break
                if current.is_fail:
                    outcome = Outcome.FAIL
                    break
                next_name = None
                for t_index in outgoing[current.name]:
                    if _oracle_eval(guard_by_index[t_index], truth):
                        next_name = organizer.transitions[t_index].targetState
                        break
                if next_name is None:
                    outcome = Outcome.STUCK
                    break
                current = states.get(next_name)
                if current is None:
                    outcome = Outcome.STUCK
                    break
        rows.append(OutcomeRow(assignment=bits, outcome=outcome))

    return OutcomeTable(
        predicates=tuple(conditions.print_signature(s) for s in ordered),
        rows=tuple(rows),
    )
