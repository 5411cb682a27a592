"""FSM engine: traces, reachability, and the brute-force outcome oracle."""

import itertools

import pytest

from tmkit.bundle import model_from_documents
from tmkit.conditions import PredicateEnv
from tmkit.errors import GuardParseError, TooManyPredicates, UnknownMethod, UnknownPredicate
from tmkit.fsm import Outcome, check_reachability, enumerate_outcomes, trace


def fsm_model(states, transitions, start="Start", method_name="Walk"):
    methods = [{
        "name": method_name,
        "organizer": {"startState": start, "states": states, "transitions": transitions},
    }]
    return model_from_documents(
        {"name": "Fixture", "means": [method_name]}, methods, {}, skill_name="Fixture"
    )


def linear_model():
    return fsm_model(
        states=[{"name": "Start"}, {"name": "Mid"}, {"name": "Done"}],
        transitions=[
            {"sourceState": "Start", "targetState": "Mid", "dataCondition": "a"},
            {"sourceState": "Mid", "targetState": "Done", "dataCondition": "b"},
        ],
    )


def branch_model():
    return fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}, {"name": "Fail"}],
        transitions=[
            {"sourceState": "Start", "targetState": "Done", "dataCondition": "p"},
            {"sourceState": "Start", "targetState": "Fail", "dataCondition": "!p"},
        ],
    )


def two_true_model():
    return fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}, {"name": "Fail"}],
        transitions=[
            {"sourceState": "Start", "targetState": "Done", "dataCondition": "true"},
            {"sourceState": "Start", "targetState": "Fail", "dataCondition": "true"},
        ],
    )


def cycle_model():
    return fsm_model(
        states=[{"name": "A"}, {"name": "B"}, {"name": "Done"}],
        transitions=[
            {"sourceState": "A", "targetState": "B", "dataCondition": "true"},
            {"sourceState": "B", "targetState": "A", "dataCondition": "true"},
        ],
        start="A",
    )


def three_predicate_model():
    return fsm_model(
        states=[{"name": "Start"}, {"name": "S1"}, {"name": "Done"}, {"name": "Fail"}],
        transitions=[
            {"sourceState": "Start", "targetState": "S1", "dataCondition": "a && b"},
            {"sourceState": "Start", "targetState": "Fail", "dataCondition": "!a"},
            {"sourceState": "S1", "targetState": "Done", "dataCondition": "c || b"},
            {"sourceState": "S1", "targetState": "Fail", "dataCondition": "!c"},
        ],
    )


def chain_model(width=8):
    states = [{"name": "Start"}] + [{"name": f"S{i}"} for i in range(1, width)]
    states += [{"name": "Done"}, {"name": "Fail"}]
    names = ["Start"] + [f"S{i}" for i in range(1, width)] + ["Done"]
    transitions = []
    for i in range(width):
        transitions.append(
            {"sourceState": names[i], "targetState": names[i + 1], "dataCondition": f"d{i}"}
        )
        transitions.append(
            {"sourceState": names[i], "targetState": "Fail", "dataCondition": f"!d{i}"}
        )
    return fsm_model(states=states, transitions=transitions)


ORACLE_MODELS = [
    ("linear", linear_model),
    ("branch", branch_model),
    ("two_true", two_true_model),
    ("cycle", cycle_model),
    ("three_predicate", three_predicate_model),
    ("chain_8", chain_model),
]


# --- trace ---------------------------------------------------------------------


def test_linear_trace_reaches_done():
    model = linear_model()
    env = PredicateEnv.from_strings({"a": True, "b": True})
    result = trace(model, "Walk", env)
    assert [s.stateName for s in result.steps] == ["Start", "Mid", "Done"]
    assert result.outcome == Outcome.DONE
    assert result.warnings == ()


def test_linear_trace_stuck_at_mid():
    model = linear_model()
    env = PredicateEnv.from_strings({"a": True, "b": False})
    result = trace(model, "Walk", env)
    assert result.outcome == Outcome.STUCK
    assert result.steps[-1].stateName == "Mid"
    # The failed evaluation is recorded.
    assert result.steps[-1].evaluatedTransitions[0].result is False


def test_two_true_takes_first_and_warns():
    model = two_true_model()
    result = trace(model, "Walk", PredicateEnv(assignments={}))
    assert result.outcome == Outcome.DONE
    assert len(result.warnings) == 1
    assert "Fail" in result.warnings[0]
    # Both evaluations recorded as true.
    start_step = result.steps[0]
    assert [e.result for e in start_step.evaluatedTransitions] == [True, True]


def test_cycle_hits_step_limit():
    model = cycle_model()
    result = trace(model, "Walk", PredicateEnv(assignments={}), step_limit=16)
    assert result.outcome == Outcome.STEP_LIMIT
    assert len(result.steps) == 16


def test_unknown_method_raises():
    with pytest.raises(UnknownMethod):
        trace(linear_model(), "Nope", PredicateEnv(assignments={}))


def test_unparseable_guard_raises_with_path():
    model = fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}],
        transitions=[{"sourceState": "Start", "targetState": "Done",
                      "dataCondition": "((("}],
    )
    with pytest.raises(GuardParseError) as err:
        trace(model, "Walk", PredicateEnv(assignments={}))
    assert err.value.path == "/methods/0/organizer/transitions/0/dataCondition"


def test_strict_env_propagates_eval_error():
    model = linear_model()
    env = PredicateEnv.from_strings({"a": True}, strict=True)  # "b" unknown but
    # Start only evaluates "a"; the error surfaces at Mid.
    with pytest.raises(UnknownPredicate):
        trace(model, "Walk", env)


def test_trace_determinism(sortlist):
    env = PredicateEnv.from_strings(
        {"unsortedRemaining(unsortedList)": False, "listOrdered(sortedList)": True,
         "comparisonUndefined(unsortedList)": False}
    )
    first = trace(sortlist, "IterativeInsertion", env)
    second = trace(sortlist, "IterativeInsertion", env)
    assert first == second
    assert first.outcome == Outcome.DONE


def test_trace_records_requires_annotations(sortlist):
    env = PredicateEnv.from_strings({"listOrdered(sortedList)": True})
    result = trace(sortlist, "IterativeInsertion", env)
    assert result.requiresEvaluated == (("listProvided(unsortedList)", False),)


def test_trace_recurses_into_subtask(nomenclature):
    env = PredicateEnv.from_strings(
        {
            "principalGroupIdentified(compound)": True,
            "parentNamed(compound)": True,
            "ambiguousSeniority(compound)": False,
            "stereochemistryAssigned(config)": True,
            "noStereoPresent(config)": False,
            "noParentCandidate(compound)": False,
        }
    )
    result = trace(nomenclature, "PrincipalGroupMechanism", env)
    assert result.outcome == Outcome.DONE
    sub_step = next(s for s in result.steps if s.stateName == "SNS_S2")
    assert sub_step.subTrace is not None
    assert sub_step.subTrace.methodName == "ParentNamingMethod"
    assert sub_step.subTrace.outcome == Outcome.DONE


def test_trace_json_export(nomenclature):
    env = PredicateEnv.from_strings({"ambiguousSeniority(compound)": True})
    result = trace(nomenclature, "PrincipalGroupMechanism", env)
    payload = result.to_dict()
    assert payload["outcome"] == "Fail"
    assert payload["steps"][0]["stateName"] == "SNS_S1"


# --- reachability -----------------------------------------------------------------


def test_sortlist_reachability(sortlist):
    report = check_reachability(sortlist.methods[0].organizer)
    assert report.doneReachable
    assert report.failReachable
    assert report.unreachableStates == ()
    assert report.deadEndStates == ()


def test_orphan_state_unreachable():
    model = fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}, {"name": "Orphan"}],
        transitions=[{"sourceState": "Start", "targetState": "Done",
                      "dataCondition": "go"}],
    )
    report = check_reachability(model.methods[0].organizer)
    assert "Orphan" in report.unreachableStates
    assert "Orphan" in report.deadEndStates


def test_done_present_but_unreachable():
    model = fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}, {"name": "Fail"}],
        transitions=[{"sourceState": "Start", "targetState": "Fail",
                      "dataCondition": "p"}],
    )
    report = check_reachability(model.methods[0].organizer)
    assert not report.doneReachable
    assert report.failReachable


def test_literal_false_guard_removes_edge():
    model = fsm_model(
        states=[{"name": "Start"}, {"name": "Done"}],
        transitions=[{"sourceState": "Start", "targetState": "Done",
                      "dataCondition": "false"}],
    )
    report = check_reachability(model.methods[0].organizer)
    assert not report.doneReachable
    assert "Done" in report.unreachableStates


def test_reachability_soundness_vs_traces():
    model = three_predicate_model()
    organizer = model.methods[0].organizer
    report = check_reachability(organizer)
    for bits in itertools.product([False, True], repeat=3):
        env = PredicateEnv.from_strings(dict(zip(["a", "b", "c"], bits)))
        result = trace(model, "Walk", env)
        for step in result.steps:
            assert step.stateName not in report.unreachableStates


# --- outcome oracle ----------------------------------------------------------------


def test_branch_table():
    table = enumerate_outcomes(branch_model().methods[0].organizer)
    assert table.predicates == ("p",)
    assert [(row.assignment, row.outcome) for row in table.rows] == [
        ((False,), Outcome.FAIL),
        ((True,), Outcome.DONE),
    ]


def test_cycle_table_all_step_limit():
    table = enumerate_outcomes(cycle_model().methods[0].organizer, step_limit=32)
    assert table.predicates == ()
    assert [row.outcome for row in table.rows] == [Outcome.STEP_LIMIT]


def test_too_many_predicates():
    transitions = [
        {"sourceState": "Start", "targetState": "Done",
         "dataCondition": " && ".join(f"p{i}" for i in range(17))}
    ]
    model = fsm_model(states=[{"name": "Start"}, {"name": "Done"}],
                      transitions=transitions)
    with pytest.raises(TooManyPredicates):
        enumerate_outcomes(model.methods[0].organizer)


@pytest.mark.parametrize("name,factory", ORACLE_MODELS)
def test_trace_agrees_with_oracle(name, factory):
    model = factory()
    organizer = model.methods[0].organizer
    table = enumerate_outcomes(organizer, step_limit=64)
    count = len(table.predicates)
    assert count <= 10
    assert len(table.rows) == 2 ** count
    for row in table.rows:
        env = PredicateEnv.from_strings(dict(zip(table.predicates, row.assignment)))
        walked = trace(model, "Walk", env, step_limit=64)
        assert walked.outcome == row.outcome, (name, row.assignment)


def test_oracle_rows_match_individual_traces_three_predicates():
    model = three_predicate_model()
    table = enumerate_outcomes(model.methods[0].organizer)
    assert len(table.rows) == 8
    for row in table.rows:
        env = PredicateEnv.from_strings(dict(zip(table.predicates, row.assignment)))
        assert trace(model, "Walk", env).outcome == row.outcome
