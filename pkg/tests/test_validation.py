"""Schema validator: soundness on conformant fixtures, completeness on mutations."""

import pytest

from tmkit.validation import Code, validate_schema

from conftest import (
    FIXTURES,
    minimal_conformant_model,
    model_from_mutated,
)


def drop_data_condition(task, methods, knowledge):
    del methods[0]["organizer"]["transitions"][0]["dataCondition"]


def drop_fail_state(task, methods, knowledge):
    organizer = methods[0]["organizer"]
    organizer["states"] = [s for s in organizer["states"] if s["name"] != "SL_Fail"]
    organizer["transitions"] = [
        t for t in organizer["transitions"]
        if "SL_Fail" not in (t["sourceState"], t["targetState"])
    ]


def drop_done_state(task, methods, knowledge):
    organizer = methods[0]["organizer"]
    organizer["states"] = [s for s in organizer["states"] if s["name"] != "SL_Done"]
    organizer["transitions"] = [
        t for t in organizer["transitions"]
        if "SL_Done" not in (t["sourceState"], t["targetState"])
    ]


def drop_means(task, methods, knowledge):
    task["means"] = []


def dangle_means(task, methods, knowledge):
    task["means"] = ["NoSuchMethod"]


def dangle_start_state(task, methods, knowledge):
    methods[0]["organizer"]["startState"] = "NoSuchState"


def dangle_transition_endpoint(task, methods, knowledge):
    methods[0]["organizer"]["transitions"][0]["targetState"] = "NoSuchState"


def duplicate_state_name(task, methods, knowledge):
    organizer = methods[0]["organizer"]
    organizer["states"].append(dict(organizer["states"][1]))


def cyclic_super_concept(task, methods, knowledge):
    knowledge["concepts"][0]["superConcept"] = "Element"
    knowledge["concepts"][1]["superConcept"] = "List"


def dangle_instance_concept(task, methods, knowledge):
    knowledge["instances"].append(
        {"name": "sample", "concept": "NoSuchConcept", "values": {}}
    )


def unknown_instance_property(task, methods, knowledge):
    knowledge["instances"].append(
        {"name": "sample", "concept": "Element", "values": {"color": "red"}}
    )


def empty_task_name(task, methods, knowledge):
    task["name"] = ""


MUTATIONS = [
    (drop_data_condition, Code.MISSING_DATA_CONDITION),
    (drop_fail_state, Code.MISSING_FAIL_STATE),
    (drop_done_state, Code.MISSING_DONE_STATE),
    (drop_means, Code.MISSING_MEANS),
    (dangle_means, Code.DANGLING_MEANS),
    (dangle_start_state, Code.DANGLING_START_STATE),
    (dangle_transition_endpoint, Code.DANGLING_TRANSITION_ENDPOINT),
    (duplicate_state_name, Code.DUPLICATE_STATE_NAME),
    (cyclic_super_concept, Code.CYCLIC_SUPER_CONCEPT),
    (dangle_instance_concept, Code.DANGLING_INSTANCE_CONCEPT),
    (unknown_instance_property, Code.UNKNOWN_INSTANCE_PROPERTY),
    (empty_task_name, Code.EMPTY_TASK_NAME),
]


@pytest.mark.parametrize("mutate,expected", MUTATIONS, ids=[m.__name__ for m, _ in MUTATIONS])
def test_mutation_fires_exactly_its_code(mutate, expected):
    model = model_from_mutated(FIXTURES / "sortlist", mutate)
    report = validate_schema(model)
    assert not report.valid
    assert report.error_codes() == {expected.value}


def test_mutation_violation_path_points_at_transition():
    model = model_from_mutated(FIXTURES / "sortlist", drop_data_condition)
    report = validate_schema(model)
    paths = [v.path for v in report.violations if v.code == Code.MISSING_DATA_CONDITION.value]
    assert paths == ["/methods/0/organizer/transitions/0/dataCondition"]


def conformant_models(sortlist, nomenclature):
    return [
        sortlist,
        nomenclature,
        minimal_conformant_model("Alpha"),
        minimal_conformant_model("Beta"),
        minimal_conformant_model("Gamma"),
    ]


def test_conformant_fixtures_have_zero_errors(sortlist, nomenclature):
    for model in conformant_models(sortlist, nomenclature):
        report = validate_schema(model)
        assert report.valid, (model.skillName, [v.to_dict() for v in report.violations])
        assert report.error_codes() == set()


def test_sortlist_fixture_fully_clean(sortlist):
    report = validate_schema(sortlist)
    assert report.valid
    assert len(report.violations) == 0


def test_unknown_field_is_warning_not_error():
    model = model_from_mutated(
        FIXTURES / "sortlist", lambda task, m, k: task.update({"mystery": 1})
    )
    report = validate_schema(model)
    assert report.valid
    assert report.warning_codes() == {Code.UNKNOWN_FIELD.value}
    paths = [v.path for v in report.violations]
    assert "/task/mystery" in paths


def test_unparseable_given_is_warning():
    model = model_from_mutated(
        FIXTURES / "sortlist", lambda task, m, k: task.update({"given": ["(((("]})
    )
    report = validate_schema(model)
    assert report.valid
    assert Code.UNPARSEABLE_CONDITION.value in report.warning_codes()


def test_fail_state_without_failure_goal_is_warning():
    def strip_invocation(task, methods, knowledge):
        for state in methods[0]["organizer"]["states"]:
            if state["name"] == "SL_Fail":
                del state["goalInvocation"]

    model = model_from_mutated(FIXTURES / "sortlist", strip_invocation)
    report = validate_schema(model)
    assert report.valid
    assert Code.FAIL_STATE_WITHOUT_FAILURE_GOAL.value in report.warning_codes()


def test_inherited_instance_property_accepted(nomenclature):
    # "formula" lives on the superConcept; the fixture instance uses it.
    report = validate_schema(nomenclature)
    assert report.valid
    assert Code.UNKNOWN_INSTANCE_PROPERTY.value not in report.error_codes()


def test_valid_flag_matches_error_presence():
    model = model_from_mutated(FIXTURES / "sortlist", drop_means)
    report = validate_schema(model)
    assert report.valid == (len(report.error_codes()) == 0) == False  # noqa: E712


def test_report_serializes_to_dict(sortlist):
    report = validate_schema(sortlist)
    payload = report.to_dict()
    assert payload == {"valid": True, "violations": []}
