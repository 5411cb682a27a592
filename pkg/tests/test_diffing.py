"""Structural diff/patch: entry granularity and patch soundness."""

import pytest

from tmkit.diffing import ADDED, MODIFIED, REMOVED, apply_diff, diff_models
from tmkit.errors import SkillMismatch
from tmkit.paths import get_at, parse_path, set_at

from conftest import FIXTURES, model_from_mutated


def guard_edit(task, methods, knowledge):
    methods[0]["organizer"]["transitions"][1]["dataCondition"] = (
        "listOrdered(sortedList) && lengthPreserved(sortedList)"
    )


def state_added(task, methods, knowledge):
    methods[0]["organizer"]["states"].insert(
        3,
        {
            "name": "SL_Verify",
            "goalInvocation": {
                "goalReference": "CheckOrdering",
                "type": "operation",
                "actualArguments": ["sortedList"],
            },
        },
    )


def concept_removed_and_description_changed(task, methods, knowledge):
    del knowledge["concepts"][1]
    knowledge["relations"] = []
    task["description"] = "Order the given list."


def mixed_edit(task, methods, knowledge):
    methods.append(
        {
            "name": "SelectionStrategy",
            "description": "Repeatedly select the minimum element.",
            "organizer": {
                "startState": "SS_Start",
                "states": [{"name": "SS_Start"}, {"name": "SS_Done"}, {"name": "SS_Fail"}],
                "transitions": [
                    {"sourceState": "SS_Start", "targetState": "SS_Done",
                     "dataCondition": "minimumFound(unsortedList)"}
                ],
            },
        }
    )
    task["means"].append("SelectionStrategy")
    task["inputParameters"][0]["type"] = "Sequence"
    methods[0]["organizer"]["transitions"].append(
        {"sourceState": "SL_Start", "targetState": "SL_Fail",
         "dataCondition": "inputMissing(unsortedList)"}
    )


FIXTURE_PAIRS = [guard_edit, state_added, concept_removed_and_description_changed, mixed_edit]


# --- path utilities -----------------------------------------------------------------


def test_parse_and_get_path(sortlist):
    doc = sortlist.to_canonical()
    assert get_at(doc, "task.name") == "SortList"
    assert get_at(doc, "methods[0].organizer.transitions[1].dataCondition") == (
        "listOrdered(sortedList)"
    )
    assert get_at(doc, "methods[name=IterativeInsertion].name") == "IterativeInsertion"


def test_parse_path_segments():
    assert parse_path("a.b[3].c[name=X Y]") == ["a", "b", 3, "c", ("name", "X Y")]


def test_set_at_by_name_selector(sortlist):
    doc = sortlist.to_canonical()
    set_at(doc, "methods[name=IterativeInsertion].description", "updated")
    assert doc["methods"][0]["description"] == "updated"


# --- diff granularity ----------------------------------------------------------------


def test_identical_models_empty_diff(sortlist):
    diff = diff_models(sortlist, sortlist)
    assert diff.entries == ()
    assert all(
        count == 0 for kinds in diff.summary().values() for count in kinds.values()
    )


def test_single_guard_edit_single_modified_entry(sortlist):
    refined = model_from_mutated(FIXTURES / "sortlist", guard_edit)
    diff = diff_models(sortlist, refined)
    assert len(diff.entries) == 1
    entry = diff.entries[0]
    assert entry.kind == MODIFIED
    assert entry.fieldPath == (
        "methods[name=IterativeInsertion].organizer.transitions[1].dataCondition"
    )
    assert entry.before == "listOrdered(sortedList)"
    assert "lengthPreserved" in entry.after


def test_state_added_single_added_entry(sortlist):
    refined = model_from_mutated(FIXTURES / "sortlist", state_added)
    diff = diff_models(sortlist, refined)
    assert len(diff.entries) == 1
    entry = diff.entries[0]
    assert entry.kind == ADDED
    assert entry.fieldPath == (
        "methods[name=IterativeInsertion].organizer.states[name=SL_Verify]"
    )
    assert entry.index == 3
    assert diff.summary()["methods"][ADDED] == 1


def test_removed_entries_have_before(sortlist):
    refined = model_from_mutated(
        FIXTURES / "sortlist", concept_removed_and_description_changed
    )
    diff = diff_models(sortlist, refined)
    removed = [e for e in diff.entries if e.kind == REMOVED]
    assert any(e.fieldPath == "knowledge.concepts[name=Element]" for e in removed)
    by_path = {e.fieldPath: e for e in diff.entries}
    assert by_path["task.description"].kind == MODIFIED


def test_skill_mismatch_rejected(sortlist, nomenclature):
    with pytest.raises(SkillMismatch):
        diff_models(sortlist, nomenclature)


def test_reorder_collapses_to_whole_array_entry(sortlist):
    def reorder(task, methods, knowledge):
        knowledge["concepts"].reverse()

    refined = model_from_mutated(FIXTURES / "sortlist", reorder)
    diff = diff_models(sortlist, refined)
    assert [e.kind for e in diff.entries] == [MODIFIED]
    assert diff.entries[0].fieldPath == "knowledge.concepts"


# --- patch soundness -------------------------------------------------------------------


@pytest.mark.parametrize("mutate", FIXTURE_PAIRS, ids=[m.__name__ for m in FIXTURE_PAIRS])
def test_apply_diff_reproduces_refined_sortlist(sortlist, mutate):
    refined = model_from_mutated(FIXTURES / "sortlist", mutate)
    diff = diff_models(sortlist, refined)
    patched = apply_diff(sortlist, diff)
    assert patched.task == refined.task
    assert patched.methods == refined.methods
    assert patched.knowledge == refined.knowledge
    assert patched.to_canonical() == refined.to_canonical()


def test_apply_diff_reproduces_refined_nomenclature(nomenclature):
    def nomenclature_edit(task, methods, knowledge):
        task["subtasks"][0]["description"] = "Name the parent chain."
        del methods[1]["organizer"]["transitions"][1]
        knowledge["instances"].append(
            {"name": "hydroxylGroup", "concept": "FunctionalGroup",
             "values": {"seniority": "2"}}
        )

    refined = model_from_mutated(FIXTURES / "nomenclature", nomenclature_edit)
    diff = diff_models(nomenclature, refined)
    patched = apply_diff(nomenclature, diff)
    assert patched.to_canonical() == refined.to_canonical()


def test_apply_diff_checks_skill(sortlist, nomenclature):
    diff = diff_models(sortlist, sortlist)
    with pytest.raises(SkillMismatch):
        apply_diff(nomenclature, diff)


def test_diff_round_trip_on_disk_pair(fixtures_dir):
    from tmkit.bundle import load_bundle

    raw = load_bundle(fixtures_dir / "sortlist")
    refined = load_bundle(fixtures_dir / "sortlist-refined")
    diff = diff_models(raw, refined)
    assert len(diff.entries) == 2  # one guard modified, one state added
    patched = apply_diff(raw, diff)
    assert patched.to_canonical() == refined.to_canonical()
