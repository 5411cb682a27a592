"""Shared fixtures: bundles loaded from disk plus small in-code models."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from tmkit.bundle import load_bundle, model_from_documents
from tmkit.model import TmkModel
from tmkit.static_metrics import Transcript

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sortlist() -> TmkModel:
    return load_bundle(FIXTURES / "sortlist")


@pytest.fixture(scope="session")
def nomenclature() -> TmkModel:
    return load_bundle(FIXTURES / "nomenclature")


@pytest.fixture(scope="session")
def sortlist_transcript() -> Transcript:
    return Transcript.from_file(FIXTURES / "sortlist_transcript.txt")


def load_docs(directory: Path) -> tuple[dict, list, dict]:
    """Raw JSON documents of a bundle directory, for mutation helpers."""
    skill = next(directory.glob("*.task.json")).name[: -len(".task.json")]
    task = json.loads((directory / f"{skill}.task.json").read_text())
    method = json.loads((directory / f"{skill}.method.json").read_text())
    knowledge = json.loads((directory / f"{skill}.knowledge.json").read_text())
    if isinstance(method, dict):
        method = [method]
    return task, method, knowledge


def model_from_mutated(
    directory: Path, mutate, skill_name: str | None = None
) -> TmkModel:
    """Loads a bundle's documents, applies `mutate(task, methods, knowledge)`,
    and rebuilds the model."""
    task, methods, knowledge = load_docs(directory)
    mutate(task, methods, knowledge)
    if skill_name is None:
        skill_name = next(directory.glob("*.task.json")).name[: -len(".task.json")]
    return model_from_documents(task, methods, knowledge, skill_name=skill_name)


def minimal_conformant_docs(skill: str = "Skill") -> tuple[dict, list, dict]:
    """Smallest bundle that passes validation; a base for in-code fixtures."""
    task = {
        "name": skill,
        "description": f"{skill} demonstration task.",
        "inputParameters": [{"name": "item", "type": "Thing"}],
        "outputParameters": [{"name": "result", "type": "Thing"}],
        "given": ["itemReady(item)"],
        "makes": ["resultReady(result)"],
        "means": [f"{skill}Method"],
    }
    methods = [
        {
            "name": f"{skill}Method",
            "description": f"Mechanism realizing {skill}.",
            "inputParameters": [{"name": "item", "type": "Thing"}],
            "outputParameters": [{"name": "result", "type": "Thing"}],
            "requires": ["itemReady(item)"],
            "provides": ["resultReady(result)"],
            "organizer": {
                "startState": "M_Start",
                "states": [
                    {
                        "name": "M_Start",
                        "goalInvocation": {
                            "goalReference": "ProcessItem",
                            "type": "operation",
                            "actualArguments": ["item"],
                        },
                    },
                    {"name": "M_Done"},
                    {
                        "name": "M_Fail",
                        "goalInvocation": {
                            "goalReference": "FailureGoal",
                            "type": "task",
                            "actualArguments": [],
                        },
                    },
                ],
                "transitions": [
                    {
                        "sourceState": "M_Start",
                        "targetState": "M_Done",
                        "dataCondition": "processingComplete(item)",
                    },
                    {
                        "sourceState": "M_Start",
                        "targetState": "M_Fail",
                        "dataCondition": "processingBlocked(item)",
                    },
                ],
            },
        }
    ]
    knowledge = {
        "concepts": [{"name": "Thing", "properties": [{"name": "label", "type": "Text"}]}],
        "instances": [],
        "relations": [{"name": "derivedFrom", "domain": "Thing", "range": "Thing"}],
    }
    return task, methods, knowledge


def minimal_conformant_model(skill: str = "Skill") -> TmkModel:
    task, methods, knowledge = minimal_conformant_docs(skill)
    return model_from_documents(task, methods, knowledge, skill_name=skill)
