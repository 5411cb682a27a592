"""Authoring pipeline: prompts, generation retries, judging, effort accounting."""

import json

import httpx
import pytest

from tmkit.bundle import serialize_model
from tmkit.errors import (
    EmptyTranscript,
    GenerationFailed,
    InvalidJudgeResponse,
    NonPositiveBaseline,
    TransportError,
)
from tmkit.pipeline import (
    PROMPT_SECTIONS,
    BundleTexts,
    DigestJudgeClient,
    FixtureGenerationClient,
    HttpGenerationClient,
    MockGenerationClient,
    MockJudgeClient,
    RefinementSession,
    assemble_generation_prompt,
    generate_raw_model,
    judge_model,
    normalize_judge_score,
    refinement_reduction,
)

from conftest import FIXTURES, model_from_mutated


# --- prompt assembly -----------------------------------------------------------


def test_prompt_contains_five_sections_in_order():
    bundle = assemble_generation_prompt("some lesson text", ("schema one", "schema two"))
    positions = [bundle.systemPrompt.find(header) for header, _ in PROMPT_SECTIONS]
    assert all(p >= 0 for p in positions)
    assert positions == sorted(positions)
    assert len(PROMPT_SECTIONS) == 5
    assert bundle.transcriptText == "some lesson text"
    assert bundle.schemaTexts == ("schema one", "schema two")


def test_prompt_orders_knowledge_task_method():
    bundle = assemble_generation_prompt("lesson")
    workflow = bundle.systemPrompt[bundle.systemPrompt.find("Step-by-Step Workflow"):]
    k, t, m = (workflow.find(word) for word in ("Knowledge", "Task", "Method"))
    assert 0 <= k < t < m


def test_empty_transcript_rejected():
    with pytest.raises(EmptyTranscript):
        assemble_generation_prompt("   \n  ")


def test_prompt_deterministic():
    first = assemble_generation_prompt("lesson", ("s",))
    second = assemble_generation_prompt("lesson", ("s",))
    assert first == second


# --- generation with repairs ------------------------------------------------------


def valid_texts(sortlist):
    return BundleTexts.from_model(sortlist)


def invalid_texts():
    broken = model_from_mutated(
        FIXTURES / "sortlist",
        lambda task, m, k: m[0]["organizer"]["transitions"][0].pop("dataCondition"),
    )
    return BundleTexts.from_model(broken)


def test_valid_first_attempt(sortlist):
    client = MockGenerationClient([valid_texts(sortlist)])
    model, log = generate_raw_model(client, "lesson text")
    assert model.task.name == "SortList"
    assert len(log.attempts) == 1
    assert log.attempts[0].report.valid


def test_invalid_then_valid_feedback_carries_codes(sortlist):
    client = MockGenerationClient([invalid_texts(), valid_texts(sortlist)])
    model, log = generate_raw_model(client, "lesson text")
    assert len(log.attempts) == 2
    second_request = client.requests[1]
    assert second_request.repairFeedback is not None
    assert "MISSING_DATA_CONDITION" in second_request.repairFeedback
    assert client.requests[0].repairFeedback is None


def test_always_invalid_exhausts_repairs():
    client = MockGenerationClient([invalid_texts()])
    with pytest.raises(GenerationFailed) as err:
        generate_raw_model(client, "lesson text", max_repairs=2)
    assert len(err.value.log.attempts) == 3
    assert len(client.requests) == 3
    # Every repair request contains the violation codes of the prior attempt.
    for request in client.requests[1:]:
        assert "MISSING_DATA_CONDITION" in request.repairFeedback


def test_attempt_count_never_exceeds_budget():
    client = MockGenerationClient([invalid_texts()])
    with pytest.raises(GenerationFailed):
        generate_raw_model(client, "lesson", max_repairs=0)
    assert len(client.requests) == 1


def test_unparseable_response_repaired(sortlist):
    garbage = BundleTexts(taskText="{not json", methodText="[]", knowledgeText="{}")
    client = MockGenerationClient([garbage, valid_texts(sortlist)])
    model, log = generate_raw_model(client, "lesson")
    assert len(log.attempts) == 2
    assert log.attempts[0].parseError is not None
    assert "PARSE_ERROR" in client.requests[1].repairFeedback


def test_transport_error_carries_attempt_index():
    class Boom:
        def generate(self, request):
            raise ConnectionError("refused")

    with pytest.raises(TransportError) as err:
        generate_raw_model(Boom(), "lesson")
    assert err.value.attempt == 1


def test_fixture_client_returns_bundle(fixtures_dir, sortlist):
    client = FixtureGenerationClient(fixtures_dir / "sortlist")
    model, log = generate_raw_model(client, "lesson")
    assert model.task == sortlist.task
    assert len(log.attempts) == 1


def test_http_generation_client_round_trip(sortlist):
    task_text, method_text, knowledge_text = serialize_model(sortlist)

    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        assert "systemPrompt" in body
        return httpx.Response(
            200,
            json={
                "taskText": task_text,
                "methodText": method_text,
                "knowledgeText": knowledge_text,
            },
        )

    client = HttpGenerationClient(
        "http://models.local/generate", api_key="k",
        transport=httpx.MockTransport(handler),
    )
    model, log = generate_raw_model(client, "lesson")
    assert model.task.name == "SortList"


# --- judging ---------------------------------------------------------------------


def test_normalization_endpoints_and_midpoint():
    assert normalize_judge_score(5) == 1.0
    assert normalize_judge_score(1) == 0.0
    assert normalize_judge_score(3) == 0.5


def test_normalization_affine_exact():
    assert [normalize_judge_score(raw) for raw in (1, 2, 3, 4, 5)] == [
        0.0, 0.25, 0.5, 0.75, 1.0,
    ]


@pytest.mark.parametrize("raw", [0, 6, -1, "3", 2.5, True])
def test_out_of_range_judge_response_rejected(raw):
    with pytest.raises(InvalidJudgeResponse):
        normalize_judge_score(raw)


def test_judge_model_one_call_per_dimension(sortlist):
    client = MockJudgeClient(
        {"causalChaining": 5, "teleologicalLinkage": 3, "proceduralFidelity": 1}
    )
    scores = judge_model(client, sortlist, "lesson")
    assert scores.causalChaining == 1.0
    assert scores.teleologicalLinkage == 0.5
    assert scores.proceduralFidelity == 0.0
    assert [r.dimension for r in client.requests] == [
        "causalChaining", "teleologicalLinkage", "proceduralFidelity",
    ]
    assert all(r.rubricText for r in client.requests)


def test_judge_mock_zero_rejected(sortlist):
    with pytest.raises(InvalidJudgeResponse):
        judge_model(MockJudgeClient(0), sortlist, "lesson")


def test_digest_judge_deterministic(sortlist):
    first = judge_model(DigestJudgeClient(), sortlist, "lesson")
    second = judge_model(DigestJudgeClient(), sortlist, "lesson")
    assert first == second


# --- effort accounting -------------------------------------------------------------


def test_reduction_paper_values():
    assert refinement_reduction(7.0, 1.9) == pytest.approx(0.7286, abs=0.0001)
    assert refinement_reduction(6.0, 2.0) == pytest.approx(2 / 3, abs=1e-12)
    assert refinement_reduction(7.0, 7.0) == 0.0


def test_reduction_bounds():
    assert refinement_reduction(5.0, 0.0) == 1.0
    assert refinement_reduction(5.0, 6.0) < 0.0
    for manual, refinement in [(7.0, 1.9), (4.0, 4.0), (2.0, 5.0)]:
        assert refinement_reduction(manual, refinement) <= 1.0


def test_reduction_rejects_bad_inputs():
    with pytest.raises(NonPositiveBaseline):
        refinement_reduction(0.0, 1.0)
    with pytest.raises(NonPositiveBaseline):
        refinement_reduction(-1.0, 1.0)
    with pytest.raises(ValueError):
        refinement_reduction(5.0, -0.1)


# --- sessions -----------------------------------------------------------------------


def test_session_wall_clock_hours():
    session = RefinementSession.start(
        "sortlist", started_at="2025-03-01T10:00:00+00:00"
    ).end(ended_at="2025-03-01T11:30:00+00:00")
    assert session.refinement_hours == pytest.approx(1.5)
    assert session.reduction == pytest.approx((7.0 - 1.5) / 7.0)


def test_session_logged_hours_override():
    session = RefinementSession.start(
        "sortlist", started_at="2025-03-01T10:00:00+00:00"
    ).end(logged_hours=1.9, ended_at="2025-03-05T10:00:00+00:00")
    assert session.refinement_hours == 1.9
    assert session.reduction == pytest.approx(0.7286, abs=0.0001)


def test_session_cannot_end_before_start():
    session = RefinementSession.start("s", started_at="2025-03-01T10:00:00+00:00")
    with pytest.raises(ValueError):
        session.end(ended_at="2025-03-01T09:00:00+00:00")


def test_session_file_persistence(tmp_path):
    from tmkit.pipeline import load_session, save_session

    session = RefinementSession.start(
        "sortlist", started_at="2025-03-01T10:00:00+00:00"
    ).end(logged_hours=1.9, ended_at="2025-03-01T12:00:00+00:00")
    path = save_session(session, tmp_path / "sessions")
    assert path.name == "sortlist.session.json"
    restored = load_session(tmp_path / "sessions", "sortlist")
    assert restored == session


def test_session_event_log_and_round_trip():
    session = (
        RefinementSession.start("sortlist", started_at="2025-03-01T10:00:00+00:00")
        .record("task.description", "old", "new", note="clarified goal",
                timestamp="2025-03-01T10:05:00+00:00")
        .record("methods[0].organizer.transitions[1].dataCondition",
                "listOrdered(sortedList)", "listOrdered(sortedList) && x(y)",
                timestamp="2025-03-01T10:10:00+00:00")
        .end(logged_hours=0.5, ended_at="2025-03-01T10:30:00+00:00")
    )
    assert len(session.events) == 2
    payload = session.to_dict()
    assert payload["reduction"] == pytest.approx((7.0 - 0.5) / 7.0)
    restored = RefinementSession.from_dict(payload)
    assert restored.events == session.events
    assert restored.refinement_hours == session.refinement_hours
