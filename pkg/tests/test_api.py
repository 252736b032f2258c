from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from ethosboard.api import create_app
from ethosboard.decks import default_deck
from ethosboard.engine import WorkshopEngine, canonical_json
from ethosboard.model import Stakeholder, TokenAllocation, TriggerCategory, VerdictOutcome
from ethosboard.storage import load_session

from .conftest import TickClock

FOUR = [
    {"stakeholder_id": "fac", "display_name": "Facilitator", "role_label": "facilitation",
     "required": False, "facilitator": True},
    {"stakeholder_id": "s1", "display_name": "Product", "role_label": "product"},
    {"stakeholder_id": "s2", "display_name": "Dev", "role_label": "development"},
    {"stakeholder_id": "s3", "display_name": "Compliance", "role_label": "compliance"},
]


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path / "sessions", clock=TickClock())
    with TestClient(app) as c:
        yield c


def make_session(client) -> tuple[str, dict[str, str]]:
    resp = client.post("/sessions", json={"stakeholders": FOUR})
    assert resp.status_code == 201, resp.text
    body = resp.json()
    return body["session_id"], body["tokens"]


def auth(tokens, sid):
    return {"Authorization": f"Bearer {tokens[sid]}"}


def uniform(deck=None):
    deck = deck or default_deck()
    return {str(c): 1 for c in deck.card_ids}


def open_round(client, session, tokens):
    resp = client.post(f"/sessions/{session}/rounds", json={}, headers=auth(tokens, "fac"))
    assert resp.status_code == 201, resp.text
    return resp.json()["round_index"]


def submit_all(client, session, tokens, round_index, sids=("s1", "s2", "s3")):
    for sid in sids:
        resp = client.put(
            f"/sessions/{session}/rounds/{round_index}/allocations/{sid}",
            json={"tokens": uniform()},
            headers=auth(tokens, sid),
        )
        assert resp.status_code == 200, resp.text


class TestSessionLifecycle:
    def test_create_returns_tokens_for_everyone(self, client):
        session, tokens = make_session(client)
        assert set(tokens) == {"fac", "s1", "s2", "s3"}

    def test_create_with_zero_stakeholders_is_400(self, client):
        resp = client.post("/sessions", json={"stakeholders": []})
        assert resp.status_code == 400
        assert resp.json()["machine_code"] == "NoStakeholders"

    def test_unknown_session_is_404(self, client):
        resp = client.get("/sessions/nope")
        assert resp.status_code == 404
        assert resp.json()["machine_code"] == "UnknownSession"

    def test_register_stakeholder_issues_token(self, client):
        session, _ = make_session(client)
        resp = client.post(
            f"/sessions/{session}/stakeholders",
            json={"stakeholder_id": "s4", "display_name": "Risk", "role_label": "risk"},
        )
        assert resp.status_code == 201
        assert resp.json()["token"]

    def test_status_view_reports_phase_and_budget(self, client):
        session, _ = make_session(client)
        view = client.get(f"/sessions/{session}").json()
        assert view["phase"] == "setup"
        assert view["token_budget"] == 21
        assert len(view["deck"]["cards"]) == 21


class TestAllocationEndpoints:
    def test_budget_21_accepted_with_round_status(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        resp = client.put(
            f"/sessions/{session}/rounds/0/allocations/s1",
            json={"tokens": uniform(), "rationale": "even spread"},
            headers=auth(tokens, "s1"),
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["phase"] == "setup"
        assert body["round"]["submitted"] == ["s1"]
        assert body["round"]["awaiting"] == ["s2", "s3"]

    def test_budget_20_is_400_budget_mismatch(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        short = uniform()
        short["8"] = 0
        resp = client.put(
            f"/sessions/{session}/rounds/0/allocations/s1",
            json={"tokens": short},
            headers=auth(tokens, "s1"),
        )
        assert resp.status_code == 400
        assert resp.json()["machine_code"] == "BudgetMismatch"

    def test_submitting_for_someone_else_is_403(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        resp = client.put(
            f"/sessions/{session}/rounds/0/allocations/s2",
            json={"tokens": uniform()},
            headers=auth(tokens, "s1"),
        )
        assert resp.status_code == 403
        assert resp.json()["machine_code"] == "NotPermitted"

    def test_facilitator_may_submit_on_behalf(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        resp = client.put(
            f"/sessions/{session}/rounds/0/allocations/s2",
            json={"tokens": uniform()},
            headers=auth(tokens, "fac"),
        )
        assert resp.status_code == 200

    def test_missing_token_is_403(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        resp = client.put(
            f"/sessions/{session}/rounds/0/allocations/s1", json={"tokens": uniform()}
        )
        assert resp.status_code == 403

    def test_close_requires_facilitator(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        submit_all(client, session, tokens, 0)
        resp = client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "s1"))
        assert resp.status_code == 403
        resp = client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "fac"))
        assert resp.status_code == 200
        assert resp.json()["phase"] == "development"

    def test_close_with_missing_allocations_is_409(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        submit_all(client, session, tokens, 0, sids=("s1", "s2"))
        resp = client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "fac"))
        assert resp.status_code == 409
        assert resp.json()["machine_code"] == "MissingAllocations"

    def test_concurrent_distinct_submissions_all_succeed(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        results: dict[str, int] = {}

        def put(sid: str):
            resp = client.put(
                f"/sessions/{session}/rounds/0/allocations/{sid}",
                json={"tokens": uniform()},
                headers=auth(tokens, sid),
            )
            results[sid] = resp.status_code

        threads = [threading.Thread(target=put, args=(sid,)) for sid in ("s1", "s2", "s3")]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert set(results.values()) == {200}
        audit = client.get(f"/sessions/{session}/audit").json()["events"]
        assert [e["sequence"] for e in audit] == list(range(1, len(audit) + 1))


class TestWorkflowEndpoints:
    def _to_development(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        submit_all(client, session, tokens, 0)
        client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "fac"))
        return session, tokens

    def test_verdict_in_development_is_409_wrong_phase(self, client):
        session, tokens = self._to_development(client)
        resp = client.post(
            f"/sessions/{session}/verdict",
            json={"outcome": "sufficient", "rationale": "premature"},
            headers=auth(tokens, "fac"),
        )
        assert resp.status_code == 409
        assert resp.json()["machine_code"] == "WrongPhase"

    def test_trigger_fire_moves_to_reprioritization(self, client):
        session, tokens = self._to_development(client)
        resp = client.post(
            f"/sessions/{session}/triggers",
            json={"description": "privacy regulation update", "category": "regulation"},
            headers=auth(tokens, "s3"),
        )
        tid = resp.json()["trigger_id"]
        resp = client.post(
            f"/sessions/{session}/triggers/{tid}/fire", headers=auth(tokens, "fac")
        )
        assert resp.status_code == 200
        assert resp.json()["phase"] == "reprioritization"

    def test_fire_unknown_trigger_is_404(self, client):
        session, tokens = self._to_development(client)
        resp = client.post(
            f"/sessions/{session}/triggers/ghost/fire", headers=auth(tokens, "fac")
        )
        assert resp.status_code == 404

    def test_sprint_recorded(self, client):
        session, tokens = self._to_development(client)
        resp = client.post(
            f"/sessions/{session}/sprints",
            json={"selected_card_ids": [7, 8], "justification": "privacy first"},
            headers=auth(tokens, "fac"),
        )
        assert resp.status_code == 201

    def test_scores_flow_to_outcome_picture(self, client):
        session, tokens = self._to_development(client)
        client.post(f"/sessions/{session}/assessment/start", headers=auth(tokens, "fac"))
        for sid in ("s1", "s2", "s3"):
            resp = client.put(
                f"/sessions/{session}/scores/{sid}",
                json={"scores": {str(c): 5 for c in range(1, 22)}},
                headers=auth(tokens, sid),
            )
            assert resp.status_code == 200
        assert resp.json()["assessment_complete"] is True
        pic = client.get(f"/sessions/{session}/picture", params={"kind": "outcome"})
        assert pic.status_code == 200
        model = pic.json()
        assert model["kind"] == "outcome"
        assert {b["color"] for b in model["bubbles"]} == {"green"}

    def test_score_out_of_range_is_400(self, client):
        session, tokens = self._to_development(client)
        scores = {str(c): 5 for c in range(1, 22)}
        scores["8"] = 6
        resp = client.put(
            f"/sessions/{session}/scores/s1",
            json={"scores": scores},
            headers=auth(tokens, "s1"),
        )
        assert resp.status_code == 400
        assert resp.json()["machine_code"] == "ScoreOutOfRange"

    def test_verdict_sufficient_concludes(self, client):
        session, tokens = self._to_development(client)
        for sid in ("s1", "s2", "s3"):
            client.put(
                f"/sessions/{session}/scores/{sid}",
                json={"scores": {str(c): 4 for c in range(1, 22)}},
                headers=auth(tokens, sid),
            )
        resp = client.post(
            f"/sessions/{session}/verdict",
            json={"outcome": "sufficient", "rationale": "good coverage"},
            headers=auth(tokens, "fac"),
        )
        assert resp.status_code == 200
        assert resp.json()["phase"] == "concluded"


class TestPictureEndpoints:
    def _with_baseline(self, client):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        submit_all(client, session, tokens, 0)
        client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "fac"))
        return session, tokens

    def test_target_picture_chart_model(self, client):
        session, _ = self._with_baseline(client)
        resp = client.get(f"/sessions/{session}/picture", params={"kind": "target"})
        assert resp.status_code == 200
        model = resp.json()
        assert model["kind"] == "target_state"
        assert len(model["bubbles"]) == 21

    def test_picture_before_baseline_is_409(self, client):
        session, tokens = make_session(client)
        resp = client.get(f"/sessions/{session}/picture", params={"kind": "target"})
        assert resp.status_code == 409
        assert resp.json()["machine_code"] == "NoBaseline"

    def test_svg_rendering(self, client):
        session, _ = self._with_baseline(client)
        resp = client.get(f"/sessions/{session}/picture.svg", params={"kind": "target"})
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("image/svg+xml")
        assert resp.content.startswith(b"<?xml")

    def test_delta_report(self, client):
        session, _ = self._with_baseline(client)
        resp = client.get(f"/sessions/{session}/delta")
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["rows"]) == 21
        assert all(r["total_delta"] == 0 for r in body["rows"])

    def test_audit_listing_gapless_with_payload_refs(self, client):
        session, _ = self._with_baseline(client)
        events = client.get(f"/sessions/{session}/audit").json()["events"]
        assert [e["sequence"] for e in events] == list(range(1, len(events) + 1))
        assert all(len(e["payload_ref"]) == 64 for e in events)


class TestThinness:
    """The API must add no business logic: the same inputs through the
    engine directly and through HTTP yield identical session state."""

    def test_api_and_engine_paths_converge(self, client, tmp_path):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        submit_all(client, session, tokens, 0)
        client.post(f"/sessions/{session}/rounds/0/close", headers=auth(tokens, "fac"))
        client.post(
            f"/sessions/{session}/triggers",
            json={"description": "reg change", "category": "regulation", "trigger_id": "t1"},
            headers=auth(tokens, "fac"),
        )
        client.post(f"/sessions/{session}/triggers/t1/fire", headers=auth(tokens, "fac"))
        client.post(f"/sessions/{session}/rounds", json={}, headers=auth(tokens, "fac"))
        submit_all(client, session, tokens, 1)
        client.post(f"/sessions/{session}/rounds/1/close", headers=auth(tokens, "fac"))
        for sid in ("s1", "s2", "s3"):
            client.put(
                f"/sessions/{session}/scores/{sid}",
                json={"scores": {str(c): 4 for c in range(1, 22)}},
                headers=auth(tokens, sid),
            )
        client.post(
            f"/sessions/{session}/verdict",
            json={"outcome": "sufficient", "rationale": "done"},
            headers=auth(tokens, "fac"),
        )
        api_state = client.app.state.registry.get(session).engine.state

        # same script, engine only, same deterministic clock
        eng = WorkshopEngine.create_session(
            default_deck(),
            [
                Stakeholder("fac", "Facilitator", "facilitation", required=False, facilitator=True),
                Stakeholder("s1", "Product", "product"),
                Stakeholder("s2", "Dev", "development"),
                Stakeholder("s3", "Compliance", "compliance"),
            ],
            session_id=session,
            clock=TickClock(),
        )
        eng.open_round(actor="fac")
        for sid in ("s1", "s2", "s3"):
            eng.submit_allocation(0, TokenAllocation(sid, {c: 1 for c in range(1, 22)}))
        eng.close_round(0, actor="fac")
        eng.register_trigger("reg change", TriggerCategory.REGULATION, trigger_id="t1", actor="fac")
        eng.fire_trigger("t1", actor="fac")
        eng.open_round(actor="fac")
        for sid in ("s1", "s2", "s3"):
            eng.submit_allocation(1, TokenAllocation(sid, {c: 1 for c in range(1, 22)}))
        eng.close_round(1, actor="fac")
        for sid in ("s1", "s2", "s3"):
            eng.submit_scores(sid, {c: 4 for c in range(1, 22)})
        eng.record_verdict(VerdictOutcome.SUFFICIENT, "done", actor="fac")

        assert canonical_json(api_state.to_dict()) == canonical_json(eng.state.to_dict())
        # identical journals too: sequences, actors, payloads, hash chains
        api_journal = [e.to_dict() for e in client.app.state.registry.get(session).engine.journal]
        assert api_journal == [e.to_dict() for e in eng.journal]

    def test_sessions_survive_registry_restart(self, client, tmp_path):
        session, tokens = make_session(client)
        open_round(client, session, tokens)
        storage = client.app.state.registry.storage_dir
        loaded = load_session(storage / f"{session}.json")
        assert loaded.engine.state.open_round is not None
