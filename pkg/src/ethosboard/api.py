"""HTTP/JSON facade over the workshop engine.

Deliberately thin: every endpoint performs exactly one engine operation
and maps engine errors onto HTTP statuses (400 validation, 403 role,
404 unknown ids, 409 state conflicts).  Stakeholders authenticate with
the bearer token issued at registration; facilitator-only controls are
round/trigger/sprint/assessment/verdict steering.  All timestamps are
server-assigned.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any, Optional

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .decks import default_deck
from .engine import Clock, WorkshopEngine
from .errors import (
    EthosboardError,
    NotPermitted,
    UnknownSession,
    UnsupportedFormat,
)
from .model import (
    Deck,
    Stakeholder,
    TokenAllocation,
    TriggerCategory,
    VerdictOutcome,
    utc_now,
)
from .picture import RENDER_MODE_CONNECTOR, RENDER_MODE_SIZE, RenderConfig, chart_json, render_svg
from .storage import SessionStore, load_session, save_session


class StakeholderIn(BaseModel):
    stakeholder_id: str
    display_name: str
    role_label: str = ""
    required: bool = True
    facilitator: bool = False

    def to_model(self) -> Stakeholder:
        return Stakeholder(
            stakeholder_id=self.stakeholder_id,
            display_name=self.display_name,
            role_label=self.role_label,
            required=self.required,
            facilitator=self.facilitator,
        )


class SessionCreateIn(BaseModel):
    session_id: Optional[str] = None
    deck: Optional[dict[str, Any]] = None  # deck table; omit for the default deck
    stakeholders: list[StakeholderIn] = Field(default_factory=list)
    allow_resubmission: bool = True


class RoundOpenIn(BaseModel):
    trigger_ref: Optional[str] = None


class AllocationIn(BaseModel):
    tokens: dict[int, int]
    rationale: str = ""


class TriggerIn(BaseModel):
    description: str
    category: TriggerCategory = TriggerCategory.OTHER
    trigger_id: Optional[str] = None


class SprintIn(BaseModel):
    selected_card_ids: list[int]
    justification: str
    review_notes: str = ""
    sprint_id: Optional[str] = None


class ScoresIn(BaseModel):
    scores: dict[int, int]


class VerdictIn(BaseModel):
    outcome: VerdictOutcome
    rationale: str = ""


class SessionRegistry:
    """Sessions owned by the service, persisted after every mutation."""

    def __init__(self, storage_dir: Path, clock: Clock = utc_now):
        self.storage_dir = Path(storage_dir)
        self.storage_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self._stores: dict[str, SessionStore] = {}
        self._lock = threading.Lock()

    def path_for(self, session_id: str) -> Path:
        return self.storage_dir / f"{session_id}.json"

    def add(self, store: SessionStore) -> None:
        with self._lock:
            self._stores[store.engine.session_id] = store
        self.persist(store)

    def get(self, session_id: str) -> SessionStore:
        with self._lock:
            store = self._stores.get(session_id)
        if store is not None:
            return store
        path = self.path_for(session_id)
        if not path.exists():
            raise UnknownSession(session_id)
        store = load_session(path, clock=self.clock)
        with self._lock:
            return self._stores.setdefault(session_id, store)

    def persist(self, store: SessionStore) -> None:
        save_session(store, self.path_for(store.engine.session_id))

    def next_session_id(self) -> str:
        with self._lock:
            n = len(self._stores)
        while True:
            n += 1
            candidate = f"session-{n}"
            if candidate not in self._stores and not self.path_for(candidate).exists():
                return candidate


def session_view(store: SessionStore) -> dict[str, Any]:
    """Status payload the workshop UI polls."""
    state = store.engine.state
    open_round = state.open_round
    rounds = [store.engine.round_status(r.round_index) for r in state.rounds]
    return {
        "session_id": state.session_id,
        "phase": state.phase.value,
        "token_budget": state.deck.token_budget,
        "deck": state.deck.to_dict(),
        "stakeholders": [s.to_dict() for s in state.stakeholders],
        "rounds": rounds,
        "open_round": open_round.round_index if open_round else None,
        "baseline_picture_id": state.baseline_picture_id,
        "has_outcome_picture": state.latest_outcome_picture is not None,
        "pending_scores_from": sorted(state.pending_scores),
        "awaiting_scores": sorted(set(state.required_ids) - set(state.pending_scores))
        if state.phase.value == "assessment" and not state.scores_frozen
        else [],
        "triggers": [t.to_dict() for t in state.triggers],
        "sprints": [s.to_dict() for s in state.sprints],
        "verdicts": [v.to_dict() for v in state.verdicts],
    }


def create_app(storage_dir: str | Path, *, clock: Clock = utc_now) -> FastAPI:
    app = FastAPI(title="ethosboard", version="0.1.0")
    registry = SessionRegistry(Path(storage_dir), clock)
    app.state.registry = registry

    @app.exception_handler(EthosboardError)
    async def engine_error_handler(_request: Request, exc: EthosboardError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"machine_code": exc.machine_code, "message": str(exc)},
        )

    def caller(
        session_id: str, authorization: Optional[str] = Header(default=None)
    ) -> Stakeholder:
        """Resolve the bearer token to a registered stakeholder."""
        store = registry.get(session_id)
        if not authorization or not authorization.startswith("Bearer "):
            raise NotPermitted("missing bearer token")
        sid = store.stakeholder_for_token(authorization.removeprefix("Bearer ").strip())
        if sid is None:
            raise NotPermitted("unrecognized token")
        return store.engine.state.stakeholder(sid)

    def facilitator(who: Stakeholder = Depends(caller)) -> Stakeholder:
        if not who.facilitator:
            raise NotPermitted(f"'{who.stakeholder_id}' is not a facilitator")
        return who

    # -- session lifecycle --------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreateIn):
        deck = Deck.from_dict(body.deck) if body.deck else default_deck()
        engine = WorkshopEngine.create_session(
            deck,
            [s.to_model() for s in body.stakeholders],
            session_id=body.session_id or registry.next_session_id(),
            allow_resubmission=body.allow_resubmission,
            clock=registry.clock,
        )
        store = SessionStore(engine)
        registry.add(store)
        return {
            "session_id": engine.session_id,
            "phase": engine.state.phase.value,
            "tokens": dict(sorted(store.auth_tokens.items())),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(registry.get(session_id))

    @app.post("/sessions/{session_id}/stakeholders", status_code=201)
    def add_stakeholder(session_id: str, body: StakeholderIn):
        store = registry.get(session_id)
        who = store.engine.register_stakeholder(body.to_model())
        token = store.issue_token(who.stakeholder_id)
        registry.persist(store)
        return {"stakeholder_id": who.stakeholder_id, "token": token}

    # -- rounds ---------------------------------------------------------------

    @app.post("/sessions/{session_id}/rounds", status_code=201)
    def open_round(session_id: str, body: RoundOpenIn, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        index = store.engine.open_round(body.trigger_ref, actor=who.stakeholder_id)
        registry.persist(store)
        return {"round_index": index}

    @app.put("/sessions/{session_id}/rounds/{round_index}/allocations/{stakeholder_id}")
    def put_allocation(
        session_id: str,
        round_index: int,
        stakeholder_id: str,
        body: AllocationIn,
        who: Stakeholder = Depends(caller),
    ):
        store = registry.get(session_id)
        if who.stakeholder_id != stakeholder_id and not who.facilitator:
            raise NotPermitted("only the stakeholder or a facilitator may submit this allocation")
        store.engine.submit_allocation(
            round_index,
            TokenAllocation(
                stakeholder_id=stakeholder_id, tokens=body.tokens, rationale=body.rationale
            ),
            actor=who.stakeholder_id,
        )
        registry.persist(store)
        return {
            "round": store.engine.round_status(round_index),
            "phase": store.engine.state.phase.value,
        }

    @app.post("/sessions/{session_id}/rounds/{round_index}/close")
    def close_round(session_id: str, round_index: int, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        priorities = store.engine.close_round(round_index, actor=who.stakeholder_id)
        registry.persist(store)
        return {
            "round_index": round_index,
            "priorities": {str(c): t for c, t in sorted(priorities.totals.items())},
            "phase": store.engine.state.phase.value,
        }

    # -- triggers / sprints ------------------------------------------------------

    @app.post("/sessions/{session_id}/triggers", status_code=201)
    def register_trigger(session_id: str, body: TriggerIn, who: Stakeholder = Depends(caller)):
        store = registry.get(session_id)
        tid = store.engine.register_trigger(
            body.description, body.category, trigger_id=body.trigger_id, actor=who.stakeholder_id
        )
        registry.persist(store)
        return {"trigger_id": tid}

    @app.post("/sessions/{session_id}/triggers/{trigger_id}/fire")
    def fire_trigger(session_id: str, trigger_id: str, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        trig = store.engine.fire_trigger(trigger_id, actor=who.stakeholder_id)
        registry.persist(store)
        return {"trigger": trig.to_dict(), "phase": store.engine.state.phase.value}

    @app.post("/sessions/{session_id}/sprints", status_code=201)
    def record_sprint(session_id: str, body: SprintIn, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        sprint_id = store.engine.record_sprint(
            body.selected_card_ids,
            body.justification,
            body.review_notes,
            sprint_id=body.sprint_id,
            actor=who.stakeholder_id,
        )
        registry.persist(store)
        return {"sprint_id": sprint_id}

    # -- assessment / verdict ---------------------------------------------------

    @app.post("/sessions/{session_id}/assessment/start")
    def start_assessment(session_id: str, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        store.engine.start_assessment(actor=who.stakeholder_id)
        registry.persist(store)
        return {"phase": store.engine.state.phase.value}

    @app.put("/sessions/{session_id}/scores/{stakeholder_id}")
    def put_scores(
        session_id: str,
        stakeholder_id: str,
        body: ScoresIn,
        who: Stakeholder = Depends(caller),
    ):
        store = registry.get(session_id)
        if who.stakeholder_id != stakeholder_id and not who.facilitator:
            raise NotPermitted("only the stakeholder or a facilitator may submit these scores")
        store.engine.submit_scores(stakeholder_id, body.scores, actor=who.stakeholder_id)
        registry.persist(store)
        state = store.engine.state
        return {
            "phase": state.phase.value,
            "assessment_complete": state.scores_frozen,
            "awaiting": sorted(set(state.required_ids) - set(state.pending_scores))
            if not state.scores_frozen
            else [],
        }

    @app.post("/sessions/{session_id}/verdict")
    def record_verdict(session_id: str, body: VerdictIn, who: Stakeholder = Depends(facilitator)):
        store = registry.get(session_id)
        verdict = store.engine.record_verdict(
            body.outcome, body.rationale, actor=who.stakeholder_id
        )
        registry.persist(store)
        return {"verdict": verdict.to_dict(), "phase": store.engine.state.phase.value}

    # -- pictures / reports -------------------------------------------------------

    def _picture(store: SessionStore, kind: str):
        if kind == "target":
            return store.engine.target_picture()
        if kind == "outcome":
            return store.engine.outcome_picture()
        raise UnsupportedFormat(kind)

    @app.get("/sessions/{session_id}/picture")
    def get_picture(session_id: str, kind: str = Query(default="target")):
        store = registry.get(session_id)
        return Response(
            content=chart_json(_picture(store, kind)), media_type="application/json"
        )

    @app.get("/sessions/{session_id}/picture.svg")
    def get_picture_svg(
        session_id: str,
        kind: str = Query(default="target"),
        mode: str = Query(default=RENDER_MODE_SIZE),
    ):
        store = registry.get(session_id)
        if mode not in (RENDER_MODE_SIZE, RENDER_MODE_CONNECTOR):
            raise UnsupportedFormat(mode)
        svg = render_svg(_picture(store, kind), RenderConfig(mode=mode))
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/sessions/{session_id}/delta")
    def get_delta(session_id: str):
        return registry.get(session_id).engine.delta().to_dict()

    @app.get("/sessions/{session_id}/audit")
    def get_audit(session_id: str):
        store = registry.get(session_id)
        return {"events": [e.to_dict() for e in store.engine.journal]}

    return app
