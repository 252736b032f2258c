"""Event-sourced workshop engine.

Every state change is a command that validates against the current
session state, appends one or more hash-chained audit events, and folds
them into a fresh immutable ``SessionState``.  Replaying the journal from
empty reproduces the state exactly; that equivalence is what persistence
verifies on every load.

Commands are serialized per session through a lock; reads hand out
immutable snapshots and never block writers for long.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Any, Callable, Mapping, Optional, Sequence

from . import picture as picture_mod
from .errors import (
    AssessmentAlreadyComplete,
    BaselineAlreadyExists,
    DuplicateStakeholder,
    DuplicateSubmission,
    DuplicateTrigger,
    EmptyRound,
    IncompleteAssessment,
    IncompleteScores,
    MissingAllocations,
    MissingTrigger,
    NoBaseline,
    NoOpenRound,
    NoOutcomePicture,
    NoStakeholders,
    RoundAlreadyOpen,
    RoundClosed,
    ScoreOutOfRange,
    TriggerAlreadyFired,
    UnknownCard,
    UnknownRound,
    UnknownStakeholder,
    UnknownTrigger,
    WrongPhase,
)
from .metrics import card_priorities
from .model import (
    CoverageAssessment,
    Deck,
    Phase,
    PhaseEvent,
    PrioritizationRound,
    RoundStatus,
    SprintRecord,
    Stakeholder,
    TokenAllocation,
    Trigger,
    TriggerCategory,
    TriggerStatus,
    Verdict,
    VerdictOutcome,
    iso_utc,
    next_phase,
    parse_utc,
    utc_now,
    validate_allocation,
)
from .picture import DeltaReport, SituationalPicture, delta_report

Clock = Callable[[], datetime]

GENESIS_HASH = "0" * 64


def canonical_json(obj: Any) -> str:
    """Stable JSON used for digests and byte-equality checks."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EventKind:
    SESSION_CREATED = "session_created"
    STAKEHOLDER_REGISTERED = "stakeholder_registered"
    ROUND_OPENED = "round_opened"
    ALLOCATION_SUBMITTED = "allocation_submitted"
    ROUND_CLOSED = "round_closed"
    BASELINE_CAPTURED = "baseline_captured"
    TRIGGER_REGISTERED = "trigger_registered"
    TRIGGER_FIRED = "trigger_fired"
    SPRINT_RECORDED = "sprint_recorded"
    SCORES_SUBMITTED = "scores_submitted"
    PICTURE_BUILT = "picture_built"
    VERDICT_RECORDED = "verdict_recorded"
    PHASE_CHANGED = "phase_changed"
    PICTURE_EXPORTED = "picture_exported"

    ALL = (
        SESSION_CREATED, STAKEHOLDER_REGISTERED, ROUND_OPENED, ALLOCATION_SUBMITTED,
        ROUND_CLOSED, BASELINE_CAPTURED, TRIGGER_REGISTERED, TRIGGER_FIRED,
        SPRINT_RECORDED, SCORES_SUBMITTED, PICTURE_BUILT, VERDICT_RECORDED,
        PHASE_CHANGED, PICTURE_EXPORTED,
    )


@dataclass(frozen=True)
class AuditEvent:
    """One link in the append-only decision journal.

    ``payload_ref`` digests the affected record; ``event_hash`` chains to
    the predecessor so any later mutation of the journal is detectable.
    """

    sequence: int
    timestamp: datetime
    actor: str
    kind: str
    payload: Mapping[str, Any]
    payload_ref: str
    prev_hash: str
    event_hash: str

    def __post_init__(self):
        object.__setattr__(self, "payload", dict(self.payload))

    def hashed_content(self) -> dict[str, Any]:
        return {
            "sequence": self.sequence,
            "timestamp": iso_utc(self.timestamp),
            "actor": self.actor,
            "kind": self.kind,
            "payload": dict(self.payload),
            "prev_hash": self.prev_hash,
        }

    def to_dict(self) -> dict[str, Any]:
        d = self.hashed_content()
        d["payload_ref"] = self.payload_ref
        d["event_hash"] = self.event_hash
        return d

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "AuditEvent":
        return AuditEvent(
            sequence=int(d["sequence"]),
            timestamp=parse_utc(d["timestamp"]),
            actor=str(d["actor"]),
            kind=str(d["kind"]),
            payload=dict(d["payload"]),
            payload_ref=str(d["payload_ref"]),
            prev_hash=str(d["prev_hash"]),
            event_hash=str(d["event_hash"]),
        )


def make_event(
    sequence: int,
    timestamp: datetime,
    actor: str,
    kind: str,
    payload: Mapping[str, Any],
    prev_hash: str,
) -> AuditEvent:
    payload = dict(payload)
    payload_ref = sha256_hex(canonical_json(payload))
    draft = AuditEvent(
        sequence=sequence,
        timestamp=timestamp,
        actor=actor,
        kind=kind,
        payload=payload,
        payload_ref=payload_ref,
        prev_hash=prev_hash,
        event_hash="",
    )
    event_hash = sha256_hex(canonical_json(draft.hashed_content()))
    return replace(draft, event_hash=event_hash)


# -- session state -----------------------------------------------------------

@dataclass(frozen=True)
class SessionState:
    """Materialized view of a session; always the fold of its journal."""

    session_id: str
    phase: Phase
    deck: Deck
    allow_resubmission: bool = True
    stakeholders: tuple[Stakeholder, ...] = ()
    rounds: tuple[PrioritizationRound, ...] = ()
    pictures: tuple[SituationalPicture, ...] = ()
    baseline_picture_id: Optional[str] = None
    assessments: tuple[CoverageAssessment, ...] = ()
    pending_scores: Mapping[str, Mapping[int, int]] = field(default_factory=dict)
    scores_frozen: bool = False
    verdicts: tuple[Verdict, ...] = ()
    triggers: tuple[Trigger, ...] = ()
    sprints: tuple[SprintRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "pending_scores",
            {sid: dict(cards) for sid, cards in self.pending_scores.items()},
        )

    # lookups ---------------------------------------------------------------

    def stakeholder(self, stakeholder_id: str) -> Stakeholder:
        for s in self.stakeholders:
            if s.stakeholder_id == stakeholder_id:
                return s
        raise UnknownStakeholder(stakeholder_id)

    def has_stakeholder(self, stakeholder_id: str) -> bool:
        return any(s.stakeholder_id == stakeholder_id for s in self.stakeholders)

    @property
    def required_ids(self) -> list[str]:
        return [s.stakeholder_id for s in self.stakeholders if s.required]

    def trigger(self, trigger_id: str) -> Trigger:
        for t in self.triggers:
            if t.trigger_id == trigger_id:
                return t
        raise UnknownTrigger(trigger_id)

    def has_trigger(self, trigger_id: str) -> bool:
        return any(t.trigger_id == trigger_id for t in self.triggers)

    def round(self, round_index: int) -> PrioritizationRound:
        if 0 <= round_index < len(self.rounds):
            return self.rounds[round_index]
        raise UnknownRound(round_index)

    @property
    def open_round(self) -> Optional[PrioritizationRound]:
        for r in self.rounds:
            if r.is_open:
                return r
        return None

    @property
    def latest_closed_round(self) -> Optional[PrioritizationRound]:
        closed = [r for r in self.rounds if not r.is_open]
        return closed[-1] if closed else None

    @property
    def baseline_picture(self) -> Optional[SituationalPicture]:
        if self.baseline_picture_id is None:
            return None
        for p in self.pictures:
            if p.picture_id == self.baseline_picture_id:
                return p
        return None

    @property
    def outcome_pictures(self) -> tuple[SituationalPicture, ...]:
        return tuple(p for p in self.pictures if p.kind == picture_mod.PictureKind.OUTCOME)

    @property
    def latest_outcome_picture(self) -> Optional[SituationalPicture]:
        outcomes = self.outcome_pictures
        return outcomes[-1] if outcomes else None

    # serialization -----------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "phase": self.phase.value,
            "deck": self.deck.to_dict(),
            "allow_resubmission": self.allow_resubmission,
            "stakeholders": [s.to_dict() for s in self.stakeholders],
            "rounds": [r.to_dict() for r in self.rounds],
            "pictures": [p.to_chart_model() for p in self.pictures],
            "baseline_picture_id": self.baseline_picture_id,
            "assessments": [a.to_dict() for a in self.assessments],
            "pending_scores": {
                sid: {str(c): v for c, v in sorted(cards.items())}
                for sid, cards in sorted(self.pending_scores.items())
            },
            "scores_frozen": self.scores_frozen,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "triggers": [t.to_dict() for t in self.triggers],
            "sprints": [s.to_dict() for s in self.sprints],
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "SessionState":
        return SessionState(
            session_id=str(d["session_id"]),
            phase=Phase(d["phase"]),
            deck=Deck.from_dict(d["deck"]),
            allow_resubmission=bool(d.get("allow_resubmission", True)),
            stakeholders=tuple(Stakeholder.from_dict(s) for s in d["stakeholders"]),
            rounds=tuple(PrioritizationRound.from_dict(r) for r in d["rounds"]),
            pictures=tuple(
                SituationalPicture.from_chart_model(p) for p in d["pictures"]
            ),
            baseline_picture_id=d.get("baseline_picture_id"),
            assessments=tuple(CoverageAssessment.from_dict(a) for a in d["assessments"]),
            pending_scores={
                sid: {int(c): int(v) for c, v in cards.items()}
                for sid, cards in d["pending_scores"].items()
            },
            scores_frozen=bool(d.get("scores_frozen", False)),
            verdicts=tuple(Verdict.from_dict(v) for v in d["verdicts"]),
            triggers=tuple(Trigger.from_dict(t) for t in d["triggers"]),
            sprints=tuple(SprintRecord.from_dict(s) for s in d["sprints"]),
        )


# -- the fold ------------------------------------------------------------------

def apply_event(state: Optional[SessionState], event: AuditEvent) -> SessionState:
    """Fold one event into the state.  Pure and total over journal events:
    replaying a journal through this function reconstructs the session."""
    p = event.payload
    kind = event.kind

    if kind == EventKind.SESSION_CREATED:
        if state is not None:
            raise ValueError("session_created must be the first event")
        return SessionState(
            session_id=p["session_id"],
            phase=Phase.SETUP,
            deck=Deck.from_dict(p["deck"]),
            allow_resubmission=bool(p.get("allow_resubmission", True)),
        )

    if state is None:
        raise ValueError(f"event {event.sequence} ({kind}) arrived before session_created")

    if kind == EventKind.STAKEHOLDER_REGISTERED:
        who = Stakeholder.from_dict(p["stakeholder"])
        return replace(state, stakeholders=state.stakeholders + (who,))

    if kind == EventKind.ROUND_OPENED:
        r = PrioritizationRound(
            round_index=int(p["round_index"]),
            opened_at=parse_utc(p["opened_at"]),
            trigger_ref=p.get("trigger_ref"),
        )
        return replace(state, rounds=state.rounds + (r,))

    if kind == EventKind.ALLOCATION_SUBMITTED:
        idx = int(p["round_index"])
        alloc = TokenAllocation.from_dict(p["allocation"])
        rounds = list(state.rounds)
        rounds[idx] = rounds[idx].with_allocation(alloc)
        return replace(state, rounds=tuple(rounds))

    if kind == EventKind.ROUND_CLOSED:
        idx = int(p["round_index"])
        rounds = list(state.rounds)
        rounds[idx] = rounds[idx].closed(parse_utc(p["closed_at"]))
        triggers = state.triggers
        ref = rounds[idx].trigger_ref
        if ref is not None:
            triggers = tuple(
                t.resolved() if t.trigger_id == ref else t for t in triggers
            )
        return replace(state, rounds=tuple(rounds), triggers=triggers)

    if kind == EventKind.PICTURE_BUILT:
        pic = SituationalPicture.from_chart_model(p["picture"])
        new = replace(state, pictures=state.pictures + (pic,))
        if "assessment" in p:
            assessment = CoverageAssessment.from_dict(p["assessment"])
            new = replace(
                new,
                assessments=new.assessments + (assessment,),
                pending_scores={},
                scores_frozen=True,
            )
        return new

    if kind == EventKind.BASELINE_CAPTURED:
        return replace(state, baseline_picture_id=p["picture_id"])

    if kind == EventKind.TRIGGER_REGISTERED:
        t = Trigger.from_dict(p["trigger"])
        return replace(state, triggers=state.triggers + (t,))

    if kind == EventKind.TRIGGER_FIRED:
        fired_at = parse_utc(p["fired_at"])
        triggers = tuple(
            t.fired(fired_at) if t.trigger_id == p["trigger_id"] else t
            for t in state.triggers
        )
        return replace(state, triggers=triggers)

    if kind == EventKind.SPRINT_RECORDED:
        s = SprintRecord.from_dict(p["sprint"])
        return replace(state, sprints=state.sprints + (s,))

    if kind == EventKind.SCORES_SUBMITTED:
        pending = {sid: dict(cards) for sid, cards in state.pending_scores.items()}
        pending[p["stakeholder_id"]] = {int(c): int(v) for c, v in p["scores"].items()}
        return replace(state, pending_scores=pending)

    if kind == EventKind.VERDICT_RECORDED:
        v = Verdict.from_dict(p["verdict"])
        return replace(state, verdicts=state.verdicts + (v,))

    if kind == EventKind.PHASE_CHANGED:
        new_phase = Phase(p["to"])
        new = replace(state, phase=new_phase)
        if new_phase is Phase.ASSESSMENT:
            new = replace(new, scores_frozen=False)
        return new

    if kind == EventKind.PICTURE_EXPORTED:
        return state

    raise ValueError(f"unknown event kind '{kind}' at sequence {event.sequence}")


def replay(journal: Sequence[AuditEvent]) -> SessionState:
    """Reconstruct session state from scratch."""
    state: Optional[SessionState] = None
    for event in journal:
        state = apply_event(state, event)
    if state is None:
        raise ValueError("cannot replay an empty journal")
    return state


# -- the engine ----------------------------------------------------------------

class WorkshopEngine:
    """Serialized command path for one session.

    Construct with :meth:`create_session` or :meth:`from_journal`; all
    mutations go through the public command methods, which append audit
    events and fold them.  ``state`` is always safe to hand out: it is an
    immutable snapshot.
    """

    def __init__(self, state: SessionState, journal: list[AuditEvent], clock: Clock = utc_now):
        self._state = state
        self._journal = journal
        self._clock = clock
        self._lock = threading.RLock()

    # construction -------------------------------------------------------------

    @classmethod
    def create_session(
        cls,
        deck: Deck,
        stakeholders: Sequence[Stakeholder],
        *,
        session_id: str = "session-1",
        allow_resubmission: bool = True,
        clock: Clock = utc_now,
        actor: str = "system",
    ) -> "WorkshopEngine":
        if not stakeholders:
            raise NoStakeholders()
        ids = [s.stakeholder_id for s in stakeholders]
        for sid in ids:
            if ids.count(sid) > 1:
                raise DuplicateStakeholder(sid)
        engine = cls.__new__(cls)
        engine._state = None  # type: ignore[assignment]
        engine._journal = []
        engine._clock = clock
        engine._lock = threading.RLock()
        engine._emit(
            EventKind.SESSION_CREATED,
            actor,
            {
                "session_id": session_id,
                "deck": deck.to_dict(),
                "allow_resubmission": allow_resubmission,
            },
        )
        for s in stakeholders:
            engine._emit(EventKind.STAKEHOLDER_REGISTERED, actor, {"stakeholder": s.to_dict()})
        return engine

    @classmethod
    def from_journal(cls, journal: Sequence[AuditEvent], clock: Clock = utc_now) -> "WorkshopEngine":
        return cls(replay(journal), list(journal), clock)

    # snapshot accessors ---------------------------------------------------------

    @property
    def state(self) -> SessionState:
        return self._state

    @property
    def journal(self) -> tuple[AuditEvent, ...]:
        return tuple(self._journal)

    @property
    def session_id(self) -> str:
        return self._state.session_id

    # internals -------------------------------------------------------------------

    def _emit(self, kind: str, actor: str, payload: Mapping[str, Any]) -> AuditEvent:
        event = make_event(
            sequence=len(self._journal) + 1,
            timestamp=self._clock(),
            actor=actor,
            kind=kind,
            payload=payload,
            prev_hash=self._journal[-1].event_hash if self._journal else GENESIS_HASH,
        )
        self._journal.append(event)
        self._state = apply_event(self._state, event)
        return event

    def _change_phase(self, event: PhaseEvent, actor: str) -> None:
        target = next_phase(self._state.phase, event)
        self._emit(
            EventKind.PHASE_CHANGED,
            actor,
            {"from": self._state.phase.value, "to": target.value, "event": event.value},
        )

    # commands ----------------------------------------------------------------------

    def register_stakeholder(self, stakeholder: Stakeholder, *, actor: str = "system") -> Stakeholder:
        with self._lock:
            if self._state.phase is Phase.CONCLUDED:
                raise WrongPhase(self._state.phase.value, "register a stakeholder")
            if self._state.has_stakeholder(stakeholder.stakeholder_id):
                raise DuplicateStakeholder(stakeholder.stakeholder_id)
            self._emit(
                EventKind.STAKEHOLDER_REGISTERED, actor, {"stakeholder": stakeholder.to_dict()}
            )
            return stakeholder

    def open_round(self, trigger_ref: Optional[str] = None, *, actor: str = "system") -> int:
        with self._lock:
            state = self._state
            current = state.open_round
            if current is not None:
                raise RoundAlreadyOpen(current.round_index)
            if state.phase is Phase.SETUP:
                if state.rounds:
                    raise WrongPhase(state.phase.value, "open another baseline round")
                if not state.required_ids:
                    raise NoStakeholders()
                round_index, ref = 0, None
            elif state.phase is Phase.REPRIORITIZATION:
                round_index = len(state.rounds)
                ref = trigger_ref or self._latest_unconsumed_fired_trigger()
                if ref is None:
                    raise MissingTrigger()
                trig = state.trigger(ref)  # UnknownTrigger if absent
                if trig.status is not TriggerStatus.FIRED:
                    raise MissingTrigger()
            else:
                raise WrongPhase(state.phase.value, "open a round")
            self._emit(
                EventKind.ROUND_OPENED,
                actor,
                {
                    "round_index": round_index,
                    "opened_at": iso_utc(self._clock()),
                    "trigger_ref": ref,
                },
            )
            return round_index

    def _latest_unconsumed_fired_trigger(self) -> Optional[str]:
        consumed = {r.trigger_ref for r in self._state.rounds if r.trigger_ref}
        candidates = [
            t.trigger_id
            for t in self._state.triggers
            if t.status is TriggerStatus.FIRED and t.trigger_id not in consumed
        ]
        return candidates[-1] if candidates else None

    def submit_allocation(
        self, round_index: int, alloc: TokenAllocation, *, actor: Optional[str] = None
    ) -> None:
        with self._lock:
            state = self._state
            round_ = state.round(round_index)
            if not round_.is_open:
                raise RoundClosed(round_index)
            if not state.has_stakeholder(alloc.stakeholder_id):
                raise UnknownStakeholder(alloc.stakeholder_id)
            validate_allocation(alloc, state.deck)
            replaced = alloc.stakeholder_id in round_.allocations
            if replaced and not state.allow_resubmission:
                raise DuplicateSubmission(alloc.stakeholder_id, round_index)
            self._emit(
                EventKind.ALLOCATION_SUBMITTED,
                actor or alloc.stakeholder_id,
                {
                    "round_index": round_index,
                    "allocation": alloc.to_dict(),
                    "replaced": replaced,
                },
            )

    def close_round(self, round_index: Optional[int] = None, *, actor: str = "system"):
        """Close the round, compute priorities; closing round 0 also
        captures the baseline picture and moves the session to
        development."""
        with self._lock:
            state = self._state
            if round_index is None:
                current = state.open_round
                if current is None:
                    raise NoOpenRound()
                round_index = current.round_index
            round_ = state.round(round_index)
            if not round_.is_open:
                raise RoundClosed(round_index)
            missing = sorted(set(state.required_ids) - set(round_.allocations))
            if missing:
                raise MissingAllocations(missing)
            if not round_.allocations:
                raise EmptyRound(round_index)
            if round_index == 0 and state.baseline_picture_id is not None:
                raise BaselineAlreadyExists()

            closed_at = self._clock()
            closed = round_.closed(closed_at)
            priorities = card_priorities(closed, state.deck)
            self._emit(
                EventKind.ROUND_CLOSED,
                actor,
                {
                    "round_index": round_index,
                    "closed_at": iso_utc(closed_at),
                    "trigger_ref": round_.trigger_ref,
                    "priorities": {str(c): t for c, t in sorted(priorities.totals.items())},
                },
            )
            if round_index == 0:
                pic = picture_mod.build_target_state(
                    self._state.round(0), self._state.deck, created_at=self._clock()
                )
                self._emit(EventKind.PICTURE_BUILT, actor, {"picture": pic.to_chart_model()})
                self._emit(
                    EventKind.BASELINE_CAPTURED,
                    actor,
                    {"picture_id": pic.picture_id, "round_index": 0},
                )
                self._change_phase(PhaseEvent.BASELINE_CAPTURED, actor)
            elif self._state.phase is Phase.REPRIORITIZATION:
                self._change_phase(PhaseEvent.ROUND_CLOSED, actor)
            return priorities

    def register_trigger(
        self,
        description: str,
        category: TriggerCategory = TriggerCategory.OTHER,
        *,
        trigger_id: Optional[str] = None,
        actor: str = "system",
    ) -> str:
        with self._lock:
            tid = trigger_id or f"trigger-{len(self._state.triggers) + 1}"
            if self._state.has_trigger(tid):
                raise DuplicateTrigger(tid)
            trig = Trigger(trigger_id=tid, description=description, category=category)
            self._emit(EventKind.TRIGGER_REGISTERED, actor, {"trigger": trig.to_dict()})
            return tid

    def fire_trigger(self, trigger_id: str, *, actor: str = "system") -> Trigger:
        with self._lock:
            state = self._state
            if state.phase is not Phase.DEVELOPMENT:
                raise WrongPhase(state.phase.value, "fire a trigger")
            trig = state.trigger(trigger_id)
            if trig.status is not TriggerStatus.REGISTERED:
                raise TriggerAlreadyFired(trigger_id, trig.status.value)
            self._emit(
                EventKind.TRIGGER_FIRED,
                actor,
                {"trigger_id": trigger_id, "fired_at": iso_utc(self._clock())},
            )
            self._change_phase(PhaseEvent.TRIGGER_FIRED, actor)
            return self._state.trigger(trigger_id)

    def record_sprint(
        self,
        selected_card_ids: Sequence[int],
        justification: str,
        review_notes: str = "",
        *,
        sprint_id: Optional[str] = None,
        actor: str = "system",
    ) -> str:
        with self._lock:
            state = self._state
            if state.phase is not Phase.DEVELOPMENT:
                raise WrongPhase(state.phase.value, "record a sprint")
            for card_id in selected_card_ids:
                if card_id not in state.deck:
                    raise UnknownCard(card_id)
            sid = sprint_id or f"sprint-{len(state.sprints) + 1}"
            record = SprintRecord(
                sprint_id=sid,
                selected_card_ids=tuple(selected_card_ids),
                justification=justification,
                review_notes=review_notes,
            )
            self._emit(EventKind.SPRINT_RECORDED, actor, {"sprint": record.to_dict()})
            return sid

    def start_assessment(self, *, actor: str = "system") -> None:
        with self._lock:
            if self._state.phase is not Phase.DEVELOPMENT:
                raise WrongPhase(self._state.phase.value, "start an assessment")
            self._change_phase(PhaseEvent.ASSESSMENT_STARTED, actor)

    def submit_scores(
        self, stakeholder_id: str, scores: Mapping[int, int], *, actor: Optional[str] = None
    ) -> None:
        """Record one stakeholder's full score sheet.  The sheet of the
        last outstanding required stakeholder freezes the assessment and
        builds the outcome picture."""
        with self._lock:
            state = self._state
            if state.phase is Phase.DEVELOPMENT:
                # scoring is what begins sub-assessment work; step the phase
                self._change_phase(PhaseEvent.ASSESSMENT_STARTED, actor or stakeholder_id)
                state = self._state
            if state.phase is not Phase.ASSESSMENT:
                raise WrongPhase(state.phase.value, "submit scores")
            if state.scores_frozen:
                raise AssessmentAlreadyComplete()
            if not state.has_stakeholder(stakeholder_id):
                raise UnknownStakeholder(stakeholder_id)
            for card_id, score in scores.items():
                if card_id not in state.deck:
                    raise UnknownCard(card_id)
                if not isinstance(score, int) or score < 1 or score > 5:
                    raise ScoreOutOfRange(score, card_id)
            missing = [c for c in state.deck.card_ids if c not in scores]
            if missing:
                raise IncompleteScores(stakeholder_id, missing)
            replaced = stakeholder_id in state.pending_scores
            if replaced and not state.allow_resubmission:
                raise DuplicateSubmission(stakeholder_id, -1)
            self._emit(
                EventKind.SCORES_SUBMITTED,
                actor or stakeholder_id,
                {
                    "stakeholder_id": stakeholder_id,
                    "scores": {str(c): v for c, v in sorted(scores.items())},
                    "replaced": replaced,
                },
            )
            if not set(self._state.required_ids) - set(self._state.pending_scores):
                self._freeze_assessment(actor or stakeholder_id)

    def _freeze_assessment(self, actor: str) -> None:
        state = self._state
        assessment = CoverageAssessment(
            assessment_id=f"assessment-{len(state.assessments) + 1}",
            assessed_at=self._clock(),
            scores=state.pending_scores,
        )
        latest = state.latest_closed_round
        if latest is None:
            raise NoBaseline()
        pic = picture_mod.build_outcome_picture(
            latest,
            assessment,
            state.baseline_picture,
            state.deck,
            state.required_ids,
            created_at=self._clock(),
        )
        self._emit(
            EventKind.PICTURE_BUILT,
            actor,
            {"picture": pic.to_chart_model(), "assessment": assessment.to_dict()},
        )

    def record_verdict(
        self, outcome: VerdictOutcome, rationale: str, *, actor: str = "system"
    ) -> Verdict:
        with self._lock:
            state = self._state
            if state.phase is not Phase.ASSESSMENT:
                raise WrongPhase(state.phase.value, "record a verdict")
            pic = state.latest_outcome_picture
            if pic is None or not state.scores_frozen:
                raise NoOutcomePicture()
            verdict = Verdict(
                decided_at=self._clock(),
                outcome=outcome,
                rationale=rationale,
                picture_ref=pic.picture_id,
            )
            self._emit(EventKind.VERDICT_RECORDED, actor, {"verdict": verdict.to_dict()})
            if outcome is VerdictOutcome.SUFFICIENT:
                self._change_phase(PhaseEvent.VERDICT_SUFFICIENT, actor)
            else:
                # a return verdict is itself a stakeholder request for
                # re-prioritization; register it so the next round has a trigger
                tid = f"trigger-{len(self._state.triggers) + 1}"
                trig = Trigger(
                    trigger_id=tid,
                    description=f"assessment verdict: return ({rationale})",
                    category=TriggerCategory.STAKEHOLDER_REQUEST,
                )
                self._emit(EventKind.TRIGGER_REGISTERED, actor, {"trigger": trig.to_dict()})
                self._emit(
                    EventKind.TRIGGER_FIRED,
                    actor,
                    {"trigger_id": tid, "fired_at": iso_utc(self._clock())},
                )
                self._change_phase(PhaseEvent.VERDICT_RETURN, actor)
            return verdict

    def record_export(self, picture_id: str, fmt: str, target: str, *, actor: str = "system") -> None:
        with self._lock:
            self._emit(
                EventKind.PICTURE_EXPORTED,
                actor,
                {"picture_id": picture_id, "format": fmt, "target": target},
            )

    # reads -----------------------------------------------------------------------

    def target_picture(self) -> SituationalPicture:
        pic = self._state.baseline_picture
        if pic is None:
            raise NoBaseline()
        return pic

    def outcome_picture(self) -> SituationalPicture:
        state = self._state
        pic = state.latest_outcome_picture
        if pic is not None:
            return pic
        if state.phase is Phase.ASSESSMENT and state.pending_scores:
            missing = sorted(set(state.required_ids) - set(state.pending_scores))
            raise IncompleteAssessment(missing)
        raise NoOutcomePicture()

    def delta(self) -> DeltaReport:
        state = self._state
        baseline = state.baseline_picture
        if baseline is None:
            raise NoBaseline()
        latest = state.latest_closed_round
        if latest is None:
            raise NoBaseline()
        trigger = state.trigger(latest.trigger_ref) if latest.trigger_ref else None
        return delta_report(baseline, latest, state.deck, trigger)

    def round_status(self, round_index: int) -> dict[str, Any]:
        round_ = self._state.round(round_index)
        required = self._state.required_ids
        submitted = sorted(round_.allocations)
        return {
            "round_index": round_.round_index,
            "status": round_.status.value,
            "trigger_ref": round_.trigger_ref,
            "submitted": submitted,
            "awaiting": sorted(set(required) - set(submitted)),
        }

    def phase_history(self) -> list[tuple[str, str, str]]:
        """(from, to, event) per phase change, straight from the journal."""
        return [
            (e.payload["from"], e.payload["to"], e.payload["event"])
            for e in self._journal
            if e.kind == EventKind.PHASE_CHANGED
        ]
