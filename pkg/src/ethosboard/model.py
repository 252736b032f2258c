"""Core domain types: deck, stakeholders, rounds, assessments, session state.

All types are immutable values once constructed; the engine mutates a
session only by folding audit events into a fresh ``SessionState``.  Each
type knows how to serialize itself to plain JSON-safe dicts (``to_dict`` /
``from_dict``) so journals and snapshots stay lossless.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional

from .errors import (
    BudgetMismatch,
    EmptyDeck,
    IllegalTransition,
    NegativeTokens,
    ScoreOutOfRange,
    UnknownCard,
)

LIKERT_LABELS = {
    1: "strongly disagree",
    2: "disagree",
    3: "neither agree nor disagree",
    4: "agree",
    5: "agree strongly",
}


class Theme(str, Enum):
    """The eight ethical themes a card can belong to."""

    ANALYZE = "analyze"
    DATA = "data"
    TRANSPARENCY = "transparency"
    AGENCY_AND_OVERSIGHT = "agency_and_oversight"
    SAFETY_AND_SECURITY = "safety_and_security"
    WELLBEING = "wellbeing"
    FAIRNESS = "fairness"
    ACCOUNTABILITY = "accountability"


class Phase(str, Enum):
    SETUP = "setup"
    DEVELOPMENT = "development"
    REPRIORITIZATION = "reprioritization"
    ASSESSMENT = "assessment"
    CONCLUDED = "concluded"


class PhaseEvent(str, Enum):
    """Events that may move a session between phases."""

    BASELINE_CAPTURED = "baseline_captured"
    TRIGGER_FIRED = "trigger_fired"
    ROUND_CLOSED = "round_closed"
    ASSESSMENT_STARTED = "assessment_started"
    VERDICT_SUFFICIENT = "verdict_sufficient"
    VERDICT_RETURN = "verdict_return"


#: The legal phase-transition relation.  Everything not listed here raises
#: IllegalTransition.
LEGAL_TRANSITIONS: dict[tuple[Phase, PhaseEvent], Phase] = {
    (Phase.SETUP, PhaseEvent.BASELINE_CAPTURED): Phase.DEVELOPMENT,
    (Phase.DEVELOPMENT, PhaseEvent.TRIGGER_FIRED): Phase.REPRIORITIZATION,
    (Phase.REPRIORITIZATION, PhaseEvent.ROUND_CLOSED): Phase.DEVELOPMENT,
    (Phase.DEVELOPMENT, PhaseEvent.ASSESSMENT_STARTED): Phase.ASSESSMENT,
    (Phase.ASSESSMENT, PhaseEvent.VERDICT_SUFFICIENT): Phase.CONCLUDED,
    (Phase.ASSESSMENT, PhaseEvent.VERDICT_RETURN): Phase.REPRIORITIZATION,
}


def next_phase(phase: Phase, event: PhaseEvent) -> Phase:
    """Resolve a phase transition or raise IllegalTransition."""
    try:
        return LEGAL_TRANSITIONS[(phase, event)]
    except KeyError:
        raise IllegalTransition(phase.value, event.value) from None


class RoundStatus(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class TriggerStatus(str, Enum):
    REGISTERED = "registered"
    FIRED = "fired"
    RESOLVED = "resolved"


class TriggerCategory(str, Enum):
    REGULATION = "regulation"
    STAKEHOLDER_REQUEST = "stakeholder_request"
    OTHER = "other"


class VerdictOutcome(str, Enum):
    SUFFICIENT = "sufficient"
    RETURN = "return_to_reprioritization"


def iso_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def parse_utc(raw: str) -> datetime:
    return datetime.fromisoformat(raw)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Card:
    card_id: int
    name: str
    theme: Theme

    def __post_init__(self):
        if self.card_id <= 0:
            raise ValueError(f"card_id must be positive, got {self.card_id}")
        if not isinstance(self.theme, Theme):
            object.__setattr__(self, "theme", Theme(self.theme))

    def to_dict(self) -> dict[str, Any]:
        return {"card_id": self.card_id, "name": self.name, "theme": self.theme.value}

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Card":
        return Card(card_id=int(d["card_id"]), name=str(d["name"]), theme=Theme(d["theme"]))


@dataclass(frozen=True)
class Deck:
    """An ordered card deck.  The token budget always equals the card count
    so the mean tokens-per-card stays 1 regardless of deck size."""

    cards: tuple[Card, ...]
    token_budget: int = -1  # -1: derive from card count

    def __post_init__(self):
        object.__setattr__(self, "cards", tuple(self.cards))
        if not self.cards:
            raise EmptyDeck()
        if self.token_budget == -1:
            object.__setattr__(self, "token_budget", len(self.cards))
        if self.token_budget != len(self.cards):
            raise ValueError(
                f"token_budget {self.token_budget} must equal card count {len(self.cards)}"
            )
        ids = [c.card_id for c in self.cards]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate card_ids in deck: {dupes}")

    @property
    def card_ids(self) -> tuple[int, ...]:
        return tuple(c.card_id for c in self.cards)

    def card(self, card_id: int) -> Card:
        for c in self.cards:
            if c.card_id == card_id:
                return c
        raise UnknownCard(card_id)

    def __contains__(self, card_id: int) -> bool:
        return any(c.card_id == card_id for c in self.cards)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cards": [c.to_dict() for c in self.cards],
            "token_budget": self.token_budget,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Deck":
        return Deck(
            cards=tuple(Card.from_dict(c) for c in d["cards"]),
            token_budget=int(d.get("token_budget", -1)),
        )


@dataclass(frozen=True)
class Stakeholder:
    """Any actor with a vested interest in the product; roles beyond
    development (compliance, risk management, ...) are first-class."""

    stakeholder_id: str
    display_name: str
    role_label: str = ""
    required: bool = True
    facilitator: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "stakeholder_id": self.stakeholder_id,
            "display_name": self.display_name,
            "role_label": self.role_label,
            "required": self.required,
            "facilitator": self.facilitator,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Stakeholder":
        return Stakeholder(
            stakeholder_id=str(d["stakeholder_id"]),
            display_name=str(d["display_name"]),
            role_label=str(d.get("role_label", "")),
            required=bool(d.get("required", True)),
            facilitator=bool(d.get("facilitator", False)),
        )


@dataclass(frozen=True)
class TokenAllocation:
    """One stakeholder's token distribution over the deck.

    Cards absent from ``tokens`` hold zero tokens; zero is a valid
    assignment everywhere as long as the total equals the budget.
    """

    stakeholder_id: str
    tokens: Mapping[int, int]
    rationale: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", dict(self.tokens))

    def tokens_for(self, card_id: int) -> int:
        return self.tokens.get(card_id, 0)

    @property
    def total(self) -> int:
        return sum(self.tokens.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "stakeholder_id": self.stakeholder_id,
            "tokens": {str(k): v for k, v in sorted(self.tokens.items())},
            "rationale": self.rationale,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "TokenAllocation":
        return TokenAllocation(
            stakeholder_id=str(d["stakeholder_id"]),
            tokens={int(k): int(v) for k, v in d["tokens"].items()},
            rationale=str(d.get("rationale", "")),
        )


def validate_allocation(alloc: TokenAllocation, deck: Deck) -> None:
    """Accept iff every card is known, no count is negative and the sum
    equals the deck budget exactly.  Raises on the first violation."""
    for card_id, tokens in alloc.tokens.items():
        if card_id not in deck:
            raise UnknownCard(card_id)
        if tokens < 0:
            raise NegativeTokens(card_id, tokens)
    total = alloc.total
    if total != deck.token_budget:
        raise BudgetMismatch(total, deck.token_budget, alloc.stakeholder_id)


@dataclass(frozen=True)
class PrioritizationRound:
    """One voting pass.  Round 0 is the baseline; rounds >= 1 are
    re-prioritizations and carry the trigger that initiated them."""

    round_index: int
    opened_at: datetime
    closed_at: Optional[datetime] = None
    trigger_ref: Optional[str] = None
    allocations: Mapping[str, TokenAllocation] = field(default_factory=dict)
    status: RoundStatus = RoundStatus.OPEN

    def __post_init__(self):
        object.__setattr__(self, "allocations", dict(self.allocations))
        if self.round_index < 0:
            raise ValueError("round_index must be >= 0")

    @property
    def is_open(self) -> bool:
        return self.status is RoundStatus.OPEN

    def with_allocation(self, alloc: TokenAllocation) -> "PrioritizationRound":
        merged = dict(self.allocations)
        merged[alloc.stakeholder_id] = alloc
        return replace(self, allocations=merged)

    def closed(self, at: datetime) -> "PrioritizationRound":
        return replace(self, closed_at=at, status=RoundStatus.CLOSED)

    def to_dict(self) -> dict[str, Any]:
        return {
            "round_index": self.round_index,
            "opened_at": iso_utc(self.opened_at),
            "closed_at": iso_utc(self.closed_at) if self.closed_at else None,
            "trigger_ref": self.trigger_ref,
            "allocations": {
                sid: alloc.to_dict() for sid, alloc in sorted(self.allocations.items())
            },
            "status": self.status.value,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "PrioritizationRound":
        return PrioritizationRound(
            round_index=int(d["round_index"]),
            opened_at=parse_utc(d["opened_at"]),
            closed_at=parse_utc(d["closed_at"]) if d.get("closed_at") else None,
            trigger_ref=d.get("trigger_ref"),
            allocations={
                sid: TokenAllocation.from_dict(a) for sid, a in d["allocations"].items()
            },
            status=RoundStatus(d["status"]),
        )


@dataclass(frozen=True)
class CoverageAssessment:
    """Per-stakeholder, per-card 1..5 agreement that the card was covered
    adequately given its priority."""

    assessment_id: str
    assessed_at: datetime
    scores: Mapping[str, Mapping[int, int]]  # stakeholder_id -> card_id -> score

    def __post_init__(self):
        frozen = {sid: dict(cards) for sid, cards in self.scores.items()}
        for sid, cards in frozen.items():
            for card_id, score in cards.items():
                if score not in LIKERT_LABELS:
                    raise ScoreOutOfRange(score, card_id)
        object.__setattr__(self, "scores", frozen)

    def card_scores(self, card_id: int) -> list[int]:
        return [
            cards[card_id]
            for _, cards in sorted(self.scores.items())
            if card_id in cards
        ]

    def is_complete(self, required_ids: list[str], deck: Deck) -> bool:
        return not self.missing(required_ids, deck)

    def missing(self, required_ids: list[str], deck: Deck) -> list[str]:
        """Human-readable list of (stakeholder, card) holes."""
        holes = []
        for sid in required_ids:
            cards = self.scores.get(sid)
            if cards is None:
                holes.append(sid)
                continue
            absent = [c for c in deck.card_ids if c not in cards]
            if absent:
                holes.append(f"{sid} (cards {', '.join(map(str, absent))})")
        return holes

    def to_dict(self) -> dict[str, Any]:
        return {
            "assessment_id": self.assessment_id,
            "assessed_at": iso_utc(self.assessed_at),
            "scores": {
                sid: {str(k): v for k, v in sorted(cards.items())}
                for sid, cards in sorted(self.scores.items())
            },
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "CoverageAssessment":
        return CoverageAssessment(
            assessment_id=str(d["assessment_id"]),
            assessed_at=parse_utc(d["assessed_at"]),
            scores={
                sid: {int(k): int(v) for k, v in cards.items()}
                for sid, cards in d["scores"].items()
            },
        )


@dataclass(frozen=True)
class Trigger:
    """A pre-agreed event (new regulation, stakeholder request, ...) that
    initiates a re-prioritization round when fired."""

    trigger_id: str
    description: str
    category: TriggerCategory = TriggerCategory.OTHER
    status: TriggerStatus = TriggerStatus.REGISTERED
    fired_at: Optional[datetime] = None

    def fired(self, at: datetime) -> "Trigger":
        if self.status is not TriggerStatus.REGISTERED:
            raise ValueError(f"trigger '{self.trigger_id}' is {self.status.value}, not registered")
        return replace(self, status=TriggerStatus.FIRED, fired_at=at)

    def resolved(self) -> "Trigger":
        if self.status is not TriggerStatus.FIRED:
            raise ValueError(f"trigger '{self.trigger_id}' is {self.status.value}, not fired")
        return replace(self, status=TriggerStatus.RESOLVED)

    def to_dict(self) -> dict[str, Any]:
        return {
            "trigger_id": self.trigger_id,
            "description": self.description,
            "category": self.category.value,
            "status": self.status.value,
            "fired_at": iso_utc(self.fired_at) if self.fired_at else None,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Trigger":
        return Trigger(
            trigger_id=str(d["trigger_id"]),
            description=str(d["description"]),
            category=TriggerCategory(d.get("category", "other")),
            status=TriggerStatus(d.get("status", "registered")),
            fired_at=parse_utc(d["fired_at"]) if d.get("fired_at") else None,
        )


@dataclass(frozen=True)
class SprintRecord:
    """Journal entry for one development sprint: which cards were worked,
    why, and what the review concluded."""

    sprint_id: str
    selected_card_ids: tuple[int, ...]
    justification: str
    review_notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "selected_card_ids", tuple(self.selected_card_ids))

    def to_dict(self) -> dict[str, Any]:
        return {
            "sprint_id": self.sprint_id,
            "selected_card_ids": list(self.selected_card_ids),
            "justification": self.justification,
            "review_notes": self.review_notes,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "SprintRecord":
        return SprintRecord(
            sprint_id=str(d["sprint_id"]),
            selected_card_ids=tuple(int(c) for c in d["selected_card_ids"]),
            justification=str(d.get("justification", "")),
            review_notes=str(d.get("review_notes", "")),
        )


@dataclass(frozen=True)
class Verdict:
    """The recorded human decision closing an assessment: the product is
    sufficiently ethical, or goes back to re-prioritization."""

    decided_at: datetime
    outcome: VerdictOutcome
    rationale: str
    picture_ref: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "decided_at": iso_utc(self.decided_at),
            "outcome": self.outcome.value,
            "rationale": self.rationale,
            "picture_ref": self.picture_ref,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Verdict":
        return Verdict(
            decided_at=parse_utc(d["decided_at"]),
            outcome=VerdictOutcome(d["outcome"]),
            rationale=str(d.get("rationale", "")),
            picture_ref=str(d["picture_ref"]),
        )
