from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from ethosboard.decks import default_deck
from ethosboard.engine import WorkshopEngine
from ethosboard.model import Card, Deck, Stakeholder, Theme, TokenAllocation


class TickClock:
    """Advances one second per call; keeps journals deterministic."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2021, 7, 1, 12, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        current = self.now
        self.now = current + timedelta(seconds=1)
        return current


def small_deck(n: int) -> Deck:
    themes = list(Theme)
    return Deck(cards=tuple(Card(i, f"Card {i}", themes[(i - 1) % len(themes)]) for i in range(1, n + 1)))


def random_allocation(rng: random.Random, sid: str, deck: Deck) -> TokenAllocation:
    """Uniformly scatter the budget over the deck; always valid."""
    tokens = {c: 0 for c in deck.card_ids}
    for _ in range(deck.token_budget):
        tokens[rng.choice(deck.card_ids)] += 1
    return TokenAllocation(stakeholder_id=sid, tokens=tokens)


def stakeholders(n: int, facilitator_first: bool = False) -> list[Stakeholder]:
    out = []
    for i in range(1, n + 1):
        out.append(
            Stakeholder(
                stakeholder_id=f"s{i}",
                display_name=f"Person {i}",
                role_label="member",
                facilitator=facilitator_first and i == 1,
            )
        )
    return out


def engine_with_closed_round(
    rng: random.Random, n_stakeholders: int = 4, deck: Deck | None = None
) -> WorkshopEngine:
    deck = deck or default_deck()
    eng = WorkshopEngine.create_session(deck, stakeholders(n_stakeholders), clock=TickClock())
    eng.open_round()
    for s in eng.state.stakeholders:
        eng.submit_allocation(0, random_allocation(rng, s.stakeholder_id, deck))
    eng.close_round(0)
    return eng


@pytest.fixture
def deck21() -> Deck:
    return default_deck()


@pytest.fixture
def tick_clock() -> TickClock:
    return TickClock()
