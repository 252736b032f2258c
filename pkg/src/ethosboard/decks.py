"""Shipped deck tables.

The default deck is the 21-card ethics deck, one card per ethical element
across the eight themes, numbered 1..21 with card #8 fixed to "Data
Quality".  The table is configuration, not code: load_deck() accepts a
JSON file with the same shape for custom decks.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .model import Card, Deck, Theme

DEFAULT_DECK_TABLE: tuple[tuple[int, str, Theme], ...] = (
    (1, "Stakeholder Analysis", Theme.ANALYZE),
    (2, "Types of Transparency", Theme.TRANSPARENCY),
    (3, "Explainability", Theme.TRANSPARENCY),
    (4, "Communication", Theme.TRANSPARENCY),
    (5, "Documenting Trade-offs", Theme.TRANSPARENCY),
    (6, "Traceability", Theme.TRANSPARENCY),
    (7, "Privacy and Data", Theme.DATA),
    (8, "Data Quality", Theme.DATA),
    (9, "Access to Data", Theme.DATA),
    (10, "Human Agency", Theme.AGENCY_AND_OVERSIGHT),
    (11, "Human Oversight", Theme.AGENCY_AND_OVERSIGHT),
    (12, "System Reliability", Theme.SAFETY_AND_SECURITY),
    (13, "System Security", Theme.SAFETY_AND_SECURITY),
    (14, "System Safety", Theme.SAFETY_AND_SECURITY),
    (15, "Accessibility", Theme.FAIRNESS),
    (16, "Stakeholder Participation", Theme.FAIRNESS),
    (17, "Environmental Impact", Theme.WELLBEING),
    (18, "Societal Effects", Theme.WELLBEING),
    (19, "Auditability", Theme.ACCOUNTABILITY),
    (20, "Ability to Redress", Theme.ACCOUNTABILITY),
    (21, "Minimizing Negative Impacts", Theme.ACCOUNTABILITY),
)


def default_deck() -> Deck:
    """The 21-card default deck; token budget 21 (one token per card)."""
    return Deck(cards=tuple(Card(i, name, theme) for i, name, theme in DEFAULT_DECK_TABLE))


def deck_from_table(d: Mapping[str, Any]) -> Deck:
    return Deck.from_dict(d)


def load_deck(path: str | Path) -> Deck:
    """Load a custom deck table from a JSON file."""
    with Path(path).open("r", encoding="utf-8") as f:
        return deck_from_table(json.load(f))
