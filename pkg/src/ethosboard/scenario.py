"""Reference workshop scenario.

Builds the repo's example session: four stakeholders over the default
21-card deck, a baseline round, one regulation-triggered
re-prioritization, and a full coverage assessment.  Driven by the CSV
files in ``scenario/`` and a stepping clock, so every derived artifact
(chart models, SVG exports) is reproducible byte-for-byte.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

from .decks import default_deck
from .engine import WorkshopEngine
from .model import Stakeholder, TriggerCategory
from .storage import SessionStore, import_allocations_csv, import_scores_csv

SCENARIO_START = datetime(2021, 9, 1, 9, 0, 0, tzinfo=timezone.utc)

STAKEHOLDERS = (
    Stakeholder("s1", "Product Manager", "product"),
    Stakeholder("s2", "Lead Developer", "development"),
    Stakeholder("s3", "Compliance Officer", "compliance"),
    Stakeholder("s4", "Risk Manager", "corporate risk management"),
)

TRIGGER_DESCRIPTION = "upcoming privacy regulation affects data handling"


class SteppingClock:
    """Deterministic clock: each call advances by a fixed step."""

    def __init__(self, start: datetime = SCENARIO_START, step_seconds: int = 1):
        self._now = start
        self._step = timedelta(seconds=step_seconds)

    def __call__(self) -> datetime:
        current = self._now
        self._now = current + self._step
        return current


def scenario_dir() -> Path:
    """The scenario CSV directory when running from a repo checkout."""
    return Path(__file__).resolve().parents[2] / "scenario"


def build_reference_store(csv_dir: str | Path | None = None) -> SessionStore:
    """Run the whole reference workshop and return the finished session."""
    base = Path(csv_dir) if csv_dir else scenario_dir()
    engine = WorkshopEngine.create_session(
        default_deck(),
        list(STAKEHOLDERS),
        session_id="reference-workshop",
        clock=SteppingClock(),
    )
    store = SessionStore(engine)

    engine.open_round()
    import_allocations_csv(store, base / "allocations_round0.csv", 0)
    engine.close_round(0)

    engine.record_sprint(
        [7, 8],
        "first sprint concentrates on privacy and data quality",
        review_notes="data pipeline review booked",
    )
    trigger_id = engine.register_trigger(TRIGGER_DESCRIPTION, TriggerCategory.REGULATION)
    engine.fire_trigger(trigger_id)

    engine.open_round()
    import_allocations_csv(store, base / "allocations_round1.csv", 1)
    engine.close_round(1)

    import_scores_csv(store, base / "scores.csv")
    return store
