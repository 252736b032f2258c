"""ethosboard: multi-stakeholder ethics prioritization workshops.

Token-vote prioritization rounds over a card deck, consensus and coverage
metrics, a deterministic situational-picture chart, and an event-sourced
audit trail, exposed through a library, an HTTP API and a CLI.
"""

from .decks import default_deck, load_deck
from .engine import AuditEvent, EventKind, SessionState, WorkshopEngine
from .metrics import (
    Color,
    Size,
    card_priorities,
    color_of,
    consensus_coordinate,
    coverage_average,
    harmony_report,
    harmony_score,
    relevance_coordinate,
    size_of,
)
from .model import (
    Card,
    CoverageAssessment,
    Deck,
    Phase,
    PhaseEvent,
    PrioritizationRound,
    SprintRecord,
    Stakeholder,
    Theme,
    TokenAllocation,
    Trigger,
    Verdict,
    VerdictOutcome,
    validate_allocation,
)
from .picture import (
    DeltaReport,
    RenderConfig,
    SituationalPicture,
    build_outcome_picture,
    build_target_state,
    chart_json,
    delta_report,
    render_svg,
)
from .storage import (
    SessionStore,
    export_picture,
    import_allocations_csv,
    import_scores_csv,
    load_session,
    save_session,
)

__version__ = "0.1.0"
