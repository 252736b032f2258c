"""Error hierarchy shared by the engine, storage, API and CLI.

Every error class is a machine code: the class name is what the API
returns as ``machine_code`` and what the CLI prints on stderr.  The
``http_status`` attribute drives the API mapping; the CLI groups classes
into exit codes (see cli.EXIT_CODES).
"""

from __future__ import annotations


class EthosboardError(Exception):
    """Base for all engine-level failures."""

    http_status = 400

    @property
    def machine_code(self) -> str:
        return type(self).__name__


class ValidationError(EthosboardError):
    """Bad input data (HTTP 400)."""

    http_status = 400


class ConflictError(EthosboardError):
    """Operation illegal in the current session state (HTTP 409)."""

    http_status = 409


class NotFoundError(EthosboardError):
    """Referenced entity does not exist (HTTP 404)."""

    http_status = 404


class NotPermitted(EthosboardError):
    """Caller lacks the role or token for the operation (HTTP 403)."""

    http_status = 403


class IntegrityError(EthosboardError):
    """Stored session data fails verification (HTTP 500 when served)."""

    http_status = 500


# -- validation ------------------------------------------------------------

class BudgetMismatch(ValidationError):
    def __init__(self, actual_sum: int, budget: int, stakeholder_id: str | None = None):
        self.actual_sum = actual_sum
        self.budget = budget
        self.stakeholder_id = stakeholder_id
        who = f" for stakeholder '{stakeholder_id}'" if stakeholder_id else ""
        super().__init__(f"token sum {actual_sum} does not match budget {budget}{who}")


class UnknownCard(ValidationError):
    def __init__(self, card_id: int):
        self.card_id = card_id
        super().__init__(f"card {card_id} is not in the session deck")


class NegativeTokens(ValidationError):
    def __init__(self, card_id: int, tokens: int):
        self.card_id = card_id
        self.tokens = tokens
        super().__init__(f"card {card_id} has negative token count {tokens}")


class ScoreOutOfRange(ValidationError):
    def __init__(self, score: int, card_id: int | None = None):
        self.score = score
        self.card_id = card_id
        at = f" on card {card_id}" if card_id is not None else ""
        super().__init__(f"score {score}{at} outside the 1..5 scale")


class OutOfRange(ValidationError):
    def __init__(self, value, low, high):
        super().__init__(f"value {value} outside [{low}, {high}]")


class EmptyDeck(ValidationError):
    def __init__(self):
        super().__init__("deck has no cards")


class NoStakeholders(ValidationError):
    def __init__(self):
        super().__init__("session needs at least one stakeholder")


class DuplicateStakeholder(ValidationError):
    def __init__(self, stakeholder_id: str):
        self.stakeholder_id = stakeholder_id
        super().__init__(f"stakeholder '{stakeholder_id}' already registered")


class DuplicateTrigger(ValidationError):
    def __init__(self, trigger_id: str):
        self.trigger_id = trigger_id
        super().__init__(f"trigger '{trigger_id}' already registered")


class MalformedRow(ValidationError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class IncompleteScores(ValidationError):
    def __init__(self, stakeholder_id: str, missing_card_ids: list[int]):
        self.stakeholder_id = stakeholder_id
        self.missing_card_ids = missing_card_ids
        shown = ", ".join(str(c) for c in missing_card_ids[:8])
        more = "..." if len(missing_card_ids) > 8 else ""
        super().__init__(
            f"stakeholder '{stakeholder_id}' left cards unscored: {shown}{more}"
        )


class UnsupportedFormat(ValidationError):
    def __init__(self, fmt: str):
        self.format = fmt
        super().__init__(f"unsupported export format '{fmt}'")


# -- state conflicts -------------------------------------------------------

class IllegalTransition(ConflictError):
    def __init__(self, from_phase, event):
        self.from_phase = from_phase
        self.event = event
        super().__init__(f"event '{event}' is illegal in phase '{from_phase}'")


class WrongPhase(ConflictError):
    def __init__(self, phase, operation: str):
        self.phase = phase
        self.operation = operation
        super().__init__(f"cannot {operation} in phase '{phase}'")


class RoundNotClosed(ConflictError):
    def __init__(self, round_index: int):
        self.round_index = round_index
        super().__init__(f"round {round_index} is still open")


class RoundClosed(ConflictError):
    def __init__(self, round_index: int):
        self.round_index = round_index
        super().__init__(f"round {round_index} is closed")


class RoundAlreadyOpen(ConflictError):
    def __init__(self, round_index: int):
        self.round_index = round_index
        super().__init__(f"round {round_index} is already open")


class NoOpenRound(ConflictError):
    def __init__(self):
        super().__init__("no round is open")


class DuplicateSubmission(ConflictError):
    def __init__(self, stakeholder_id: str, round_index: int):
        self.stakeholder_id = stakeholder_id
        self.round_index = round_index
        super().__init__(
            f"stakeholder '{stakeholder_id}' already submitted to round {round_index} "
            "and resubmission is disabled"
        )


class MissingAllocations(ConflictError):
    def __init__(self, stakeholder_ids: list[str]):
        self.stakeholder_ids = stakeholder_ids
        super().__init__("missing allocations from: " + ", ".join(stakeholder_ids))


class MissingTrigger(ConflictError):
    def __init__(self):
        super().__init__("re-prioritization rounds require a fired trigger")


class EmptyRound(ConflictError):
    def __init__(self, round_index: int):
        self.round_index = round_index
        super().__init__(f"round {round_index} has no allocations")


class BaselineAlreadyExists(ConflictError):
    def __init__(self):
        super().__init__("the session already has a baseline picture")


class NoBaseline(ConflictError):
    def __init__(self):
        super().__init__("no baseline picture captured yet")


class IncompleteAssessment(ConflictError):
    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__("scores missing from: " + ", ".join(missing))


class NoOutcomePicture(ConflictError):
    def __init__(self):
        super().__init__("no outcome picture has been built")


class AssessmentAlreadyComplete(ConflictError):
    def __init__(self):
        super().__init__("the current assessment is already frozen")


class NoScores(ConflictError):
    def __init__(self, card_id: int):
        self.card_id = card_id
        super().__init__(f"no scores recorded for card {card_id}")


class TriggerAlreadyFired(ConflictError):
    def __init__(self, trigger_id: str, status: str):
        self.trigger_id = trigger_id
        super().__init__(f"trigger '{trigger_id}' is already {status}")


# -- unknown references ----------------------------------------------------

class UnknownStakeholder(NotFoundError):
    def __init__(self, stakeholder_id: str):
        self.stakeholder_id = stakeholder_id
        super().__init__(f"unknown stakeholder '{stakeholder_id}'")


class UnknownTrigger(NotFoundError):
    def __init__(self, trigger_id: str):
        self.trigger_id = trigger_id
        super().__init__(f"unknown trigger '{trigger_id}'")


class UnknownSession(NotFoundError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session '{session_id}'")


class UnknownRound(NotFoundError):
    def __init__(self, round_index: int):
        self.round_index = round_index
        super().__init__(f"round {round_index} does not exist")


# -- stored-data integrity -------------------------------------------------

class SchemaVersionMismatch(IntegrityError):
    def __init__(self, found: str, supported: str):
        self.found = found
        self.supported = supported
        super().__init__(f"session file schema '{found}' not supported (expected '{supported}')")


class CorruptJournal(IntegrityError):
    def __init__(self, sequence: int, reason: str = "integrity check failed"):
        self.sequence = sequence
        self.reason = reason
        super().__init__(f"journal corrupt at sequence {sequence}: {reason}")


class ReplayDivergence(IntegrityError):
    def __init__(self, detail: str = "snapshot does not match journal replay"):
        super().__init__(detail)
