"""Durable session storage and workshop data import/export.

A session lives in one JSON file: the full hash-chained event journal
plus a materialized snapshot.  Loading verifies three things before
trusting the file: the journal is gapless from 1, every event hash and
chain link recomputes, and replaying the journal reproduces the snapshot
byte-for-byte.  The file is written compact so that any single-byte edit
inside the journal changes something the verification covers.

CSV formats (UTF-8, comma-separated, header required):

* allocations: ``stakeholder_id,card_id,tokens``
* scores:      ``stakeholder_id,card_id,score``
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from secrets import token_hex
from typing import Optional

from .engine import (
    GENESIS_HASH,
    AuditEvent,
    Clock,
    WorkshopEngine,
    canonical_json,
    replay,
    sha256_hex,
)
from .errors import (
    BudgetMismatch,
    CorruptJournal,
    MalformedRow,
    ReplayDivergence,
    SchemaVersionMismatch,
    UnknownStakeholder,
    UnsupportedFormat,
)
from .model import TokenAllocation, utc_now
from .picture import RenderConfig, SituationalPicture, chart_json, render_svg

SCHEMA_VERSION = "1"

ALLOCATION_HEADER = ["stakeholder_id", "card_id", "tokens"]
SCORES_HEADER = ["stakeholder_id", "card_id", "score"]


def new_auth_token() -> str:
    return token_hex(16)


class SessionStore:
    """One session file: engine plus the per-stakeholder auth tokens."""

    def __init__(self, engine: WorkshopEngine, auth_tokens: Optional[dict[str, str]] = None):
        self.engine = engine
        self.auth_tokens = dict(auth_tokens or {})
        for s in engine.state.stakeholders:
            self.auth_tokens.setdefault(s.stakeholder_id, new_auth_token())

    def token_for(self, stakeholder_id: str) -> str:
        return self.auth_tokens[stakeholder_id]

    def issue_token(self, stakeholder_id: str) -> str:
        token = self.auth_tokens.setdefault(stakeholder_id, new_auth_token())
        return token

    def stakeholder_for_token(self, token: str) -> Optional[str]:
        for sid, t in self.auth_tokens.items():
            if t == token:
                return sid
        return None


def save_session(store: SessionStore, path: str | Path) -> None:
    """Write journal + snapshot; compact JSON keeps every byte covered by
    the load-time verification."""
    engine = store.engine
    doc = {
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "session_id": engine.session_id,
            "auth_tokens": dict(sorted(store.auth_tokens.items())),
        },
        "journal": [e.to_dict() for e in engine.journal],
        "snapshot": {
            "snapshot_at_sequence": len(engine.journal),
            "state": engine.state.to_dict(),
        },
    }
    Path(path).write_text(canonical_json(doc) + "\n", encoding="utf-8")


def verify_journal(events: list[AuditEvent]) -> None:
    """Gapless sequences, recomputable hashes, intact chain."""
    prev_hash = GENESIS_HASH
    for position, event in enumerate(events, start=1):
        if event.sequence != position:
            raise CorruptJournal(position, f"expected sequence {position}, found {event.sequence}")
        if event.prev_hash != prev_hash:
            raise CorruptJournal(position, "chain link does not match predecessor")
        recomputed_payload = sha256_hex(canonical_json(dict(event.payload)))
        if recomputed_payload != event.payload_ref:
            raise CorruptJournal(position, "payload digest mismatch")
        recomputed = sha256_hex(canonical_json(event.hashed_content()))
        if recomputed != event.event_hash:
            raise CorruptJournal(position, "event hash mismatch")
        prev_hash = event.event_hash


def load_session(path: str | Path, *, clock: Clock = utc_now) -> SessionStore:
    """Load and fully verify a session file."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorruptJournal(0, f"unparseable session file: {exc}") from exc

    version = str(doc.get("schema_version"))
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(version, SCHEMA_VERSION)

    try:
        events = [AuditEvent.from_dict(e) for e in doc["journal"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptJournal(0, f"undecodable journal event: {exc}") from exc

    snapshot = doc.get("snapshot") or {}
    snapshot_at = int(snapshot.get("snapshot_at_sequence", len(events)))
    if snapshot_at > len(events):
        # truncated journal: events snapshot claims to cover are gone
        raise CorruptJournal(len(events) + 1, "journal shorter than snapshot coverage")
    verify_journal(events)

    try:
        replayed = replay(events)
    except Exception as exc:
        raise CorruptJournal(len(events), f"replay failed: {exc}") from exc

    snapshot_state = snapshot.get("state")
    if snapshot_state is not None:
        if canonical_json(replayed.to_dict()) != canonical_json(snapshot_state):
            raise ReplayDivergence()

    engine = WorkshopEngine(replayed, events, clock)
    tokens = dict((doc.get("meta") or {}).get("auth_tokens") or {})
    return SessionStore(engine, tokens)


# -- CSV import ---------------------------------------------------------------


def _read_csv_rows(path: str | Path, header: list[str]):
    """Yield (line_number, row_dict); enforce the exact header."""
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            actual = next(reader)
        except StopIteration:
            raise MalformedRow(1, f"missing header {','.join(header)}") from None
        if [h.strip() for h in actual] != header:
            raise MalformedRow(1, f"header must be exactly {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # blank line
            if len(row) != len(header):
                raise MalformedRow(line, f"expected {len(header)} columns, found {len(row)}")
            yield line, dict(zip(header, (cell.strip() for cell in row)))


def _parse_int(raw: str, line: int, what: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise MalformedRow(line, f"{what} '{raw}' is not an integer") from None


def import_allocations_csv(
    store: SessionStore, path: str | Path, round_index: int, *, actor: Optional[str] = None
) -> int:
    """Group rows per stakeholder into token allocations and submit each.
    Returns the number of stakeholders imported."""
    engine = store.engine
    deck = engine.state.deck
    grouped: dict[str, dict[int, int]] = {}
    for line, row in _read_csv_rows(path, ALLOCATION_HEADER):
        sid = row["stakeholder_id"]
        if not sid:
            raise MalformedRow(line, "empty stakeholder_id")
        card_id = _parse_int(row["card_id"], line, "card_id")
        tokens = _parse_int(row["tokens"], line, "tokens")
        if card_id not in deck:
            raise MalformedRow(line, f"unknown card {card_id}")
        if tokens < 0:
            raise MalformedRow(line, f"negative tokens {tokens}")
        if not engine.state.has_stakeholder(sid):
            raise UnknownStakeholder(sid)
        per = grouped.setdefault(sid, {})
        if card_id in per:
            raise MalformedRow(line, f"duplicate row for stakeholder '{sid}' card {card_id}")
        per[card_id] = tokens

    for sid, tokens in grouped.items():
        try:
            engine.submit_allocation(
                round_index, TokenAllocation(stakeholder_id=sid, tokens=tokens), actor=actor
            )
        except BudgetMismatch as exc:
            raise BudgetMismatch(exc.actual_sum, exc.budget, sid) from None
    return len(grouped)


def import_scores_csv(store: SessionStore, path: str | Path, *, actor: Optional[str] = None) -> int:
    """Group rows per stakeholder into full score sheets and submit each."""
    engine = store.engine
    deck = engine.state.deck
    grouped: dict[str, dict[int, int]] = {}
    for line, row in _read_csv_rows(path, SCORES_HEADER):
        sid = row["stakeholder_id"]
        if not sid:
            raise MalformedRow(line, "empty stakeholder_id")
        card_id = _parse_int(row["card_id"], line, "card_id")
        score = _parse_int(row["score"], line, "score")
        if card_id not in deck:
            raise MalformedRow(line, f"unknown card {card_id}")
        if not engine.state.has_stakeholder(sid):
            raise UnknownStakeholder(sid)
        per = grouped.setdefault(sid, {})
        if card_id in per:
            raise MalformedRow(line, f"duplicate row for stakeholder '{sid}' card {card_id}")
        per[card_id] = score

    for sid, scores in grouped.items():
        engine.submit_scores(sid, scores, actor=actor)
    return len(grouped)


# -- picture export -----------------------------------------------------------


def export_picture(
    store: SessionStore,
    picture: SituationalPicture,
    fmt: str,
    path: str | Path,
    *,
    config: Optional[RenderConfig] = None,
    actor: str = "system",
) -> bytes:
    """Write a picture as SVG or chart-model JSON; the export itself is
    recorded in the audit trail."""
    if fmt == "svg":
        payload = render_svg(picture, config)
    elif fmt == "json":
        payload = chart_json(picture)
    else:
        raise UnsupportedFormat(fmt)
    Path(path).write_bytes(payload)
    store.engine.record_export(picture.picture_id, fmt, str(path), actor=actor)
    return payload
