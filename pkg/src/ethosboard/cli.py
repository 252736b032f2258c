"""Facilitator command line.

Each subcommand loads the session file, performs exactly one engine
operation, and writes the file back.  Errors print ``machine_code:
message`` on stderr and exit nonzero (see EXIT CODES in --help).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decks import default_deck, load_deck
from .errors import (
    ConflictError,
    EthosboardError,
    IntegrityError,
    NotFoundError,
    NotPermitted,
    UnknownSession,
    ValidationError,
)
from .engine import WorkshopEngine
from .model import Stakeholder, TriggerCategory, VerdictOutcome
from .picture import RENDER_MODE_CONNECTOR, RENDER_MODE_SIZE, RenderConfig
from .storage import (
    SessionStore,
    export_picture,
    import_allocations_csv,
    import_scores_csv,
    load_session,
    save_session,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_CONFLICT = 4
EXIT_NOT_FOUND = 5
EXIT_INTEGRITY = 6
EXIT_FORBIDDEN = 7

EPILOG = """\
exit codes:
  0  success
  1  unexpected error
  2  usage error
  3  validation failed (BudgetMismatch, UnknownCard, ScoreOutOfRange, ...)
  4  state conflict (WrongPhase, RoundClosed, MissingAllocations, ...)
  5  unknown reference (UnknownStakeholder, UnknownTrigger, ...)
  6  session file integrity (CorruptJournal, ReplayDivergence, ...)
  7  not permitted

the machine code of the failing engine error is printed on stderr as
"<MachineCode>: <message>".
"""


def _exit_code(exc: EthosboardError) -> int:
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if isinstance(exc, ConflictError):
        return EXIT_CONFLICT
    if isinstance(exc, NotFoundError):
        return EXIT_NOT_FOUND
    if isinstance(exc, IntegrityError):
        return EXIT_INTEGRITY
    if isinstance(exc, NotPermitted):
        return EXIT_FORBIDDEN
    return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ethosboard",
        description="run ethics prioritization workshops from the command line",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--session", "-s", default="session.json", help="session file path (default: %(default)s)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a new session file")
    p.add_argument("--session-id", default="session-1")
    p.add_argument("--deck", default="default", help="'default' or a deck JSON file")
    p.add_argument(
        "--facilitator",
        default="facilitator",
        help="id for the facilitator stakeholder created with the session",
    )
    p.add_argument(
        "--facilitator-name", default="Facilitator", help="display name for the facilitator"
    )
    p.add_argument(
        "--facilitator-votes",
        action="store_true",
        help="make the facilitator a required (voting) stakeholder",
    )
    p.add_argument(
        "--lock-submissions",
        action="store_true",
        help="reject resubmitted allocations instead of replacing them",
    )

    p = sub.add_parser("add-stakeholder", help="register a stakeholder, print their token")
    p.add_argument("--id", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--role", default="")
    p.add_argument("--optional", action="store_true", help="not required to vote")
    p.add_argument("--facilitator", action="store_true", help="grant facilitator controls")

    p = sub.add_parser("open-round", help="open round 0 (setup) or a re-prioritization round")
    p.add_argument("--trigger", default=None, help="fired trigger id (default: latest fired)")

    p = sub.add_parser("import-allocations", help="import a stakeholder_id,card_id,tokens CSV")
    p.add_argument("--file", required=True)
    p.add_argument("--round", type=int, required=True)

    p = sub.add_parser("close-round", help="close a round; round 0 captures the baseline")
    p.add_argument("--round", type=int, default=None, help="round index (default: open round)")

    p = sub.add_parser("trigger", help="register or fire a re-prioritization trigger")
    trig_sub = p.add_subparsers(dest="trigger_command", required=True)
    reg = trig_sub.add_parser("register")
    reg.add_argument("--id", default=None)
    reg.add_argument("--description", required=True)
    reg.add_argument(
        "--category",
        choices=[c.value for c in TriggerCategory],
        default=TriggerCategory.OTHER.value,
    )
    fire = trig_sub.add_parser("fire")
    fire.add_argument("--id", required=True)

    p = sub.add_parser("sprint", help="journal a development sprint's card selection")
    p.add_argument("--id", default=None)
    p.add_argument("--cards", default="", help="comma-separated card ids, may be empty")
    p.add_argument("--justification", required=True)
    p.add_argument("--review-notes", default="")

    p = sub.add_parser("import-scores", help="import a stakeholder_id,card_id,score CSV")
    p.add_argument("--file", required=True)

    p = sub.add_parser("picture", help="export the target or outcome picture")
    p.add_argument("--kind", choices=["target", "outcome"], required=True)
    p.add_argument("--format", choices=["svg", "json"], default="svg")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--mode",
        choices=[RENDER_MODE_SIZE, RENDER_MODE_CONNECTOR],
        default=RENDER_MODE_SIZE,
        help="svg only: size-coded bubbles or ghost connectors",
    )

    p = sub.add_parser("delta", help="print the drift report against the baseline")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("verdict", help="record the assessment verdict")
    p.add_argument("--outcome", choices=["sufficient", "return"], required=True)
    p.add_argument("--rationale", required=True)

    p = sub.add_parser("audit", help="list the audit journal")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", default=None, help="JSON config file (host, port, storage_dir)")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--storage-dir", default=None)

    return parser


def _load(args) -> SessionStore:
    path = Path(args.session)
    if not path.exists():
        raise UnknownSession(str(path))
    return load_session(path)


def _save(store: SessionStore, args) -> None:
    save_session(store, Path(args.session))


def cmd_init(args) -> int:
    path = Path(args.session)
    if path.exists():
        print(f"SessionFileExists: refusing to overwrite {path}", file=sys.stderr)
        return EXIT_CONFLICT
    deck = default_deck() if args.deck == "default" else load_deck(args.deck)
    facilitator = Stakeholder(
        stakeholder_id=args.facilitator,
        display_name=args.facilitator_name,
        role_label="facilitation",
        required=args.facilitator_votes,
        facilitator=True,
    )
    engine = WorkshopEngine.create_session(
        deck,
        [facilitator],
        session_id=args.session_id,
        allow_resubmission=not args.lock_submissions,
    )
    store = SessionStore(engine)
    _save(store, args)
    print(f"created {args.session_id} with {len(deck.cards)} cards at {path}")
    print(f"facilitator token ({facilitator.stakeholder_id}): {store.token_for(facilitator.stakeholder_id)}")
    return EXIT_OK


def cmd_add_stakeholder(args) -> int:
    store = _load(args)
    who = Stakeholder(
        stakeholder_id=args.id,
        display_name=args.name,
        role_label=args.role,
        required=not args.optional,
        facilitator=args.facilitator,
    )
    store.engine.register_stakeholder(who)
    token = store.issue_token(who.stakeholder_id)
    _save(store, args)
    print(f"registered {who.stakeholder_id} ({who.display_name}); token: {token}")
    return EXIT_OK


def cmd_open_round(args) -> int:
    store = _load(args)
    index = store.engine.open_round(args.trigger)
    _save(store, args)
    print(f"round {index} open")
    return EXIT_OK


def cmd_import_allocations(args) -> int:
    store = _load(args)
    count = import_allocations_csv(store, args.file, args.round)
    _save(store, args)
    print(f"imported allocations for {count} stakeholders into round {args.round}")
    return EXIT_OK


def cmd_close_round(args) -> int:
    store = _load(args)
    priorities = store.engine.close_round(args.round)
    _save(store, args)
    top = max(priorities.totals.items(), key=lambda kv: (kv[1], -kv[0]))
    print(
        f"round closed; phase is now {store.engine.state.phase.value}; "
        f"highest priority card #{top[0]} with {top[1]} tokens"
    )
    return EXIT_OK


def cmd_trigger(args) -> int:
    store = _load(args)
    if args.trigger_command == "register":
        tid = store.engine.register_trigger(
            args.description, TriggerCategory(args.category), trigger_id=args.id
        )
        _save(store, args)
        print(f"trigger {tid} registered")
    else:
        trig = store.engine.fire_trigger(args.id)
        _save(store, args)
        print(f"trigger {trig.trigger_id} fired; phase is now {store.engine.state.phase.value}")
    return EXIT_OK


def cmd_sprint(args) -> int:
    store = _load(args)
    cards = [int(c) for c in args.cards.split(",") if c.strip()] if args.cards else []
    sprint_id = store.engine.record_sprint(
        cards, args.justification, args.review_notes, sprint_id=args.id
    )
    _save(store, args)
    print(f"sprint {sprint_id} recorded ({len(cards)} cards)")
    return EXIT_OK


def cmd_import_scores(args) -> int:
    store = _load(args)
    count = import_scores_csv(store, args.file)
    _save(store, args)
    state = store.engine.state
    note = "assessment complete" if state.scores_frozen else "awaiting more scores"
    print(f"imported scores from {count} stakeholders; {note}")
    return EXIT_OK


def cmd_picture(args) -> int:
    store = _load(args)
    picture = (
        store.engine.target_picture() if args.kind == "target" else store.engine.outcome_picture()
    )
    config = RenderConfig(mode=args.mode)
    export_picture(store, picture, args.format, args.out, config=config)
    _save(store, args)
    print(f"wrote {args.kind} picture ({args.format}) to {args.out}")
    return EXIT_OK


def cmd_delta(args) -> int:
    store = _load(args)
    report = store.engine.delta()
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    print(f"delta: round {report.baseline_round} -> round {report.current_round}")
    if report.trigger_description:
        print(f"trigger: {report.trigger_ref} ({report.trigger_description})")
    for sid, why in report.rationales.items():
        print(f"rationale [{sid}]: {why}")
    for row in report.rows:
        mark = {"large": "+", "small": "-", "medium": "="}[row.size_code.value]
        print(
            f"  {mark} {row.label:>4} {row.name[:32]:<32} "
            f"{row.baseline_total:>3} -> {row.current_total:>3} (delta {row.total_delta:+d})"
        )
    return EXIT_OK


def cmd_verdict(args) -> int:
    store = _load(args)
    outcome = (
        VerdictOutcome.SUFFICIENT if args.outcome == "sufficient" else VerdictOutcome.RETURN
    )
    store.engine.record_verdict(outcome, args.rationale)
    _save(store, args)
    print(f"verdict recorded; phase is now {store.engine.state.phase.value}")
    return EXIT_OK


def cmd_audit(args) -> int:
    store = _load(args)
    for event in store.engine.journal:
        print(
            f"{event.sequence:>4}  {event.timestamp.isoformat()}  "
            f"{event.kind:<24} actor={event.actor}  ref={event.payload_ref[:12]}"
        )
    return EXIT_OK


def serve_settings(args) -> dict:
    """Effective server settings: defaults, then config file, then
    ETHOSBOARD_* environment variables, then command-line flags."""
    import os

    settings = {"host": "127.0.0.1", "port": 8000, "storage_dir": "sessions"}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            loaded = json.load(f)
        settings.update({k: loaded[k] for k in settings if k in loaded})
    env = {
        "host": os.environ.get("ETHOSBOARD_HOST"),
        "port": os.environ.get("ETHOSBOARD_PORT"),
        "storage_dir": os.environ.get("ETHOSBOARD_STORAGE_DIR"),
    }
    settings.update({k: v for k, v in env.items() if v})
    flags = {"host": args.host, "port": args.port, "storage_dir": args.storage_dir}
    settings.update({k: v for k, v in flags.items() if v is not None})
    settings["port"] = int(settings["port"])
    return settings


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    settings = serve_settings(args)
    app = create_app(settings["storage_dir"])
    uvicorn.run(app, host=settings["host"], port=settings["port"], log_level="warning")
    return EXIT_OK


COMMANDS = {
    "init": cmd_init,
    "add-stakeholder": cmd_add_stakeholder,
    "open-round": cmd_open_round,
    "import-allocations": cmd_import_allocations,
    "close-round": cmd_close_round,
    "trigger": cmd_trigger,
    "sprint": cmd_sprint,
    "import-scores": cmd_import_scores,
    "picture": cmd_picture,
    "delta": cmd_delta,
    "verdict": cmd_verdict,
    "audit": cmd_audit,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EthosboardError as exc:
        print(f"{exc.machine_code}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
