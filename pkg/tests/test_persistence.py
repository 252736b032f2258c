from __future__ import annotations

import json
import random

import pytest

from ethosboard.engine import canonical_json
from ethosboard.errors import (
    BudgetMismatch,
    CorruptJournal,
    MalformedRow,
    ReplayDivergence,
    SchemaVersionMismatch,
    UnknownStakeholder,
    UnsupportedFormat,
)
from ethosboard.picture import chart_json, render_svg
from ethosboard.storage import (
    SessionStore,
    export_picture,
    import_allocations_csv,
    import_scores_csv,
    load_session,
    save_session,
)

from .conftest import TickClock, engine_with_closed_round, stakeholders
from .opgen import random_session


def store_for(seed: int) -> SessionStore:
    return SessionStore(random_session(seed=seed))


class TestSaveLoad:
    def test_round_trip_state_identical(self, tmp_path):
        store = store_for(seed=40)
        path = tmp_path / "session.json"
        save_session(store, path)
        loaded = load_session(path)
        assert canonical_json(loaded.engine.state.to_dict()) == canonical_json(
            store.engine.state.to_dict()
        )
        assert [e.to_dict() for e in loaded.engine.journal] == [
            e.to_dict() for e in store.engine.journal
        ]
        assert loaded.auth_tokens == store.auth_tokens

    def test_round_trip_over_many_random_sessions(self, tmp_path):
        for seed in range(41, 61):
            store = store_for(seed=seed)
            path = tmp_path / f"session-{seed}.json"
            save_session(store, path)
            loaded = load_session(path)
            assert canonical_json(loaded.engine.state.to_dict()) == canonical_json(
                store.engine.state.to_dict()
            )

    def test_truncated_journal_detected(self, tmp_path):
        store = store_for(seed=62)
        path = tmp_path / "session.json"
        save_session(store, path)
        doc = json.loads(path.read_text())
        removed = doc["journal"].pop()  # drop the tail event
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptJournal) as exc_info:
            load_session(path)
        assert exc_info.value.sequence == removed["sequence"]

    def test_hand_edited_snapshot_is_replay_divergence(self, tmp_path):
        store = store_for(seed=63)
        path = tmp_path / "session.json"
        save_session(store, path)
        doc = json.loads(path.read_text())
        # tamper with an allocation inside the snapshot only
        state = doc["snapshot"]["state"]
        for r in state["rounds"]:
            for alloc in r["allocations"].values():
                for card in alloc["tokens"]:
                    alloc["tokens"][card] = alloc["tokens"][card] + 1
                    path.write_text(json.dumps(doc))
                    with pytest.raises(ReplayDivergence):
                        load_session(path)
                    return
        pytest.skip("random session produced no allocations")

    def test_schema_version_mismatch(self, tmp_path):
        store = store_for(seed=64)
        path = tmp_path / "session.json"
        save_session(store, path)
        doc = json.loads(path.read_text())
        doc["schema_version"] = "99"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaVersionMismatch):
            load_session(path)

    def test_single_byte_journal_mutations_detected(self, tmp_path):
        store = store_for(seed=65)
        path = tmp_path / "session.json"
        save_session(store, path)
        raw = path.read_bytes()
        start = raw.index(b'"journal"')
        end = raw.index(b'"meta"')
        rng = random.Random(66)
        printable = b"0123456789abcdefghijklmnopqrstuvwxyz{}[]:,\""
        for _ in range(40):
            pos = rng.randrange(start, end)
            original = raw[pos:pos + 1]
            replacement = original
            while replacement == original:
                replacement = bytes([rng.choice(printable)])
            mutated = raw[:pos] + replacement + raw[pos + 1:]
            path.write_bytes(mutated)
            with pytest.raises((CorruptJournal, ReplayDivergence, SchemaVersionMismatch)):
                load_session(path)
        path.write_bytes(raw)
        load_session(path)  # pristine file still loads

    def test_unparseable_file_reported_as_corrupt(self, tmp_path):
        path = tmp_path / "session.json"
        path.write_text("{not json")
        with pytest.raises(CorruptJournal):
            load_session(path)


class TestAllocationImport:
    def _setup(self, tmp_path, n=4):
        from ethosboard.decks import default_deck
        from ethosboard.engine import WorkshopEngine

        store = SessionStore(
            WorkshopEngine.create_session(default_deck(), stakeholders(n), clock=TickClock())
        )
        store.engine.open_round()
        return store

    def _write(self, tmp_path, rows, header="stakeholder_id,card_id,tokens"):
        path = tmp_path / "alloc.csv"
        path.write_text(header + "\n" + "\n".join(rows) + "\n")
        return path

    def test_four_complete_stakeholders_imported(self, tmp_path):
        store = self._setup(tmp_path)
        rows = [f"s{i},{c},1" for i in range(1, 5) for c in range(1, 22)]
        path = self._write(tmp_path, rows)
        assert import_allocations_csv(store, path, 0) == 4
        assert len(store.engine.state.round(0).allocations) == 4

    def test_budget_19_rejected_with_stakeholder_context(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        rows = [f"s1,{c},1" for c in range(1, 20)]  # only 19 tokens
        path = self._write(tmp_path, rows)
        with pytest.raises(BudgetMismatch) as exc_info:
            import_allocations_csv(store, path, 0)
        assert exc_info.value.stakeholder_id == "s1"
        assert exc_info.value.actual_sum == 19

    def test_unknown_card_is_malformed_row_with_diagnosis(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        path = self._write(tmp_path, ["s1,99,3"])
        with pytest.raises(MalformedRow) as exc_info:
            import_allocations_csv(store, path, 0)
        assert "99" in str(exc_info.value)

    def test_unknown_stakeholder_rejected(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        path = self._write(tmp_path, [f"ghost,{c},1" for c in range(1, 22)])
        with pytest.raises(UnknownStakeholder):
            import_allocations_csv(store, path, 0)

    def test_wrong_header_rejected(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        path = self._write(tmp_path, ["s1,1,21"], header="who,card,count")
        with pytest.raises(MalformedRow) as exc_info:
            import_allocations_csv(store, path, 0)
        assert exc_info.value.line == 1

    def test_non_integer_tokens_rejected(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        path = self._write(tmp_path, ["s1,1,lots"])
        with pytest.raises(MalformedRow):
            import_allocations_csv(store, path, 0)

    def test_duplicate_stakeholder_card_row_rejected(self, tmp_path):
        store = self._setup(tmp_path, n=1)
        path = self._write(tmp_path, ["s1,1,10", "s1,1,11"])
        with pytest.raises(MalformedRow):
            import_allocations_csv(store, path, 0)


class TestScoresImport:
    def test_grouped_sheets_submitted(self, tmp_path):
        eng = engine_with_closed_round(random.Random(70), n_stakeholders=2)
        store = SessionStore(eng)
        rows = [f"s{i},{c},4" for i in range(1, 3) for c in range(1, 22)]
        path = tmp_path / "scores.csv"
        path.write_text("stakeholder_id,card_id,score\n" + "\n".join(rows) + "\n")
        assert import_scores_csv(store, path) == 2
        assert eng.state.scores_frozen

    def test_score_out_of_range_via_engine(self, tmp_path):
        from ethosboard.errors import ScoreOutOfRange

        eng = engine_with_closed_round(random.Random(71), n_stakeholders=1)
        store = SessionStore(eng)
        rows = [f"s1,{c},5" for c in range(1, 21)] + ["s1,21,9"]
        path = tmp_path / "scores.csv"
        path.write_text("stakeholder_id,card_id,score\n" + "\n".join(rows) + "\n")
        with pytest.raises(ScoreOutOfRange):
            import_scores_csv(store, path)


class TestExport:
    def _finished_store(self) -> SessionStore:
        from ethosboard.scenario import build_reference_store

        return build_reference_store()

    def test_svg_export_matches_renderer_bytes(self, tmp_path):
        store = self._finished_store()
        pic = store.engine.outcome_picture()
        out = tmp_path / "chart.svg"
        written = export_picture(store, pic, "svg", out)
        assert out.read_bytes() == written == render_svg(pic)

    def test_json_export_carries_kind(self, tmp_path):
        store = self._finished_store()
        pic = store.engine.target_picture()
        out = tmp_path / "chart.json"
        export_picture(store, pic, "json", out)
        assert json.loads(out.read_text())["kind"] == "target_state"

    def test_export_twice_identical_bytes(self, tmp_path):
        store = self._finished_store()
        pic = store.engine.outcome_picture()
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        export_picture(store, pic, "svg", a)
        export_picture(store, pic, "svg", b)
        assert a.read_bytes() == b.read_bytes()

    def test_export_is_audited(self, tmp_path):
        store = self._finished_store()
        pic = store.engine.outcome_picture()
        export_picture(store, pic, "json", tmp_path / "c.json")
        exports = [e for e in store.engine.journal if e.kind == "picture_exported"]
        assert len(exports) == 1
        assert exports[0].payload["picture_id"] == pic.picture_id

    def test_unsupported_format(self, tmp_path):
        store = self._finished_store()
        pic = store.engine.target_picture()
        with pytest.raises(UnsupportedFormat):
            export_picture(store, pic, "png", tmp_path / "c.png")
