#!/usr/bin/env python3
"""Regenerate the golden chart artifacts from the scenario CSVs.

Run from the repo root after any intentional change to the renderers or
the scenario data:

    python scenario/generate_goldens.py
"""

from __future__ import annotations

import json
from pathlib import Path

from ethosboard.picture import RENDER_MODE_CONNECTOR, RenderConfig, chart_json, render_svg
from ethosboard.scenario import build_reference_store

HERE = Path(__file__).resolve().parent


def main() -> None:
    golden = HERE / "golden"
    golden.mkdir(exist_ok=True)
    store = build_reference_store(HERE)
    engine = store.engine

    target = engine.target_picture()
    outcome = engine.outcome_picture()

    (golden / "target.svg").write_bytes(render_svg(target))
    (golden / "outcome.svg").write_bytes(render_svg(outcome))
    (golden / "outcome_connector.svg").write_bytes(
        render_svg(outcome, RenderConfig(mode=RENDER_MODE_CONNECTOR))
    )
    (golden / "target.json").write_bytes(chart_json(target))
    (golden / "outcome.json").write_bytes(chart_json(outcome))
    (golden / "delta.json").write_text(
        json.dumps(engine.delta().to_dict(), indent=2, sort_keys=True) + "\n"
    )
    for name in sorted(p.name for p in golden.iterdir()):
        print(f"wrote golden/{name}")


if __name__ == "__main__":
    main()
