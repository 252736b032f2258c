"""Situational picture: the bubble-chart model and its renderers.

One bubble per deck card, positioned at (perceived relevance, valuation
consensus), colored by coverage score and sized by priority drift.  The
JSON chart model is the canonical form; the SVG is derived from it, so a
browser chart and an exported file always agree.  Rendering is strictly
deterministic: identical picture + config means byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .errors import IncompleteAssessment, NoBaseline, UnsupportedFormat
from .metrics import (
    AxisAnchors,
    Color,
    HarmonyReport,
    PriorityTable,
    Size,
    card_priorities,
    color_of,
    consensus_anchors,
    consensus_coordinate,
    coverage_average,
    format_fraction,
    fraction_float,
    harmony_report,
    parse_fraction,
    relevance_anchors,
    relevance_coordinate,
    size_of,
)
from .model import (
    CoverageAssessment,
    Deck,
    PrioritizationRound,
    Trigger,
    iso_utc,
    parse_utc,
)

CHART_SCHEMA_VERSION = "1"


class PictureKind:
    TARGET_STATE = "target_state"
    OUTCOME = "outcome"


@dataclass(frozen=True)
class BubbleStats:
    """Raw numbers behind a bubble, carried for hover text and audits."""

    total_tokens: int
    median_tokens: Fraction
    deviation_count: int
    coverage_avg: Optional[Fraction] = None
    baseline_total: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "total_tokens": self.total_tokens,
            "median_tokens": format_fraction(self.median_tokens),
            "deviation_count": self.deviation_count,
            "coverage_avg": format_fraction(self.coverage_avg)
            if self.coverage_avg is not None
            else None,
            "baseline_total": self.baseline_total,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "BubbleStats":
        return BubbleStats(
            total_tokens=int(d["total_tokens"]),
            median_tokens=parse_fraction(d["median_tokens"]),
            deviation_count=int(d["deviation_count"]),
            coverage_avg=parse_fraction(d["coverage_avg"])
            if d.get("coverage_avg") is not None
            else None,
            baseline_total=int(d["baseline_total"])
            if d.get("baseline_total") is not None
            else None,
        )


@dataclass(frozen=True)
class Bubble:
    card_id: int
    x: Fraction
    y: Fraction
    color: Color
    size: Size
    label: str
    name: str
    theme: str
    stats: BubbleStats
    ghost: Optional[tuple[Fraction, Fraction]] = None  # baseline (x0, y0)

    def __post_init__(self):
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1):
            raise ValueError(f"bubble for card {self.card_id} outside the unit square")

    def to_dict(self) -> dict[str, Any]:
        return {
            "card_id": self.card_id,
            "x": format_fraction(self.x),
            "y": format_fraction(self.y),
            "x_display": fraction_float(self.x),
            "y_display": fraction_float(self.y),
            "color": self.color.value,
            "size": self.size.value,
            "label": self.label,
            "name": self.name,
            "theme": self.theme,
            "stats": self.stats.to_dict(),
            "ghost": {
                "x": format_fraction(self.ghost[0]),
                "y": format_fraction(self.ghost[1]),
                "x_display": fraction_float(self.ghost[0]),
                "y_display": fraction_float(self.ghost[1]),
            }
            if self.ghost
            else None,
        }

    @staticmethod
    def from_dict(d: Mapping[str, Any]) -> "Bubble":
        ghost = d.get("ghost")
        return Bubble(
            card_id=int(d["card_id"]),
            x=parse_fraction(d["x"]),
            y=parse_fraction(d["y"]),
            color=Color(d["color"]),
            size=Size(d["size"]),
            label=str(d["label"]),
            name=str(d["name"]),
            theme=str(d["theme"]),
            stats=BubbleStats.from_dict(d["stats"]),
            ghost=(parse_fraction(ghost["x"]), parse_fraction(ghost["y"])) if ghost else None,
        )


def _anchors_to_dict(a: AxisAnchors) -> dict[str, Any]:
    return {
        "min_value": format_fraction(a.min_value),
        "mid_anchor_value": format_fraction(a.mid_anchor_value),
        "max_value": format_fraction(a.max_value),
        "degenerate": a.degenerate,
        "mid_card_id": a.mid_card_id,
    }


def _anchors_from_dict(d: Mapping[str, Any]) -> AxisAnchors:
    return AxisAnchors(
        min_value=parse_fraction(d["min_value"]),
        mid_anchor_value=parse_fraction(d["mid_anchor_value"]),
        max_value=parse_fraction(d["max_value"]),
        degenerate=bool(d["degenerate"]),
        mid_card_id=d.get("mid_card_id"),
    )


@dataclass(frozen=True)
class SituationalPicture:
    picture_id: str
    kind: str  # PictureKind
    round_ref: int
    assessment_ref: Optional[str]
    bubbles: tuple[Bubble, ...]
    relevance_axis: AxisAnchors
    consensus_axis: AxisAnchors
    created_at: datetime

    def __post_init__(self):
        object.__setattr__(self, "bubbles", tuple(self.bubbles))
        ids = [b.card_id for b in self.bubbles]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate card bubbles in picture")
        if self.kind == PictureKind.TARGET_STATE:
            for b in self.bubbles:
                if b.color is not Color.GRAY or b.size is not Size.MEDIUM:
                    raise ValueError("target-state bubbles must be gray and medium")
            if self.assessment_ref is not None:
                raise ValueError("target-state pictures carry no assessment")

    def bubble(self, card_id: int) -> Bubble:
        for b in self.bubbles:
            if b.card_id == card_id:
                return b
        raise KeyError(card_id)

    def to_chart_model(self) -> dict[str, Any]:
        return {
            "schema_version": CHART_SCHEMA_VERSION,
            "picture_id": self.picture_id,
            "kind": self.kind,
            "round_ref": self.round_ref,
            "assessment_ref": self.assessment_ref,
            "created_at": iso_utc(self.created_at),
            "axes": {
                "relevance": _anchors_to_dict(self.relevance_axis),
                "consensus": _anchors_to_dict(self.consensus_axis),
            },
            "bubbles": [b.to_dict() for b in sorted(self.bubbles, key=lambda b: b.card_id)],
        }

    @staticmethod
    def from_chart_model(d: Mapping[str, Any]) -> "SituationalPicture":
        return SituationalPicture(
            picture_id=str(d["picture_id"]),
            kind=str(d["kind"]),
            round_ref=int(d["round_ref"]),
            assessment_ref=d.get("assessment_ref"),
            bubbles=tuple(Bubble.from_dict(b) for b in d["bubbles"]),
            relevance_axis=_anchors_from_dict(d["axes"]["relevance"]),
            consensus_axis=_anchors_from_dict(d["axes"]["consensus"]),
            created_at=parse_utc(d["created_at"]),
        )


def chart_json(picture: SituationalPicture) -> bytes:
    """Canonical chart-model bytes (stable key order, 2-space indent)."""
    return (
        json.dumps(picture.to_chart_model(), indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    ).encode("ascii")


def _picture_id(model_without_id: Mapping[str, Any]) -> str:
    digest = hashlib.sha256(
        json.dumps(model_without_id, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return f"pic-{digest[:12]}"


def _build_bubbles(
    deck: Deck,
    priorities: PriorityTable,
    harmony: HarmonyReport,
    rel_anchors: AxisAnchors,
    con_anchors: AxisAnchors,
    *,
    assessment: Optional[CoverageAssessment] = None,
    baseline: Optional[SituationalPicture] = None,
) -> tuple[Bubble, ...]:
    bubbles = []
    for card in deck.cards:
        x = relevance_coordinate(card.card_id, priorities, rel_anchors)
        y = consensus_coordinate(card.card_id, harmony, con_anchors)
        hs = harmony.score(card.card_id)
        if assessment is None:
            color, size, avg, baseline_total, ghost = Color.GRAY, Size.MEDIUM, None, None, None
        else:
            avg = coverage_average(card.card_id, assessment)
            color = color_of(avg)
            base_bubble = baseline.bubble(card.card_id)
            baseline_total = base_bubble.stats.total_tokens
            size = size_of(baseline_total, priorities.total(card.card_id))
            ghost = (base_bubble.x, base_bubble.y)
        bubbles.append(
            Bubble(
                card_id=card.card_id,
                x=x,
                y=y,
                color=color,
                size=size,
                label=f"#{card.card_id}",
                name=card.name,
                theme=card.theme.value,
                stats=BubbleStats(
                    total_tokens=priorities.total(card.card_id),
                    median_tokens=hs.median,
                    deviation_count=hs.deviation_count,
                    coverage_avg=avg,
                    baseline_total=baseline_total,
                ),
                ghost=ghost,
            )
        )
    return tuple(bubbles)


def _assemble(
    kind: str,
    round_ref: int,
    assessment_ref: Optional[str],
    bubbles: tuple[Bubble, ...],
    rel_anchors: AxisAnchors,
    con_anchors: AxisAnchors,
    created_at: datetime,
) -> SituationalPicture:
    draft = SituationalPicture(
        picture_id="pending",
        kind=kind,
        round_ref=round_ref,
        assessment_ref=assessment_ref,
        bubbles=bubbles,
        relevance_axis=rel_anchors,
        consensus_axis=con_anchors,
        created_at=created_at,
    )
    model = draft.to_chart_model()
    del model["picture_id"]
    return replace(draft, picture_id=_picture_id(model))


def build_target_state(
    round0: PrioritizationRound, deck: Deck, *, created_at: datetime
) -> SituationalPicture:
    """Baseline picture from round 0: positions only, all bubbles gray
    and medium because no coverage has been assessed yet."""
    priorities = card_priorities(round0, deck)
    harmony = harmony_report(round0, deck)
    rel, con = relevance_anchors(priorities), consensus_anchors(harmony)
    bubbles = _build_bubbles(deck, priorities, harmony, rel, con)
    return _assemble(PictureKind.TARGET_STATE, round0.round_index, None, bubbles, rel, con, created_at)


def build_outcome_picture(
    latest_round: PrioritizationRound,
    assessment: CoverageAssessment,
    baseline: Optional[SituationalPicture],
    deck: Deck,
    required_ids: Sequence[str],
    *,
    created_at: datetime,
) -> SituationalPicture:
    """Outcome picture: coordinates from the latest closed round, colors
    from coverage averages, sizes from drift against the baseline, ghost
    positions from the baseline for connector rendering."""
    if baseline is None:
        raise NoBaseline()
    missing = assessment.missing(list(required_ids), deck)
    if missing:
        raise IncompleteAssessment(missing)
    priorities = card_priorities(latest_round, deck)
    harmony = harmony_report(latest_round, deck)
    rel, con = relevance_anchors(priorities), consensus_anchors(harmony)
    bubbles = _build_bubbles(
        deck, priorities, harmony, rel, con,
        assessment=assessment, baseline=baseline,
    )
    return _assemble(
        PictureKind.OUTCOME, latest_round.round_index, assessment.assessment_id,
        bubbles, rel, con, created_at,
    )


# -- delta report ------------------------------------------------------------

@dataclass(frozen=True)
class DeltaRow:
    card_id: int
    label: str
    name: str
    baseline_total: int
    current_total: int
    total_delta: int
    size_code: Size
    dx: Fraction
    dy: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {
            "card_id": self.card_id,
            "label": self.label,
            "name": self.name,
            "baseline_total": self.baseline_total,
            "current_total": self.current_total,
            "total_delta": self.total_delta,
            "size_code": self.size_code.value,
            "dx": format_fraction(self.dx),
            "dy": format_fraction(self.dy),
            "dx_display": fraction_float(self.dx),
            "dy_display": fraction_float(self.dy),
        }


@dataclass(frozen=True)
class DeltaReport:
    """How (and why) the target state drifted: per-card token deltas and
    coordinate shifts, plus the trigger and rationale texts behind them."""

    baseline_round: int
    current_round: int
    rows: tuple[DeltaRow, ...]
    trigger_ref: Optional[str] = None
    trigger_description: Optional[str] = None
    rationales: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rationales", dict(self.rationales))

    def row(self, card_id: int) -> DeltaRow:
        for r in self.rows:
            if r.card_id == card_id:
                return r
        raise KeyError(card_id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "baseline_round": self.baseline_round,
            "current_round": self.current_round,
            "trigger_ref": self.trigger_ref,
            "trigger_description": self.trigger_description,
            "rationales": dict(sorted(self.rationales.items())),
            "rows": [r.to_dict() for r in self.rows],
        }


def delta_report(
    baseline: SituationalPicture,
    latest_round: PrioritizationRound,
    deck: Deck,
    trigger: Optional[Trigger] = None,
) -> DeltaReport:
    """Compare the latest closed round against the baseline picture."""
    priorities = card_priorities(latest_round, deck)
    harmony = harmony_report(latest_round, deck)
    rel, con = relevance_anchors(priorities), consensus_anchors(harmony)
    rows = []
    for card in deck.cards:
        base = baseline.bubble(card.card_id)
        current_total = priorities.total(card.card_id)
        x = relevance_coordinate(card.card_id, priorities, rel)
        y = consensus_coordinate(card.card_id, harmony, con)
        rows.append(
            DeltaRow(
                card_id=card.card_id,
                label=f"#{card.card_id}",
                name=card.name,
                baseline_total=base.stats.total_tokens,
                current_total=current_total,
                total_delta=current_total - base.stats.total_tokens,
                size_code=size_of(base.stats.total_tokens, current_total),
                dx=x - base.x,
                dy=y - base.y,
            )
        )
    rationales = {
        sid: alloc.rationale
        for sid, alloc in sorted(latest_round.allocations.items())
        if alloc.rationale
    }
    return DeltaReport(
        baseline_round=baseline.round_ref,
        current_round=latest_round.round_index,
        rows=tuple(rows),
        trigger_ref=latest_round.trigger_ref,
        trigger_description=trigger.description if trigger else None,
        rationales=rationales,
    )


# -- SVG rendering -----------------------------------------------------------

PALETTE = {
    Color.GREEN: "#2e9e4f",
    Color.YELLOW: "#e8c531",
    Color.RED: "#d64541",
    Color.GRAY: "#9aa0a6",
}

RENDER_MODE_SIZE = "size"
RENDER_MODE_CONNECTOR = "connector"


@dataclass(frozen=True)
class RenderConfig:
    width: int = 1000
    height: int = 700
    margin_left: int = 90
    margin_right: int = 40
    margin_top: int = 60
    margin_bottom: int = 90
    radius_small: int = 8
    radius_medium: int = 14
    radius_large: int = 22
    mode: str = RENDER_MODE_SIZE  # or RENDER_MODE_CONNECTOR
    font_family: str = "sans-serif"

    def radius(self, size: Size) -> int:
        return {
            Size.SMALL: self.radius_small,
            Size.MEDIUM: self.radius_medium,
            Size.LARGE: self.radius_large,
        }[size]


def _fmt(value: Fraction | float) -> str:
    # fixed two decimals for every coordinate: platform-independent bytes
    return f"{float(value):.2f}"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


# label offsets (dx, dy in px) applied by collision order within a
# coincident-center group; determinism outranks aesthetics here
_LABEL_OFFSETS = ((0, 0), (0, -18), (0, 18), (26, 0), (-26, 0), (26, -18), (-26, 18), (26, 18))


def render_svg(picture: SituationalPicture, config: RenderConfig | None = None) -> bytes:
    """Deterministic SVG 1.1 rendering of a situational picture.

    Same picture + same config = byte-identical output, on any platform:
    all numbers pass through fixed two-decimal formatting and elements
    are emitted in card_id order.
    """
    cfg = config or RenderConfig()
    plot_w = cfg.width - cfg.margin_left - cfg.margin_right
    plot_h = cfg.height - cfg.margin_top - cfg.margin_bottom
    x0, y0 = cfg.margin_left, cfg.margin_top  # plot top-left

    def px(x: Fraction) -> float:
        return cfg.margin_left + float(x) * plot_w

    def py(y: Fraction) -> float:
        # y=1 at top of the plot
        return cfg.margin_top + (1.0 - float(y)) * plot_h

    parts: list[str] = []
    add = parts.append
    add('<?xml version="1.0" encoding="UTF-8"?>\n')
    add(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{cfg.width}" height="{cfg.height}" '
        f'viewBox="0 0 {cfg.width} {cfg.height}">\n'
    )
    add(f'<rect x="0" y="0" width="{cfg.width}" height="{cfg.height}" fill="#ffffff"/>\n')

    title = "target state" if picture.kind == PictureKind.TARGET_STATE else "outcome"
    add(
        f'<text x="{_fmt(cfg.width / 2)}" y="{_fmt(cfg.margin_top / 2 + 6)}" '
        f'font-family="{cfg.font_family}" font-size="20" text-anchor="middle">'
        f"ethicality situational picture ({_esc(title)}, round {picture.round_ref})</text>\n"
    )

    # frame
    add(
        f'<rect x="{x0}" y="{y0}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>\n'
    )

    # axis titles
    add(
        f'<text x="{_fmt(x0 + plot_w / 2)}" y="{_fmt(cfg.height - 18)}" '
        f'font-family="{cfg.font_family}" font-size="16" text-anchor="middle">'
        "perceived relevance</text>\n"
    )
    add(
        f'<text x="22" y="{_fmt(y0 + plot_h / 2)}" '
        f'font-family="{cfg.font_family}" font-size="16" text-anchor="middle" '
        f'transform="rotate(-90 22 {_fmt(y0 + plot_h / 2)})">valuation consensus</text>\n'
    )

    # ticks carry the three anchor values so readers can reconstruct the maps
    rel, con = picture.relevance_axis, picture.consensus_axis
    x_ticks = [
        (0.0, f"low importance ({format_fraction(rel.min_value)})"),
        (0.5, f"mid ({format_fraction(rel.mid_anchor_value)})"),
        (1.0, f"high importance ({format_fraction(rel.max_value)})"),
    ]
    for fx, label in x_ticks:
        tx = x0 + fx * plot_w
        add(
            f'<line x1="{_fmt(tx)}" y1="{_fmt(y0 + plot_h)}" x2="{_fmt(tx)}" '
            f'y2="{_fmt(y0 + plot_h + 6)}" stroke="#444444" stroke-width="1"/>\n'
        )
        add(
            f'<text x="{_fmt(tx)}" y="{_fmt(y0 + plot_h + 24)}" '
            f'font-family="{cfg.font_family}" font-size="12" text-anchor="middle">'
            f"{_esc(label)}</text>\n"
        )
    y_ticks = [
        (0.0, f"lowest consensus ({format_fraction(con.max_value)} deviations)"),
        (0.5, f"mid ({format_fraction(con.mid_anchor_value)})"),
        (1.0, f"highest consensus ({format_fraction(con.min_value)} deviations)"),
    ]
    for fy, label in y_ticks:
        ty = y0 + (1.0 - fy) * plot_h
        add(
            f'<line x1="{_fmt(x0 - 6)}" y1="{_fmt(ty)}" x2="{_fmt(x0)}" y2="{_fmt(ty)}" '
            f'stroke="#444444" stroke-width="1"/>\n'
        )
        add(
            f'<text x="{_fmt(x0 - 10)}" y="{_fmt(ty + 4)}" '
            f'font-family="{cfg.font_family}" font-size="12" text-anchor="end">'
            f"{_esc(label)}</text>\n"
        )

    ordered = sorted(picture.bubbles, key=lambda b: b.card_id)

    # connectors + ghosts go underneath the bubbles
    if cfg.mode == RENDER_MODE_CONNECTOR:
        for b in ordered:
            if b.ghost is None:
                continue
            gx, gy = px(b.ghost[0]), py(b.ghost[1])
            add(
                f'<line x1="{_fmt(gx)}" y1="{_fmt(gy)}" x2="{_fmt(px(b.x))}" y2="{_fmt(py(b.y))}" '
                f'stroke="#888888" stroke-width="1.5" stroke-dasharray="4 3" '
                f'class="connector" data-card="{b.card_id}"/>\n'
            )
            add(
                f'<circle cx="{_fmt(gx)}" cy="{_fmt(gy)}" r="{cfg.radius_medium}" '
                f'fill="{PALETTE[Color.GRAY]}" fill-opacity="0.55" '
                f'class="ghost" data-card="{b.card_id}"/>\n'
            )

    # collision groups for label offsets, keyed by rounded center
    groups: dict[tuple[str, str], int] = {}

    for b in ordered:
        cx, cy = px(b.x), py(b.y)
        # connector mode replaces size-coding: every current bubble medium
        radius = cfg.radius_medium if cfg.mode == RENDER_MODE_CONNECTOR else cfg.radius(b.size)
        add(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{radius}" '
            f'fill="{PALETTE[b.color]}" fill-opacity="0.85" stroke="#333333" '
            f'stroke-width="0.8" class="bubble" data-card="{b.card_id}"/>\n'
        )
        key = (_fmt(cx), _fmt(cy))
        order = groups.get(key, 0)
        groups[key] = order + 1
        dx, dy = _LABEL_OFFSETS[min(order, len(_LABEL_OFFSETS) - 1)]
        add(
            f'<text x="{_fmt(cx + dx)}" y="{_fmt(cy + dy + 4)}" '
            f'font-family="{cfg.font_family}" font-size="12" text-anchor="middle" '
            f'data-card="{b.card_id}">{_esc(b.label)}</text>\n'
        )

    add("</svg>\n")
    return "".join(parts).encode("utf-8")


def render_picture(picture: SituationalPicture, fmt: str, config: RenderConfig | None = None) -> bytes:
    """Render to one of the export formats: 'svg' or 'json'."""
    if fmt == "svg":
        return render_svg(picture, config)
    if fmt == "json":
        return chart_json(picture)
    raise UnsupportedFormat(fmt)
