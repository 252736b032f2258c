"""Quantitative rules for the situational picture.

Everything here is a pure function over closed rounds and assessments:

* card priority = sum of tokens over stakeholders
* harmony score = count of stakeholders deviating more than one token
  from the median assignment (lower count = stronger consensus)
* axis coordinates = piecewise-linear maps anchored at the min card, the
  card nearest the mean, and the max card
* coverage = arithmetic mean of 1..5 scores, banded into green/yellow/red
* bubble size = priority drift against the baseline round

All intermediate values are exact ``Fraction``s; rounding happens only
when a renderer formats output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Union

from .errors import EmptyRound, NoScores, OutOfRange, RoundNotClosed
from .model import CoverageAssessment, Deck, PrioritizationRound

Rational = Union[int, Fraction]

HALF = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)


class Color(str, Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"
    GRAY = "gray"  # target-state bubbles only; never returned by color_of


class Size(str, Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


@dataclass(frozen=True)
class PriorityTable:
    """Total tokens per card for one closed round (zero-token cards
    included, they anchor the low end of the relevance axis)."""

    totals: Mapping[int, int]
    allocation_count: int
    token_budget: int

    def __post_init__(self):
        object.__setattr__(self, "totals", dict(self.totals))
        expected = self.token_budget * self.allocation_count
        actual = sum(self.totals.values())
        if actual != expected:
            raise ValueError(
                f"priority totals sum to {actual}, expected budget*allocations = {expected}"
            )

    def total(self, card_id: int) -> int:
        return self.totals[card_id]

    @property
    def card_ids(self) -> list[int]:
        return sorted(self.totals)


@dataclass(frozen=True)
class HarmonyScore:
    median: Fraction
    deviation_count: int


@dataclass(frozen=True)
class HarmonyReport:
    """Per-card harmony: median token assignment and the number of
    stakeholders deviating by more than one token from it."""

    entries: Mapping[int, HarmonyScore]

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    def score(self, card_id: int) -> HarmonyScore:
        return self.entries[card_id]

    @property
    def card_ids(self) -> list[int]:
        return sorted(self.entries)


@dataclass(frozen=True)
class AxisAnchors:
    """The three values that pin an axis: min -> 0, mean-nearest -> 1/2,
    max -> 1 (the consensus axis flips orientation on top of this)."""

    min_value: Fraction
    mid_anchor_value: Fraction
    max_value: Fraction
    degenerate: bool
    mid_card_id: Optional[int] = None

    def __post_init__(self):
        if not (self.min_value <= self.mid_anchor_value <= self.max_value):
            raise ValueError("anchors must satisfy min <= mid <= max")


def _require_closed(round_: PrioritizationRound) -> None:
    if round_.is_open:
        raise RoundNotClosed(round_.round_index)


def exact_median(values: list[int]) -> Fraction:
    """Standard median, kept rational: middle value, or the mean of the
    two middle values for even counts."""
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2 == 1:
        return Fraction(ordered[mid])
    return Fraction(ordered[mid - 1] + ordered[mid], 2)


def card_priorities(round_: PrioritizationRound, deck: Deck) -> PriorityTable:
    """Sum each stakeholder's tokens per card over a closed round."""
    _require_closed(round_)
    totals = {card_id: 0 for card_id in deck.card_ids}
    for alloc in round_.allocations.values():
        for card_id, tokens in alloc.tokens.items():
            totals[card_id] += tokens
    return PriorityTable(
        totals=totals,
        allocation_count=len(round_.allocations),
        token_budget=deck.token_budget,
    )


def harmony_score(card_id: int, round_: PrioritizationRound) -> HarmonyScore:
    """Median token assignment for the card and how many stakeholders sit
    more than one token away from it."""
    _require_closed(round_)
    if not round_.allocations:
        raise EmptyRound(round_.round_index)
    values = [alloc.tokens_for(card_id) for alloc in round_.allocations.values()]
    med = exact_median(values)
    deviations = sum(1 for v in values if abs(Fraction(v) - med) > 1)
    return HarmonyScore(median=med, deviation_count=deviations)


def harmony_report(round_: PrioritizationRound, deck: Deck) -> HarmonyReport:
    return HarmonyReport(
        entries={card_id: harmony_score(card_id, round_) for card_id in deck.card_ids}
    )


def _pick_mid_anchor(values_by_card: Mapping[int, Rational]) -> tuple[int, Fraction]:
    """Card whose value lies nearest the mean of all card values.

    Ties break toward the lower value, then the lower card_id, so chart
    output stays deterministic.
    """
    mean = Fraction(sum(Fraction(v) for v in values_by_card.values()), len(values_by_card))
    best = min(
        values_by_card.items(),
        key=lambda item: (abs(Fraction(item[1]) - mean), Fraction(item[1]), item[0]),
    )
    return best[0], Fraction(best[1])


def axis_anchors(values_by_card: Mapping[int, Rational]) -> AxisAnchors:
    """Compute min/mid/max anchors for one axis from per-card values."""
    if not values_by_card:
        raise ValueError("cannot anchor an axis on zero cards")
    values = [Fraction(v) for v in values_by_card.values()]
    vmin, vmax = min(values), max(values)
    mid_card, vmid = _pick_mid_anchor(values_by_card)
    degenerate = vmin == vmax or vmid == vmin or vmid == vmax
    return AxisAnchors(
        min_value=vmin,
        mid_anchor_value=vmid,
        max_value=vmax,
        degenerate=degenerate,
        mid_card_id=mid_card,
    )


def interpolate(value: Rational, anchors: AxisAnchors) -> Fraction:
    """Map a value onto [0,1] through the three anchors.

    Flat axes collapse to 1/2; a mid anchor that coincides with an
    extreme falls back to plain min->0, max->1 interpolation.
    """
    v = Fraction(value)
    lo, mid, hi = anchors.min_value, anchors.mid_anchor_value, anchors.max_value
    if lo == hi:
        return HALF
    if mid == lo or mid == hi:
        return (v - lo) / (hi - lo)
    if v <= mid:
        return HALF * (v - lo) / (mid - lo)
    return HALF + HALF * (v - mid) / (hi - mid)


def relevance_anchors(priorities: PriorityTable) -> AxisAnchors:
    return axis_anchors(priorities.totals)


def relevance_coordinate(
    card_id: int, priorities: PriorityTable, anchors: Optional[AxisAnchors] = None
) -> Fraction:
    """x position: lowest card total -> 0.0, mean-nearest -> 0.5,
    highest -> 1.0."""
    anchors = anchors or relevance_anchors(priorities)
    return interpolate(priorities.total(card_id), anchors)


def consensus_anchors(harmony: HarmonyReport) -> AxisAnchors:
    return axis_anchors({cid: hs.deviation_count for cid, hs in harmony.entries.items()})


def consensus_coordinate(
    card_id: int, harmony: HarmonyReport, anchors: Optional[AxisAnchors] = None
) -> Fraction:
    """y position: fewest deviations -> 1.0 (strongest consensus),
    mean-nearest -> 0.5, most deviations -> 0.0."""
    anchors = anchors or consensus_anchors(harmony)
    return ONE - interpolate(harmony.score(card_id).deviation_count, anchors)


def coverage_average(card_id: int, assessment: CoverageAssessment) -> Fraction:
    """Arithmetic mean of all stakeholder scores for the card."""
    scores = assessment.card_scores(card_id)
    if not scores:
        raise NoScores(card_id)
    return Fraction(sum(scores), len(scores))


def color_of(avg: Rational) -> Color:
    """Band a coverage average: >=4 green, [3,4) yellow, <3 red.

    Boundaries close on the left of the higher band so a better rating
    never yields a worse color.
    """
    avg = Fraction(avg)
    if avg < 1 or avg > 5:
        raise OutOfRange(avg, 1, 5)
    if avg >= 4:
        return Color.GREEN
    if avg >= 3:
        return Color.YELLOW
    return Color.RED


def size_of(baseline_total: int, current_total: int) -> Size:
    """Priority drift against the baseline: up -> large, down -> small,
    unchanged -> medium."""
    if current_total > baseline_total:
        return Size.LARGE
    if current_total < baseline_total:
        return Size.SMALL
    return Size.MEDIUM


def format_fraction(value: Rational) -> str:
    """Lossless "p/q" text form used by the chart model."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def parse_fraction(raw: Union[str, int]) -> Fraction:
    if isinstance(raw, int):
        return Fraction(raw)
    if "/" in raw:
        num, den = raw.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(raw))


def fraction_float(value: Rational, digits: int = 6) -> float:
    """Display rounding, applied only at the rendering edge."""
    return round(float(Fraction(value)), digits)
