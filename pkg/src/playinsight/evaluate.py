"""Human reliability-evaluation protocol: sampling, questionnaire items,
rater assignment, and metric computation."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_UP, Decimal
from math import ceil
from typing import Iterable, Mapping, Sequence

from .model import AbilityDimension, AbilityPerformance, ActivityRecord, ABILITY_ORDER


class InvalidParameter(ValueError):
    pass


class SampleLargerThanPopulation(ValueError):
    pass


class MissingExtraction(ValueError):
    pass


class NoEvaluators(ValueError):
    pass


class IncompleteRatings(ValueError):
    def __init__(self, unrated_item_ids: Sequence[str]):
        self.unrated_item_ids = list(unrated_item_ids)
        preview = ", ".join(self.unrated_item_ids[:5])
        suffix = "..." if len(self.unrated_item_ids) > 5 else ""
        super().__init__(
            f"{len(self.unrated_item_ids)} items are unrated: {preview}{suffix}"
        )


class ItemKind(enum.Enum):
    IDENTIFIED = "identified"
    UNIDENTIFIED = "unidentified"


class CommentQuestion(enum.Enum):
    ADVANTAGES = "advantages"
    DRAWBACKS = "drawbacks"


@dataclass(frozen=True)
class EvaluationItem:
    item_id: str
    activity_id: str
    ability: AbilityDimension
    kind: ItemKind
    behavior: str | None = None  # present iff kind is IDENTIFIED
    assigned_to: str | None = None


@dataclass(frozen=True)
class Rating:
    """One professional's yes/no answers for a single item.

    Identified items carry semantic_consistency and ability_relevance;
    unidentified items carry omission.  Exactly one evaluator rates each item.
    """

    item_id: str
    evaluator_id: str
    semantic_consistency: bool | None = None
    ability_relevance: bool | None = None
    omission: bool | None = None
    rated_at: str = ""


@dataclass(frozen=True)
class CommentEntry:
    evaluator_id: str
    question: CommentQuestion
    text: str
    created_at: str = ""


def validate_rating_kind(item: EvaluationItem, rating: Rating) -> None:
    """Reject answer sets that do not match the item kind."""
    if item.item_id != rating.item_id:
        raise ValueError("rating does not reference this item")
    if item.kind is ItemKind.IDENTIFIED:
        if rating.semantic_consistency is None or rating.ability_relevance is None:
            raise ValueError(
                "identified items require semantic_consistency and ability_relevance"
            )
        if rating.omission is not None:
            raise ValueError("identified items do not take an omission answer")
    else:
        if rating.omission is None:
            raise ValueError("unidentified items require an omission answer")
        if rating.semantic_consistency is not None or rating.ability_relevance is not None:
            raise ValueError("unidentified items take only the omission answer")


_Z_BY_CONFIDENCE = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576}


def sample_size(population: int, confidence: float, margin: float, p: float) -> int:
    """Cochran sample size with finite-population correction, rounded up."""
    if population < 1:
        raise InvalidParameter("population must be >= 1")
    if not 0.0 < margin < 1.0:
        raise InvalidParameter("margin must be in (0, 1)")
    if not 0.0 < p < 1.0:
        raise InvalidParameter("p must be in (0, 1)")
    z = _Z_BY_CONFIDENCE.get(confidence)
    if z is None:
        raise InvalidParameter(
            f"confidence must be one of {sorted(_Z_BY_CONFIDENCE)}, got {confidence}"
        )
    n0 = z * z * p * (1.0 - p) / (margin * margin)
    n = n0 / (1.0 + (n0 - 1.0) / population)
    return ceil(n)


def draw_sample(records: Sequence[ActivityRecord], n: int, seed: int) -> list[ActivityRecord]:
    """Simple random sample without replacement, reproducible from the seed."""
    if n > len(records):
        raise SampleLargerThanPopulation(
            f"requested {n} from a population of {len(records)}"
        )
    return random.Random(seed).sample(list(records), n)


def generate_items(
    sample: Sequence[ActivityRecord],
    performances: Iterable[AbilityPerformance],
    extracted_activity_ids: set[str],
) -> list[EvaluationItem]:
    """Build exactly 8 questionnaire items per sampled activity.

    An item is identified iff extraction produced a performance for that
    (activity, ability); extraction must have completed for every sampled
    activity (an activity with performances counts as extracted).
    """
    by_activity: dict[str, dict[AbilityDimension, str]] = {}
    for perf in performances:
        by_activity.setdefault(perf.activity_id, {})[perf.ability] = perf.behavior

    items: list[EvaluationItem] = []
    for record in sample:
        if record.activity_id not in extracted_activity_ids and record.activity_id not in by_activity:
            raise MissingExtraction(
                f"activity {record.activity_id} has not been extracted"
            )
        found = by_activity.get(record.activity_id, {})
        for ability in ABILITY_ORDER:
            behavior = found.get(ability)
            items.append(
                EvaluationItem(
                    item_id=f"{record.activity_id}:{ability.value}",
                    activity_id=record.activity_id,
                    ability=ability,
                    kind=ItemKind.IDENTIFIED if behavior is not None else ItemKind.UNIDENTIFIED,
                    behavior=behavior,
                )
            )
    return items


def assign_items(
    items: Sequence[EvaluationItem], evaluators: Sequence[str]
) -> list[EvaluationItem]:
    """Partition whole activities across evaluators (sizes differ by <= 1).

    Each activity's 8 items go to one evaluator, so a rater always sees a
    narrative together with all of its questions.
    """
    if not evaluators:
        raise NoEvaluators("at least one evaluator is required")
    activity_order: list[str] = []
    seen: set[str] = set()
    for item in items:
        if item.activity_id not in seen:
            seen.add(item.activity_id)
            activity_order.append(item.activity_id)
    owner = {
        activity_id: evaluators[i % len(evaluators)]
        for i, activity_id in enumerate(activity_order)
    }
    return [replace(item, assigned_to=owner[item.activity_id]) for item in items]


def round1_half_up(value: float) -> float:
    """Round to one decimal, ties away from zero (display convention)."""
    return float(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class AbilityReliability:
    """Tallies for one ability (or the overall row when ability is None)."""

    ability: AbilityDimension | None
    total_identified: int
    sc_yes: int
    ar_yes: int
    both_yes: int
    total_unidentified: int
    omission_yes: int

    def _pct(self, numerator: int, denominator: int) -> float | None:
        if denominator == 0:
            return None
        return 100.0 * numerator / denominator

    @property
    def semantic_consistency_pct(self) -> float | None:
        return self._pct(self.sc_yes, self.total_identified)

    @property
    def ability_relevance_pct(self) -> float | None:
        return self._pct(self.ar_yes, self.total_identified)

    @property
    def accuracy_pct(self) -> float | None:
        return self._pct(self.both_yes, self.total_identified)

    @property
    def omission_rate_pct(self) -> float | None:
        return self._pct(self.omission_yes, self.total_unidentified)


@dataclass(frozen=True)
class ReliabilityReport:
    rows: tuple[AbilityReliability, ...]  # overall row first, then per ability
    comments: tuple[CommentEntry, ...] = ()
    partial: bool = False

    def to_dict(self) -> dict:
        """Display form: percentages rounded half-up to one decimal."""

        def fmt(pct: float | None) -> float | None:
            return None if pct is None else round1_half_up(pct)

        return {
            "partial": self.partial,
            "rows": [
                {
                    "ability": row.ability.value if row.ability else "all",
                    "total_identified": row.total_identified,
                    "semantic_consistency_pct": fmt(row.semantic_consistency_pct),
                    "ability_relevance_pct": fmt(row.ability_relevance_pct),
                    "accuracy_pct": fmt(row.accuracy_pct),
                    "total_unidentified": row.total_unidentified,
                    "omission_count": row.omission_yes,
                    "omission_rate_pct": fmt(row.omission_rate_pct),
                }
                for row in self.rows
            ],
            "comments": [
                {
                    "evaluator_id": c.evaluator_id,
                    "question": c.question.value,
                    "text": c.text,
                }
                for c in self.comments
            ],
        }


def compute_reliability(
    ratings: Iterable[Rating],
    items: Sequence[EvaluationItem],
    comments: Sequence[CommentEntry] = (),
    allow_partial: bool = False,
) -> ReliabilityReport:
    """Aggregate ratings into per-ability and overall reliability metrics."""
    by_item: dict[str, Rating] = {}
    for rating in ratings:
        by_item[rating.item_id] = rating

    unrated = [item.item_id for item in items if item.item_id not in by_item]
    if unrated and not allow_partial:
        raise IncompleteRatings(unrated)

    counters: dict[AbilityDimension | None, list[int]] = {
        key: [0, 0, 0, 0, 0, 0]
        for key in (None, *ABILITY_ORDER)
    }
    # counter layout: identified, sc_yes, ar_yes, both_yes, unidentified, omission_yes
    for item in items:
        rating = by_item.get(item.item_id)
        if rating is None:
            continue
        for key in (None, item.ability):
            c = counters[key]
            if item.kind is ItemKind.IDENTIFIED:
                c[0] += 1
                sc = bool(rating.semantic_consistency)
                ar = bool(rating.ability_relevance)
                c[1] += sc
                c[2] += ar
                c[3] += sc and ar
            else:
                c[4] += 1
                c[5] += bool(rating.omission)

    rows = tuple(
        AbilityReliability(
            ability=key,
            total_identified=c[0],
            sc_yes=c[1],
            ar_yes=c[2],
            both_yes=c[3],
            total_unidentified=c[4],
            omission_yes=c[5],
        )
        for key, c in counters.items()
    )
    return ReliabilityReport(rows=rows, comments=tuple(comments), partial=bool(unrated))
