"""Ability performance scores and level classification.

A score for (child, area, ability) over a period is the fraction of the
child's activity records in that area and period for which the ability was
inferred.  The denominator counts every activity record, including any whose
extraction produced nothing.
"""

from __future__ import annotations

import datetime as dt
import enum
from collections import defaultdict
from dataclasses import dataclass

from .model import ABILITY_ORDER, AbilityDimension, AbilityScore, PerformanceLevel
from .store import Store

LEVEL_LOW_MAX = 0.335
LEVEL_MODERATE_MAX = 0.665


class EmptyPeriod(ValueError):
    """No activity records exist for the query at all (distinct from score 0)."""


class OutOfRange(ValueError):
    pass


class Granularity(enum.Enum):
    WEEK = "week"
    MONTH = "month"
    SEMESTER = "semester"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ScoringQuery:
    period_start: dt.date
    period_end: dt.date
    child_id: str | None = None  # None = all children
    area: str | None = None  # None = all areas
    granularity: Granularity = Granularity.CUSTOM

    def __post_init__(self):
        if self.period_start > self.period_end:
            raise ValueError("period_start must be <= period_end")


def compute_scores(store: Store, query: ScoringQuery) -> list[AbilityScore]:
    """Score every (child, area, ability) group with at least one activity.

    Groups without activities are omitted rather than emitted as zero; a
    query matching no activities at all raises EmptyPeriod.
    """
    activities = store.list_activities(
        child_id=query.child_id,
        area=query.area,
        start=query.period_start,
        end=query.period_end,
    )
    if not activities:
        raise EmptyPeriod(
            f"no activity records between {query.period_start} and {query.period_end}"
        )

    denominators: dict[tuple[str, str], int] = defaultdict(int)
    for record in activities:
        denominators[(record.child_id, record.area)] += 1

    area_of = {record.activity_id: record.area for record in activities}
    numerators: dict[tuple[str, str, AbilityDimension], int] = defaultdict(int)
    for perf in store.list_performances(activity_ids=list(area_of)):
        # (activity, ability) uniqueness makes each performance one distinct
        # activity in the numerator.
        numerators[(perf.child_id, area_of[perf.activity_id], perf.ability)] += 1

    scores = []
    for (child_id, area), denominator in sorted(denominators.items()):
        for ability in ABILITY_ORDER:
            numerator = numerators.get((child_id, area, ability), 0)
            scores.append(
                AbilityScore(
                    child_id=child_id,
                    area=area,
                    ability=ability,
                    score=numerator / denominator,
                    numerator=numerator,
                    denominator=denominator,
                    period_start=query.period_start,
                    period_end=query.period_end,
                )
            )
    return scores


def classify_level(score: float) -> PerformanceLevel:
    """Equal-interval level bands with cuts at 0.335 and 0.665.

    The published two-decimal intervals (0.00-0.33, 0.34-0.66, 0.67-1.00)
    leave the gaps between them undefined; cutting at the midpoints keeps the
    mapping total over [0, 1].
    """
    if not 0.0 <= score <= 1.0:
        raise OutOfRange(f"score {score} outside [0, 1]")
    if score <= LEVEL_LOW_MAX:
        return PerformanceLevel.LOW
    if score <= LEVEL_MODERATE_MAX:
        return PerformanceLevel.MODERATE
    return PerformanceLevel.HIGH


@dataclass(frozen=True)
class GroupMean:
    area: str
    ability: AbilityDimension
    mean: float
    n: int


def mean_scores_by_area(scores) -> list[GroupMean]:
    """Arithmetic mean of child scores per (area, ability), with group sizes."""
    sums: dict[tuple[str, AbilityDimension], list[float]] = defaultdict(lambda: [0.0, 0])
    for score in scores:
        cell = sums[(score.area, score.ability)]
        cell[0] += score.score
        cell[1] += 1
    return [
        GroupMean(area=area, ability=ability, mean=total / count, n=count)
        for (area, ability), (total, count) in sorted(
            sums.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
        )
    ]
