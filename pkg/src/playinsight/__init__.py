"""Free-play narrative analysis: ability extraction, scoring, statistics,
and the human reliability-evaluation protocol."""

from .model import (
    ABILITY_ORDER,
    AREA_ORDER,
    AbilityDimension,
    AbilityDomain,
    AbilityPerformance,
    AbilityScore,
    ActivityRecord,
    Child,
    Gender,
    PerformanceLevel,
    PlayArea,
    UnknownAbility,
    ability_from_alias,
    play_area,
)
from .scoring import ScoringQuery, classify_level, compute_scores, mean_scores_by_area
from .store import Store, open_store

__version__ = "0.1.0"

__all__ = [
    "ABILITY_ORDER",
    "AREA_ORDER",
    "AbilityDimension",
    "AbilityDomain",
    "AbilityPerformance",
    "AbilityScore",
    "ActivityRecord",
    "Child",
    "Gender",
    "PerformanceLevel",
    "PlayArea",
    "ScoringQuery",
    "Store",
    "UnknownAbility",
    "ability_from_alias",
    "classify_level",
    "compute_scores",
    "mean_scores_by_area",
    "open_store",
    "play_area",
]
