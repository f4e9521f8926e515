"""Core domain types: the ability framework, play areas, and record shapes.

Every identifier that crosses a file format or API boundary (ability ids,
area ids) is a stable ASCII token defined here.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from dataclasses import dataclass, field


class AbilityDomain(enum.Enum):
    COGNITIVE = "cognitive"
    MOTOR = "motor"
    EMOTIONAL = "emotional"
    SOCIAL = "social"


class AbilityDimension(enum.Enum):
    """The eight developmental abilities, two per domain."""

    NUMERACY_GEOMETRY = "numeracy_geometry"
    CREATIVITY_IMAGINATION = "creativity_imagination"
    FINE_MOTOR = "fine_motor"
    GROSS_MOTOR = "gross_motor"
    EMOTION_RECOGNITION = "emotion_recognition"
    EMPATHY = "empathy"
    COMMUNICATION = "communication"
    COLLABORATION = "collaboration"

    @property
    def domain(self) -> AbilityDomain:
        return _DOMAIN[self]

    @property
    def display_name(self) -> str:
        return _DISPLAY[self]

    @property
    def definition(self) -> str:
        return _DEFINITION[self]


#: Canonical ordering used by every table, chart axis, and export.
ABILITY_ORDER: tuple[AbilityDimension, ...] = tuple(AbilityDimension)

_DOMAIN = {
    AbilityDimension.NUMERACY_GEOMETRY: AbilityDomain.COGNITIVE,
    AbilityDimension.CREATIVITY_IMAGINATION: AbilityDomain.COGNITIVE,
    AbilityDimension.FINE_MOTOR: AbilityDomain.MOTOR,
    AbilityDimension.GROSS_MOTOR: AbilityDomain.MOTOR,
    AbilityDimension.EMOTION_RECOGNITION: AbilityDomain.EMOTIONAL,
    AbilityDimension.EMPATHY: AbilityDomain.EMOTIONAL,
    AbilityDimension.COMMUNICATION: AbilityDomain.SOCIAL,
    AbilityDimension.COLLABORATION: AbilityDomain.SOCIAL,
}

_DISPLAY = {
    AbilityDimension.NUMERACY_GEOMETRY: "Numeracy and Geometry",
    AbilityDimension.CREATIVITY_IMAGINATION: "Creativity and Imagination",
    AbilityDimension.FINE_MOTOR: "Fine Motor Development",
    AbilityDimension.GROSS_MOTOR: "Gross Motor Development",
    AbilityDimension.EMOTION_RECOGNITION: "Emotion Recognition",
    AbilityDimension.EMPATHY: "Empathy",
    AbilityDimension.COMMUNICATION: "Communication",
    AbilityDimension.COLLABORATION: "Collaboration",
}

_DEFINITION = {
    AbilityDimension.NUMERACY_GEOMETRY: (
        "The ability to understand and manipulate numbers, shapes, spatial "
        "relationships, and patterns. It encompasses the development of number "
        "sense, mathematical logical reasoning, the recognition and creation of "
        "geometric shapes, as well as the understanding of objects' positions "
        "and orientations in space."
    ),
    AbilityDimension.CREATIVITY_IMAGINATION: (
        "The ability to generate novel ideas and unique solutions. This "
        "includes creative thinking, exploration of artistic expressions, story "
        "creation, and the tendency to use everyday objects in unconventional "
        "ways."
    ),
    AbilityDimension.FINE_MOTOR: (
        "The development of the small muscle groups in the hands and fingers, "
        "enabling children to perform delicate actions such as holding a pen, "
        "buttoning, cutting paper, and drawing."
    ),
    AbilityDimension.GROSS_MOTOR: (
        "The development of coordination and strength in the large muscle "
        "groups, as demonstrated in activities such as running, jumping, "
        "climbing, throwing, and catching. It is crucial for maintaining "
        "balance, posture control, and overall physical activity."
    ),
    AbilityDimension.EMOTION_RECOGNITION: (
        "The ability to recognize, understand, and label one's own and others' "
        "emotions. It includes the awareness of basic emotions such as "
        "happiness, sadness, anger, and fear, as well as the understanding of "
        "more complex emotions as one grows older."
    ),
    AbilityDimension.EMPATHY: (
        "The ability to understand and share the feelings of others, involving "
        "the recognition of others' emotional states and making appropriate "
        "social responses based on these states. It promotes prosocial "
        "behavior and the establishment of social relationships."
    ),
    AbilityDimension.COMMUNICATION: (
        "The ability to express thoughts and emotions through language (both "
        "verbal and written), non-verbal signals (such as facial expressions "
        "and gestures), and symbolic systems. This includes vocabulary "
        "knowledge, understanding and use of grammatical structures, and the "
        "social rules of effective communication."
    ),
    AbilityDimension.COLLABORATION: (
        "The ability of individuals to work collaboratively with others towards "
        "a common goal. This includes sharing resources, taking turns, "
        "resolving conflicts, and following group rules. It fosters skills in "
        "teamwork and collective problem-solving."
    ),
}


class UnknownAbility(ValueError):
    """Raised when a textual ability label matches no canonical name or alias."""

    def __init__(self, label: str):
        super().__init__(f"unknown ability label: {label!r}")
        self.label = label


def _normalize_label(label: str) -> str:
    return " ".join(label.split()).casefold()


# Prompt-facing names differ from display names; both resolve to the same
# canonical member.  Keys are normalized via _normalize_label.
_ALIASES: dict[str, AbilityDimension] = {}


def register_alias(label: str, ability: AbilityDimension) -> None:
    """Register an extra textual alias for an ability.

    A label may map to only one ability; re-registering an existing alias to a
    different member is an error.
    """
    key = _normalize_label(label)
    existing = _ALIASES.get(key)
    if existing is not None and existing is not ability:
        raise ValueError(f"alias {label!r} already mapped to {existing.value}")
    _ALIASES[key] = ability


for _ability in AbilityDimension:
    register_alias(_ability.value, _ability)
    register_alias(_ability.display_name, _ability)

register_alias("Numerical and Geometric Cognition", AbilityDimension.NUMERACY_GEOMETRY)
register_alias("Emotional Cognition", AbilityDimension.EMOTION_RECOGNITION)
register_alias("Emotional Recognition", AbilityDimension.EMOTION_RECOGNITION)
register_alias("Cooperation", AbilityDimension.COLLABORATION)


def ability_from_alias(label: str) -> AbilityDimension:
    """Resolve a textual ability name to its canonical member.

    Matching is case-insensitive and whitespace-normalized.  Raises
    UnknownAbility for anything outside the alias table (e.g. a category
    hallucinated by the language model).
    """
    try:
        return _ALIASES[_normalize_label(label)]
    except KeyError:
        raise UnknownAbility(label) from None


class PerformanceLevel(enum.IntEnum):
    """Equal-interval performance bands; ordered LOW < MODERATE < HIGH."""

    LOW = 0
    MODERATE = 1
    HIGH = 2


class Gender(enum.Enum):
    F = "F"
    M = "M"
    UNSPECIFIED = "Unspecified"


@dataclass(frozen=True)
class PlayArea:
    id: str
    name: str
    features: str
    materials: tuple[str, ...]


_BUILTIN_AREAS = {
    "sand_water": PlayArea(
        id="sand_water",
        name="Sand-water Area",
        features="An outdoor sandy area",
        materials=("Faucets", "plastic hoses", "buckets", "shovels", "wooden molds"),
    ),
    "hillside_zipline": PlayArea(
        id="hillside_zipline",
        name="Hillside-zipline Area",
        features=(
            "A grassy field with a small hill, a running track surrounding the "
            "hill, a rope slop and a slide"
        ),
        materials=(
            "Ladders", "planks", "plastic pipes", "soft cushions",
            "plastic sleds", "tires", "yoga balls", "children's scooters",
        ),
    ),
    "building_blocks": PlayArea(
        id="building_blocks",
        name="Building Blocks Area",
        features="An outdoor concrete surface",
        materials=("Wooden building blocks",),
    ),
    "playground": PlayArea(
        id="playground",
        name="Playground Area",
        features="A large outdoor concrete surface",
        materials=(
            "Balls", "tires", "planks", "ladders", "plastic pipes",
            "children's bicycles",
        ),
    ),
}

_EXTRA_AREAS: dict[str, PlayArea] = {}

#: Canonical area ordering for exports and charts.
AREA_ORDER: tuple[str, ...] = tuple(_BUILTIN_AREAS)


def play_area(area_id: str) -> PlayArea:
    area = _BUILTIN_AREAS.get(area_id) or _EXTRA_AREAS.get(area_id)
    if area is None:
        raise KeyError(f"unknown play area: {area_id!r}")
    return area


def known_area_ids() -> tuple[str, ...]:
    return AREA_ORDER + tuple(_EXTRA_AREAS)


def register_play_area(area: PlayArea) -> None:
    """Register an additional play area.  Built-in areas cannot be replaced."""
    if area.id in _BUILTIN_AREAS:
        raise ValueError(f"built-in area {area.id!r} cannot be replaced")
    _EXTRA_AREAS[area.id] = area


@dataclass(frozen=True)
class Child:
    child_id: str
    name: str
    nickname: str | None
    birth_year: int
    gender: Gender
    class_id: str

    def __post_init__(self):
        if not self.child_id:
            raise ValueError("child_id must be non-empty")
        if not self.name:
            raise ValueError("child name must be non-empty")


@dataclass(frozen=True)
class ActivityRecord:
    activity_id: str
    child_id: str
    raw_narrative: str
    area: str
    date: dt.date
    processed_narrative: str | None = None

    def __post_init__(self):
        if not self.activity_id:
            raise ValueError("activity_id must be non-empty")
        if not self.raw_narrative:
            raise ValueError("raw_narrative must be non-empty")


@dataclass(frozen=True)
class AbilityPerformance:
    activity_id: str
    child_id: str
    ability: AbilityDimension
    behavior: str

    def __post_init__(self):
        if not self.behavior:
            raise ValueError("behavior must be non-empty")


@dataclass(frozen=True)
class AbilityScore:
    """Per (child, area, ability, period) activity-fraction score.

    score = numerator / denominator where the denominator counts all of the
    child's activity records in the area and period, and the numerator counts
    the distinct activities among them with a performance for the ability.
    """

    child_id: str
    area: str
    ability: AbilityDimension
    score: float
    numerator: int
    denominator: int
    period_start: dt.date
    period_end: dt.date

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be >= 1")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if math.fabs(self.score * self.denominator - self.numerator) > 1e-12 * max(
            1, self.denominator
        ):
            raise ValueError("score * denominator must equal numerator")
        if self.period_start > self.period_end:
            raise ValueError("period_start must be <= period_end")
