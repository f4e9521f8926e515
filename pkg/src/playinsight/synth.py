"""Deterministic synthetic roster and narrative generator.

Used by the demos and the test fixtures: produces a class roster and a
semester of keyword-bearing play narratives whose per-area ability mix is
deliberately uneven, so the scoring and statistics stages have structure to
find.  Everything is reproducible from the seed.
"""

from __future__ import annotations

import csv
import datetime as dt
import random
from pathlib import Path

from .model import ActivityRecord, Child, Gender, AREA_ORDER, AbilityDimension

_FAMILY = ["Lin", "Zhao", "Han", "Wei", "Song", "Qiu", "Tang", "Yan", "Luo", "Xu"]
_GIVEN = [
    "Mei", "Jun", "Ying", "Bo", "Lan", "Tao", "Xin", "Hui", "Ning", "Fang",
    "Lei", "Yu", "Qing", "Shan", "Ping",
]

# Sentence bank keyed by ability; {peer} slots take a classmate's nickname so
# anonymization has real work to do.
_SENTENCES: dict[AbilityDimension, tuple[str, ...]] = {
    AbilityDimension.NUMERACY_GEOMETRY: (
        "I counted {n} blocks for the wall",
        "we made square and triangle shapes",
        "I measured the tower with my hands",
    ),
    AbilityDimension.CREATIVITY_IMAGINATION: (
        "we pretended it was a castle",
        "I imagined a dragon living inside",
        "I invented a new game with the pipes",
    ),
    AbilityDimension.FINE_MOTOR: (
        "I drew a picture of our fort",
        "we molded the wet sand into cakes",
        "I folded a little paper boat",
    ),
    AbilityDimension.GROSS_MOTOR: (
        "we ran down the hill very fast",
        "I climbed up the big ladder",
        "I jumped over the tire",
    ),
    AbilityDimension.EMOTION_RECOGNITION: (
        "I was so happy about our tower",
        "{peer} looked sad when it fell down",
        "I felt excited on the slide",
    ),
    AbilityDimension.EMPATHY: (
        "I helped {peer} get up",
        "I comforted {peer} after the fall",
        "I hugged {peer} when she cried",
    ),
    AbilityDimension.COMMUNICATION: (
        "I told the teacher about our plan",
        "I asked {peer} to pass the bucket",
        "we talked about what to build next",
    ),
    AbilityDimension.COLLABORATION: (
        "we built it together with {peer}",
        "our team carried the long planks",
        "we cooperated to move the water",
    ),
}

_FILLER = (
    "the weather was nice",
    "it took a long time",
    "the teacher watched us",
    "then it was time to go back",
)

# Probability that an activity narrative in an area includes a sentence for
# each ability; shaped so areas differ.
_AREA_PROFILE: dict[str, dict[AbilityDimension, float]] = {
    "sand_water": {
        AbilityDimension.NUMERACY_GEOMETRY: 0.38,
        AbilityDimension.CREATIVITY_IMAGINATION: 0.95,
        AbilityDimension.FINE_MOTOR: 0.82,
        AbilityDimension.GROSS_MOTOR: 0.26,
        AbilityDimension.EMOTION_RECOGNITION: 0.66,
        AbilityDimension.EMPATHY: 0.22,
        AbilityDimension.COMMUNICATION: 0.93,
        AbilityDimension.COLLABORATION: 0.90,
    },
    "hillside_zipline": {
        AbilityDimension.NUMERACY_GEOMETRY: 0.17,
        AbilityDimension.CREATIVITY_IMAGINATION: 0.87,
        AbilityDimension.FINE_MOTOR: 0.46,
        AbilityDimension.GROSS_MOTOR: 0.72,
        AbilityDimension.EMOTION_RECOGNITION: 0.74,
        AbilityDimension.EMPATHY: 0.13,
        AbilityDimension.COMMUNICATION: 0.94,
        AbilityDimension.COLLABORATION: 0.82,
    },
    "building_blocks": {
        AbilityDimension.NUMERACY_GEOMETRY: 0.49,
        AbilityDimension.CREATIVITY_IMAGINATION: 0.97,
        AbilityDimension.FINE_MOTOR: 0.79,
        AbilityDimension.GROSS_MOTOR: 0.30,
        AbilityDimension.EMOTION_RECOGNITION: 0.31,
        AbilityDimension.EMPATHY: 0.16,
        AbilityDimension.COMMUNICATION: 0.21,
        AbilityDimension.COLLABORATION: 0.89,
    },
    "playground": {
        AbilityDimension.NUMERACY_GEOMETRY: 0.28,
        AbilityDimension.CREATIVITY_IMAGINATION: 0.95,
        AbilityDimension.FINE_MOTOR: 0.71,
        AbilityDimension.GROSS_MOTOR: 0.63,
        AbilityDimension.EMOTION_RECOGNITION: 0.60,
        AbilityDimension.EMPATHY: 0.16,
        AbilityDimension.COMMUNICATION: 0.94,
        AbilityDimension.COLLABORATION: 0.90,
    },
}


def synth_roster(n_children: int = 29, seed: int = 7) -> list[Child]:
    rng = random.Random(seed)
    names = set()
    children = []
    for i in range(n_children):
        while True:
            name = f"{rng.choice(_FAMILY)} {rng.choice(_GIVEN)}"
            if name not in names:
                names.add(name)
                break
        given = name.split()[1]
        nickname = given + given.lower()  # e.g. "Mei" -> "Meimei"
        children.append(
            Child(
                child_id=f"c{i + 1:02d}",
                name=name,
                nickname=nickname,
                birth_year=rng.choice((2017, 2018)),
                gender=Gender.F if i < 13 else Gender.M,
                class_id="classA",
            )
        )
    return children


def _school_days(start: dt.date, end: dt.date) -> list[dt.date]:
    days = []
    day = start
    while day <= end:
        if day.weekday() < 5:
            days.append(day)
        day += dt.timedelta(days=1)
    return days


def synth_activities(
    roster: list[Child],
    seed: int = 7,
    start: dt.date = dt.date(2023, 9, 4),
    end: dt.date = dt.date(2024, 1, 24),
    attendance: float = 0.78,
) -> list[ActivityRecord]:
    """One narrative per present child per school day; the class rotates
    across the four areas weekly."""
    rng = random.Random(seed + 1)
    days = _school_days(start, end)
    records = []
    for day_index, day in enumerate(days):
        area = AREA_ORDER[(day_index // 5) % len(AREA_ORDER)]
        profile = _AREA_PROFILE[area]
        for child_index, child in enumerate(roster):
            if rng.random() > attendance:
                continue
            sentences = []
            for ability, probability in profile.items():
                if rng.random() < probability:
                    template = rng.choice(_SENTENCES[ability])
                    peer = rng.choice([c for c in roster if c is not child])
                    sentences.append(
                        template.format(peer=peer.nickname, n=rng.randint(3, 12))
                    )
            if not sentences:
                sentences.append(rng.choice(_FILLER))
            rng.shuffle(sentences)
            narrative = ". ".join(["Today I played"] + sentences) + "."
            records.append(
                ActivityRecord(
                    activity_id=f"a{child_index + 1:02d}d{day_index + 1:03d}",
                    child_id=child.child_id,
                    raw_narrative=narrative,
                    area=area,
                    date=day,
                )
            )
    return records


def write_fixture_csvs(
    directory: str | Path, roster: list[Child], activities: list[ActivityRecord]
) -> tuple[Path, Path]:
    """Write children.csv and narratives.csv in the import formats."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    children_path = directory / "children.csv"
    narratives_path = directory / "narratives.csv"
    with open(children_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["child_id", "name", "nickname", "birth_year", "gender", "class_id"])
        for c in roster:
            writer.writerow(
                [c.child_id, c.name, c.nickname or "", c.birth_year, c.gender.value, c.class_id]
            )
    with open(narratives_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["activity_id", "child_id", "date", "area", "raw_narrative"])
        for a in activities:
            writer.writerow(
                [a.activity_id, a.child_id, a.date.isoformat(), a.area, a.raw_narrative]
            )
    return children_path, narratives_path
