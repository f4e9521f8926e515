"""Roster and narrative import, plus text preprocessing (normalization,
correction table, privacy anonymization)."""

from __future__ import annotations

import csv
import datetime as dt
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .model import ActivityRecord, Child, Gender, known_area_ids
from .store import Store, UniqueViolation


@dataclass
class ImportReport:
    accepted: int = 0
    rejected: int = 0
    reasons: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, line: int, reason: str) -> None:
        self.rejected += 1
        self.reasons.append((line, reason))


_CHILD_COLUMNS = ["child_id", "name", "nickname", "birth_year", "gender", "class_id"]
_NARRATIVE_COLUMNS = ["activity_id", "child_id", "date", "area", "raw_narrative"]

_GENDER_ALIASES = {
    "f": Gender.F,
    "m": Gender.M,
    "": Gender.UNSPECIFIED,
    "unspecified": Gender.UNSPECIFIED,
}


def _read_rows(source: str | Path, expected: list[str]):
    with open(source, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != expected:
            raise ValueError(
                f"expected header {','.join(expected)}, got "
                f"{','.join(reader.fieldnames or [])}"
            )
        yield from enumerate(reader, start=2)  # line 1 is the header


def import_children(source: str | Path, store: Store) -> ImportReport:
    """Load the roster; duplicate ids and malformed rows are rejected per row."""
    report = ImportReport()
    for line, row in _read_rows(source, _CHILD_COLUMNS):
        try:
            gender = _GENDER_ALIASES.get((row["gender"] or "").strip().casefold())
            if gender is None:
                raise ValueError(f"MalformedRow: unknown gender {row['gender']!r}")
            child = Child(
                child_id=(row["child_id"] or "").strip(),
                name=(row["name"] or "").strip(),
                nickname=(row["nickname"] or "").strip() or None,
                birth_year=int(row["birth_year"]),
                gender=gender,
                class_id=(row["class_id"] or "").strip(),
            )
        except (TypeError, ValueError) as exc:
            report.reject(line, f"MalformedRow: {exc}")
            continue
        try:
            store.insert_child(child)
        except UniqueViolation:
            report.reject(line, f"DuplicateId: child_id {child.child_id!r}")
            continue
        report.accepted += 1
    return report


def import_narratives(source: str | Path, store: Store) -> ImportReport:
    """Load activity narratives; rows referencing unknown children or areas
    are rejected."""
    report = ImportReport()
    areas = set(known_area_ids())
    for line, row in _read_rows(source, _NARRATIVE_COLUMNS):
        area = (row["area"] or "").strip()
        child_id = (row["child_id"] or "").strip()
        if area not in areas:
            report.reject(line, f"UnknownArea: {area!r}")
            continue
        if not store.has_child(child_id):
            report.reject(line, f"UnknownChild: {child_id!r}")
            continue
        try:
            record = ActivityRecord(
                activity_id=(row["activity_id"] or "").strip(),
                child_id=child_id,
                raw_narrative=row["raw_narrative"] or "",
                area=area,
                date=dt.date.fromisoformat((row["date"] or "").strip()),
            )
        except (TypeError, ValueError) as exc:
            report.reject(line, f"MalformedRow: {exc}")
            continue
        try:
            store.insert_activity(record)
        except UniqueViolation:
            report.reject(line, f"DuplicateId: activity_id {record.activity_id!r}")
            continue
        report.accepted += 1
    return report


_ASCII_WORD = re.compile(r"[A-Za-z0-9_]")


def _is_wordy(token: str) -> bool:
    # Only spaced-script (ASCII-word-edged) tokens take word boundaries; CJK
    # and other unspaced scripts match as plain substrings.
    return bool(_ASCII_WORD.match(token[0])) and bool(_ASCII_WORD.match(token[-1]))


def _compile_roster_pattern(roster: Sequence[Child]) -> tuple[re.Pattern | None, dict[str, str]]:
    targets: dict[str, str] = {}
    for child in roster:
        for token in (child.name, child.nickname):
            if token and token not in targets:
                targets[token] = child.child_id
    if not targets:
        return None, {}
    # Longest alternative first so "Huahua" wins over "Hua" at the same
    # position; spaced-script tokens get word boundaries, CJK-style tokens
    # match as plain substrings.
    alternatives = []
    for token in sorted(targets, key=len, reverse=True):
        escaped = re.escape(token)
        if _is_wordy(token):
            escaped = rf"(?<![A-Za-z0-9_]){escaped}(?![A-Za-z0-9_])"
        alternatives.append(escaped)
    return re.compile("|".join(alternatives)), targets


def anonymize(text: str, roster: Sequence[Child]) -> str:
    """Replace every roster name or nickname with the child's id token.

    Longest match wins; overlaps resolve left to right; everything outside
    the replacement sites is untouched.  An empty roster is the identity.
    """
    pattern, targets = _compile_roster_pattern(roster)
    if pattern is None:
        return text
    return pattern.sub(lambda m: targets[m.group(0)], text)


def normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


def load_correction_table(source: str | Path) -> list[tuple[str, str]]:
    """Two-column delimited file of find -> replace pairs, applied in order."""
    pairs: list[tuple[str, str]] = []
    with open(source, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"correction rows need exactly 2 columns, got {row!r}")
            pairs.append((row[0], row[1]))
    return pairs


def preprocess(
    record: ActivityRecord,
    roster: Sequence[Child],
    corrections: Sequence[tuple[str, str]] = (),
) -> ActivityRecord:
    """Produce the processed narrative: corrections, whitespace normalization,
    then anonymization."""
    text = record.raw_narrative
    for find, replacement in corrections:
        text = text.replace(find, replacement)
    text = anonymize(normalize_whitespace(text), roster)
    return replace(record, processed_narrative=text)
