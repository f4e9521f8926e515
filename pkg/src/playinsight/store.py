"""Single-file embedded relational store for all pipeline data.

SQLite holds the entity/relational core (children, activities, performances,
scores) plus evaluation items, ratings, and comments.  Raw model responses
live in the append-only response log next to the store; only an offset index
is kept here.  Writes are serialized through one lock; reads return
materialized snapshots of immutable dataclasses.
"""

from __future__ import annotations

import csv
import datetime as dt
import sqlite3
import threading
from pathlib import Path
from typing import Iterable, Sequence

from .evaluate import CommentEntry, CommentQuestion, EvaluationItem, ItemKind, Rating
from .model import (
    AbilityDimension,
    AbilityPerformance,
    AbilityScore,
    ActivityRecord,
    Child,
    Gender,
)

SCHEMA_VERSION = 1


class StoreError(Exception):
    pass


class SchemaVersionMismatch(StoreError):
    pass


class IoFailure(StoreError):
    pass


class ForeignKeyViolation(StoreError):
    pass


class UniqueViolation(StoreError):
    pass


_SCHEMA = """
CREATE TABLE meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE child (
    child_id TEXT PRIMARY KEY,
    name TEXT NOT NULL CHECK (length(name) > 0),
    nickname TEXT,
    birth_year INTEGER NOT NULL,
    gender TEXT NOT NULL,
    class_id TEXT NOT NULL
);
CREATE TABLE child_activity (
    activity_id TEXT PRIMARY KEY,
    child_id TEXT NOT NULL REFERENCES child(child_id),
    raw_narrative TEXT NOT NULL CHECK (length(raw_narrative) > 0),
    processed_narrative TEXT,
    area TEXT NOT NULL,
    date TEXT NOT NULL
);
CREATE TABLE ability_performance (
    activity_id TEXT NOT NULL REFERENCES child_activity(activity_id),
    child_id TEXT NOT NULL REFERENCES child(child_id),
    ability TEXT NOT NULL,
    behavior TEXT NOT NULL CHECK (length(behavior) > 0),
    PRIMARY KEY (activity_id, ability)
);
CREATE TABLE student_ability (
    child_id TEXT NOT NULL REFERENCES child(child_id),
    area TEXT NOT NULL,
    ability TEXT NOT NULL,
    score REAL NOT NULL,
    numerator INTEGER NOT NULL,
    denominator INTEGER NOT NULL,
    period_start TEXT NOT NULL,
    period_end TEXT NOT NULL,
    PRIMARY KEY (child_id, area, ability, period_start, period_end)
);
CREATE TABLE evaluation_item (
    item_id TEXT PRIMARY KEY,
    activity_id TEXT NOT NULL REFERENCES child_activity(activity_id),
    ability TEXT NOT NULL,
    kind TEXT NOT NULL,
    behavior TEXT,
    assigned_to TEXT
);
CREATE TABLE rating (
    item_id TEXT PRIMARY KEY REFERENCES evaluation_item(item_id),
    evaluator_id TEXT NOT NULL,
    semantic_consistency INTEGER,
    ability_relevance INTEGER,
    omission INTEGER,
    rated_at TEXT NOT NULL
);
CREATE TABLE comment (
    comment_id INTEGER PRIMARY KEY AUTOINCREMENT,
    evaluator_id TEXT NOT NULL,
    question TEXT NOT NULL,
    text TEXT NOT NULL CHECK (length(text) > 0),
    created_at TEXT NOT NULL
);
CREATE TABLE response_log_index (
    activity_id TEXT PRIMARY KEY REFERENCES child_activity(activity_id),
    log_offset INTEGER NOT NULL,
    logged_at TEXT NOT NULL
);
"""

_RELATIONS = (
    "child",
    "child_activity",
    "ability_performance",
    "student_ability",
    "evaluation_item",
    "rating",
    "comment",
    "response_log_index",
)


def _opt(value: str | None) -> str | None:
    return value if value else None


class Store:
    """Handle on one store file.  Open with open_store()."""

    def __init__(self, path: str | Path, conn: sqlite3.Connection):
        self.path = Path(path)
        self._conn = conn
        self._lock = threading.RLock()

    # -- lifecycle -----------------------------------------------------------

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- write helpers -------------------------------------------------------

    def _execute_write(self, sql: str, params: tuple) -> None:
        with self._lock:
            try:
                self._conn.execute(sql, params)
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise _map_integrity_error(exc) from exc
            except sqlite3.Error as exc:
                self._conn.rollback()
                raise IoFailure(str(exc)) from exc

    # -- children ------------------------------------------------------------

    def insert_child(self, child: Child) -> None:
        self._execute_write(
            "INSERT INTO child VALUES (?, ?, ?, ?, ?, ?)",
            (
                child.child_id,
                child.name,
                child.nickname,
                child.birth_year,
                child.gender.value,
                child.class_id,
            ),
        )

    def list_children(self) -> list[Child]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT child_id, name, nickname, birth_year, gender, class_id "
                "FROM child ORDER BY child_id"
            ).fetchall()
        return [
            Child(
                child_id=r[0],
                name=r[1],
                nickname=_opt(r[2]),
                birth_year=r[3],
                gender=Gender(r[4]),
                class_id=r[5],
            )
            for r in rows
        ]

    def has_child(self, child_id: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT 1 FROM child WHERE child_id = ?", (child_id,)
            ).fetchone()
        return row is not None

    # -- activities ----------------------------------------------------------

    def insert_activity(self, record: ActivityRecord) -> None:
        self._execute_write(
            "INSERT INTO child_activity VALUES (?, ?, ?, ?, ?, ?)",
            (
                record.activity_id,
                record.child_id,
                record.raw_narrative,
                record.processed_narrative,
                record.area,
                record.date.isoformat(),
            ),
        )

    def set_processed_narrative(self, activity_id: str, text: str) -> None:
        self._execute_write(
            "UPDATE child_activity SET processed_narrative = ? WHERE activity_id = ?",
            (text, activity_id),
        )

    def list_activities(
        self,
        child_id: str | None = None,
        area: str | None = None,
        start: dt.date | None = None,
        end: dt.date | None = None,
        unprocessed_only: bool = False,
        unextracted_only: bool = False,
    ) -> list[ActivityRecord]:
        sql = (
            "SELECT activity_id, child_id, raw_narrative, processed_narrative, "
            "area, date FROM child_activity"
        )
        clauses, params = [], []
        if child_id is not None:
            clauses.append("child_id = ?")
            params.append(child_id)
        if area is not None:
            clauses.append("area = ?")
            params.append(area)
        if start is not None:
            clauses.append("date >= ?")
            params.append(start.isoformat())
        if end is not None:
            clauses.append("date <= ?")
            params.append(end.isoformat())
        if unprocessed_only:
            clauses.append("processed_narrative IS NULL")
        if unextracted_only:
            clauses.append(
                "activity_id NOT IN (SELECT activity_id FROM response_log_index)"
            )
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)
        sql += " ORDER BY activity_id"
        with self._lock:
            rows = self._conn.execute(sql, params).fetchall()
        return [
            ActivityRecord(
                activity_id=r[0],
                child_id=r[1],
                raw_narrative=r[2],
                processed_narrative=_opt(r[3]),
                area=r[4],
                date=dt.date.fromisoformat(r[5]),
            )
            for r in rows
        ]

    def get_activity(self, activity_id: str) -> ActivityRecord | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT activity_id, child_id, raw_narrative, processed_narrative, "
                "area, date FROM child_activity WHERE activity_id = ?",
                (activity_id,),
            ).fetchone()
        if row is None:
            return None
        return ActivityRecord(
            activity_id=row[0],
            child_id=row[1],
            raw_narrative=row[2],
            processed_narrative=_opt(row[3]),
            area=row[4],
            date=dt.date.fromisoformat(row[5]),
        )

    # -- performances ----------------------------------------------------------

    def insert_performance(self, perf: AbilityPerformance) -> None:
        with self._lock:
            owner = self._conn.execute(
                "SELECT child_id FROM child_activity WHERE activity_id = ?",
                (perf.activity_id,),
            ).fetchone()
            if owner is None:
                raise ForeignKeyViolation(
                    f"activity {perf.activity_id} does not exist"
                )
            if owner[0] != perf.child_id:
                raise ForeignKeyViolation(
                    f"performance child {perf.child_id} does not own activity "
                    f"{perf.activity_id}"
                )
            self._execute_write(
                "INSERT INTO ability_performance VALUES (?, ?, ?, ?)",
                (perf.activity_id, perf.child_id, perf.ability.value, perf.behavior),
            )

    def list_performances(
        self, activity_ids: Iterable[str] | None = None
    ) -> list[AbilityPerformance]:
        sql = "SELECT activity_id, child_id, ability, behavior FROM ability_performance"
        params: list = []
        if activity_ids is not None:
            ids = list(activity_ids)
            if not ids:
                return []
            sql += f" WHERE activity_id IN ({','.join('?' * len(ids))})"
            params = ids
        sql += " ORDER BY activity_id, ability"
        with self._lock:
            rows = self._conn.execute(sql, params).fetchall()
        return [
            AbilityPerformance(
                activity_id=r[0],
                child_id=r[1],
                ability=AbilityDimension(r[2]),
                behavior=r[3],
            )
            for r in rows
        ]

    # -- scores ----------------------------------------------------------------

    def replace_scores(self, scores: Sequence[AbilityScore]) -> None:
        with self._lock:
            try:
                self._conn.execute("DELETE FROM student_ability")
                self._conn.executemany(
                    "INSERT INTO student_ability VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                    [
                        (
                            s.child_id,
                            s.area,
                            s.ability.value,
                            s.score,
                            s.numerator,
                            s.denominator,
                            s.period_start.isoformat(),
                            s.period_end.isoformat(),
                        )
                        for s in scores
                    ],
                )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise _map_integrity_error(exc) from exc

    def list_scores(self) -> list[AbilityScore]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT child_id, area, ability, score, numerator, denominator, "
                "period_start, period_end FROM student_ability "
                "ORDER BY child_id, area, ability"
            ).fetchall()
        return [
            AbilityScore(
                child_id=r[0],
                area=r[1],
                ability=AbilityDimension(r[2]),
                score=r[3],
                numerator=r[4],
                denominator=r[5],
                period_start=dt.date.fromisoformat(r[6]),
                period_end=dt.date.fromisoformat(r[7]),
            )
            for r in rows
        ]

    def record_extraction(
        self,
        record: ActivityRecord,
        rows: Sequence[tuple[AbilityDimension, str]],
        log_offset: int | None = None,
        logged_at: str = "",
    ) -> None:
        """Persist one activity's parsed rows and log-index entry atomically.

        Duplicate (activity, ability) rows from a re-run are ignored rather
        than rejected.
        """
        with self._lock:
            owner = self._conn.execute(
                "SELECT child_id FROM child_activity WHERE activity_id = ?",
                (record.activity_id,),
            ).fetchone()
            if owner is None:
                raise ForeignKeyViolation(f"activity {record.activity_id} does not exist")
            try:
                self._conn.executemany(
                    "INSERT OR IGNORE INTO ability_performance VALUES (?, ?, ?, ?)",
                    [
                        (record.activity_id, record.child_id, ability.value, behavior)
                        for ability, behavior in rows
                    ],
                )
                if log_offset is not None:
                    self._conn.execute(
                        "INSERT OR REPLACE INTO response_log_index VALUES (?, ?, ?)",
                        (record.activity_id, log_offset, logged_at),
                    )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise _map_integrity_error(exc) from exc

    # -- extraction log index ----------------------------------------------------

    def mark_extracted(self, activity_id: str, log_offset: int, logged_at: str) -> None:
        self._execute_write(
            "INSERT OR REPLACE INTO response_log_index VALUES (?, ?, ?)",
            (activity_id, log_offset, logged_at),
        )

    def extracted_activity_ids(self) -> set[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT activity_id FROM response_log_index"
            ).fetchall()
        return {r[0] for r in rows}

    # -- evaluation items / ratings / comments ------------------------------------

    def replace_items(self, items: Sequence[EvaluationItem]) -> None:
        """Clean-overwrite of the evaluation campaign (items and ratings)."""
        with self._lock:
            try:
                self._conn.execute("DELETE FROM rating")
                self._conn.execute("DELETE FROM evaluation_item")
                self._conn.executemany(
                    "INSERT INTO evaluation_item VALUES (?, ?, ?, ?, ?, ?)",
                    [
                        (
                            i.item_id,
                            i.activity_id,
                            i.ability.value,
                            i.kind.value,
                            i.behavior,
                            i.assigned_to,
                        )
                        for i in items
                    ],
                )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise _map_integrity_error(exc) from exc

    def update_assignments(self, items: Sequence[EvaluationItem]) -> None:
        with self._lock:
            self._conn.executemany(
                "UPDATE evaluation_item SET assigned_to = ? WHERE item_id = ?",
                [(i.assigned_to, i.item_id) for i in items],
            )
            self._conn.commit()

    def list_items(self, assigned_to: str | None = None) -> list[EvaluationItem]:
        sql = (
            "SELECT item_id, activity_id, ability, kind, behavior, assigned_to "
            "FROM evaluation_item"
        )
        params: tuple = ()
        if assigned_to is not None:
            sql += " WHERE assigned_to = ?"
            params = (assigned_to,)
        sql += " ORDER BY activity_id, ability"
        with self._lock:
            rows = self._conn.execute(sql, params).fetchall()
        return [
            EvaluationItem(
                item_id=r[0],
                activity_id=r[1],
                ability=AbilityDimension(r[2]),
                kind=ItemKind(r[3]),
                behavior=_opt(r[4]),
                assigned_to=_opt(r[5]),
            )
            for r in rows
        ]

    def insert_rating(self, rating: Rating) -> None:
        self._execute_write(
            "INSERT INTO rating VALUES (?, ?, ?, ?, ?, ?)",
            (
                rating.item_id,
                rating.evaluator_id,
                _bool_to_int(rating.semantic_consistency),
                _bool_to_int(rating.ability_relevance),
                _bool_to_int(rating.omission),
                rating.rated_at,
            ),
        )

    def list_ratings(self) -> list[Rating]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT item_id, evaluator_id, semantic_consistency, "
                "ability_relevance, omission, rated_at FROM rating ORDER BY item_id"
            ).fetchall()
        return [
            Rating(
                item_id=r[0],
                evaluator_id=r[1],
                semantic_consistency=_int_to_bool(r[2]),
                ability_relevance=_int_to_bool(r[3]),
                omission=_int_to_bool(r[4]),
                rated_at=r[5],
            )
            for r in rows
        ]

    def insert_comment(self, comment: CommentEntry) -> None:
        if not comment.text:
            raise ValueError("comment text must be non-empty")
        self._execute_write(
            "INSERT INTO comment (evaluator_id, question, text, created_at) "
            "VALUES (?, ?, ?, ?)",
            (
                comment.evaluator_id,
                comment.question.value,
                comment.text,
                comment.created_at,
            ),
        )

    def list_comments(self) -> list[CommentEntry]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT evaluator_id, question, text, created_at FROM comment "
                "ORDER BY comment_id"
            ).fetchall()
        return [
            CommentEntry(
                evaluator_id=r[0],
                question=CommentQuestion(r[1]),
                text=r[2],
                created_at=r[3],
            )
            for r in rows
        ]

    # -- archival export / import ---------------------------------------------

    def export_dir(self, directory: str | Path) -> None:
        """Dump every relation to one CSV per table for archival and diffing."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with self._lock:
            for table in _RELATIONS:
                cursor = self._conn.execute(f"SELECT * FROM {table}")
                header = [col[0] for col in cursor.description]
                with open(directory / f"{table}.csv", "w", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh)
                    writer.writerow(header)
                    writer.writerows(cursor.fetchall())

    def import_dir(self, directory: str | Path) -> None:
        """Load relations previously written by export_dir into an empty store."""
        directory = Path(directory)
        with self._lock:
            count = self._conn.execute("SELECT count(*) FROM child").fetchone()[0]
            if count:
                raise StoreError("import_dir requires an empty store")
            try:
                for table in _RELATIONS:
                    path = directory / f"{table}.csv"
                    if not path.exists():
                        continue
                    with open(path, newline="", encoding="utf-8") as fh:
                        reader = csv.reader(fh)
                        header = next(reader, None)
                        if not header:
                            continue
                        placeholders = ",".join("?" * len(header))
                        rows = [
                            [None if v == "" else v for v in row] for row in reader
                        ]
                        self._conn.executemany(
                            f"INSERT INTO {table} ({','.join(header)}) "
                            f"VALUES ({placeholders})",
                            rows,
                        )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise _map_integrity_error(exc) from exc


def _bool_to_int(value: bool | None) -> int | None:
    return None if value is None else int(value)


def _int_to_bool(value: int | None) -> bool | None:
    return None if value is None else bool(value)


def _map_integrity_error(exc: sqlite3.IntegrityError) -> StoreError:
    message = str(exc)
    if "FOREIGN KEY" in message:
        return ForeignKeyViolation(message)
    if "UNIQUE" in message:
        return UniqueViolation(message)
    return StoreError(message)


def open_store(path: str | Path) -> Store:
    """Open or create the store file, verifying the schema version."""
    path = Path(path)
    exists = path.exists() and path.stat().st_size > 0
    try:
        conn = sqlite3.connect(path, check_same_thread=False)
        conn.execute("PRAGMA foreign_keys = ON")
        # Commits stay atomic under NORMAL; only durability of the very last
        # commit can lag after a power loss, which this tool tolerates.
        conn.execute("PRAGMA synchronous = NORMAL")
    except sqlite3.Error as exc:
        raise IoFailure(f"cannot open {path}: {exc}") from exc
    if exists:
        try:
            row = conn.execute(
                "SELECT value FROM meta WHERE key = 'schema_version'"
            ).fetchone()
        except sqlite3.Error as exc:
            conn.close()
            raise IoFailure(f"{path} is not a store file: {exc}") from exc
        if row is None or int(row[0]) != SCHEMA_VERSION:
            found = "missing" if row is None else row[0]
            conn.close()
            raise SchemaVersionMismatch(
                f"store {path} has schema version {found}, code expects {SCHEMA_VERSION}"
            )
    else:
        conn.executescript(_SCHEMA)
        conn.execute(
            "INSERT INTO meta VALUES ('schema_version', ?)", (str(SCHEMA_VERSION),)
        )
        conn.commit()
    return Store(path, conn)
