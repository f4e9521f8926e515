import datetime as dt
import sqlite3
import threading

import pytest

from playinsight.evaluate import CommentEntry, CommentQuestion, EvaluationItem, ItemKind, Rating
from playinsight.model import AbilityDimension, AbilityPerformance, AbilityScore, ActivityRecord, Child, Gender
from playinsight.store import (
    ForeignKeyViolation,
    IoFailure,
    SchemaVersionMismatch,
    UniqueViolation,
    open_store,
)

D = dt.date


def _child(cid="c01"):
    return Child(child_id=cid, name="Lin Mei", nickname="Meimei",
                 birth_year=2018, gender=Gender.F, class_id="classA")


def _activity(aid="a01", cid="c01"):
    return ActivityRecord(activity_id=aid, child_id=cid, raw_narrative="played",
                          area="sand_water", date=D(2023, 9, 4))


class TestLifecycle:
    def test_fresh_store_is_empty(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            assert store.list_children() == []
            assert store.list_activities() == []

    def test_reopen_preserves_data(self, tmp_path):
        path = tmp_path / "s.db"
        with open_store(path) as store:
            store.insert_child(_child())
        with open_store(path) as store:
            assert len(store.list_children()) == 1

    def test_schema_version_mismatch(self, tmp_path):
        path = tmp_path / "s.db"
        open_store(path).close()
        conn = sqlite3.connect(path)
        conn.execute("UPDATE meta SET value = '2' WHERE key = 'schema_version'")
        conn.commit()
        conn.close()
        with pytest.raises(SchemaVersionMismatch):
            open_store(path)

    def test_non_store_file(self, tmp_path):
        path = tmp_path / "junk.db"
        path.write_text("this is not a database")
        with pytest.raises((IoFailure, SchemaVersionMismatch)):
            open_store(path)


class TestIntegrity:
    def test_duplicate_child(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            with pytest.raises(UniqueViolation):
                store.insert_child(_child())

    def test_activity_requires_child(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            with pytest.raises(ForeignKeyViolation):
                store.insert_activity(_activity())

    def test_performance_requires_activity(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            with pytest.raises(ForeignKeyViolation):
                store.insert_performance(AbilityPerformance(
                    activity_id="missing", child_id="c01",
                    ability=AbilityDimension.EMPATHY, behavior="x",
                ))

    def test_performance_child_must_own_activity(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child("c01"))
            store.insert_child(Child(child_id="c02", name="Wang Bo", nickname=None,
                                     birth_year=2018, gender=Gender.M, class_id="classA"))
            store.insert_activity(_activity("a01", "c01"))
            with pytest.raises(ForeignKeyViolation):
                store.insert_performance(AbilityPerformance(
                    activity_id="a01", child_id="c02",
                    ability=AbilityDimension.EMPATHY, behavior="x",
                ))

    def test_duplicate_activity_ability_rejected(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            store.insert_activity(_activity())
            perf = AbilityPerformance(activity_id="a01", child_id="c01",
                                      ability=AbilityDimension.EMPATHY, behavior="x")
            store.insert_performance(perf)
            with pytest.raises(UniqueViolation):
                store.insert_performance(perf)

    def test_duplicate_rating_rejected(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            store.insert_activity(_activity())
            store.replace_items([EvaluationItem(
                item_id="i1", activity_id="a01",
                ability=AbilityDimension.EMPATHY, kind=ItemKind.UNIDENTIFIED,
            )])
            rating = Rating(item_id="i1", evaluator_id="e1", omission=True,
                            rated_at="2024-01-01T00:00:00")
            store.insert_rating(rating)
            with pytest.raises(UniqueViolation):
                store.insert_rating(rating)


class TestRoundTrips:
    def test_full_pipeline_counts(self, mock_store):
        store, roster, activities = mock_store
        assert len(store.list_children()) == len(roster)
        assert len(store.list_activities()) == len(activities)
        performances = store.list_performances()
        assert performances, "extraction should have produced rows"
        # every activity extracted and indexed
        assert store.extracted_activity_ids() == {a.activity_id for a in activities}
        # (activity, ability) unique
        keys = [(p.activity_id, p.ability) for p in performances]
        assert len(keys) == len(set(keys))

    def test_score_round_trip(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            score = AbilityScore(
                child_id="c01", area="sand_water",
                ability=AbilityDimension.EMPATHY, score=0.25,
                numerator=1, denominator=4,
                period_start=D(2023, 9, 4), period_end=D(2024, 1, 24),
            )
            store.replace_scores([score])
            assert store.list_scores() == [score]
            store.replace_scores([score])  # clean overwrite
            assert len(store.list_scores()) == 1

    def test_comment_round_trip(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_comment(CommentEntry("e1", CommentQuestion.ADVANTAGES,
                                              "fast", "2024-01-01T00:00:00"))
            store.insert_comment(CommentEntry("e1", CommentQuestion.ADVANTAGES,
                                              "fast", "2024-01-01T00:00:01"))
            comments = store.list_comments()
            assert len(comments) == 2
            assert comments[0].text == "fast"
            with pytest.raises(ValueError):
                store.insert_comment(CommentEntry("e1", CommentQuestion.DRAWBACKS, "", ""))

    def test_export_import_directory(self, tmp_path):
        src_path = tmp_path / "src.db"
        with open_store(src_path) as store:
            store.insert_child(_child())
            store.insert_activity(_activity())
            store.insert_performance(AbilityPerformance(
                activity_id="a01", child_id="c01",
                ability=AbilityDimension.EMPATHY, behavior="helped a friend",
            ))
            store.export_dir(tmp_path / "dump")
        with open_store(tmp_path / "copy.db") as copy:
            copy.import_dir(tmp_path / "dump")
            assert len(copy.list_children()) == 1
            perfs = copy.list_performances()
            assert perfs[0].behavior == "helped a friend"

    def test_import_requires_empty_store(self, tmp_path):
        with open_store(tmp_path / "a.db") as store:
            store.insert_child(_child())
            store.export_dir(tmp_path / "dump")
            with pytest.raises(Exception, match="empty store"):
                store.import_dir(tmp_path / "dump")


class TestConcurrency:
    def test_concurrent_rating_writes_consistent(self, tmp_path):
        with open_store(tmp_path / "s.db") as store:
            store.insert_child(_child())
            items = []
            for i in range(200):
                store.insert_activity(_activity(f"a{i:03d}"))
                items.append(EvaluationItem(
                    item_id=f"i{i:03d}", activity_id=f"a{i:03d}",
                    ability=AbilityDimension.EMPATHY, kind=ItemKind.UNIDENTIFIED,
                    assigned_to=f"e{i % 4}",
                ))
            store.replace_items(items)

            errors = []

            def rate(evaluator_index):
                try:
                    for i in range(evaluator_index, 200, 4):
                        store.insert_rating(Rating(
                            item_id=f"i{i:03d}", evaluator_id=f"e{evaluator_index}",
                            omission=bool(i % 2), rated_at="t",
                        ))
                except Exception as exc:  # pragma: no cover
                    errors.append(exc)

            threads = [threading.Thread(target=rate, args=(k,)) for k in range(4)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert not errors
            ratings = store.list_ratings()
            assert len(ratings) == 200
            assert sum(1 for r in ratings if r.omission) == 100
