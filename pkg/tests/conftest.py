import datetime as dt

import pytest

from playinsight.extract import MockProvider, ResponseLog, extract_batch
from playinsight.ingest import preprocess
from playinsight.store import open_store
from playinsight.synth import synth_activities, synth_roster

SEMESTER_START = dt.date(2023, 9, 4)
SEMESTER_END = dt.date(2024, 1, 24)


def build_mock_store(path, seed=42, n_children=29, log=True):
    """Ingest a synthetic semester and run mock extraction over all of it."""
    roster = synth_roster(n_children=n_children, seed=seed)
    activities = synth_activities(roster, seed=seed)
    store = open_store(path)
    for child in roster:
        store.insert_child(child)
    for record in activities:
        store.insert_activity(record)
    processed = []
    for record in activities:
        done = preprocess(record, roster)
        store.set_processed_narrative(done.activity_id, done.processed_narrative)
        processed.append(done)
    response_log = ResponseLog(str(path) + ".responses.jsonl") if log else None
    extract_batch(
        processed, MockProvider(), max_parallel=8, store=store, log=response_log
    )
    return store, roster, processed


@pytest.fixture(scope="session")
def mock_store(tmp_path_factory):
    """Full-semester mock pipeline store shared by read-only tests."""
    path = tmp_path_factory.mktemp("mockstore") / "pipeline.db"
    store, roster, activities = build_mock_store(path)
    yield store, roster, activities
    store.close()
