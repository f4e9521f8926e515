"""Build the seeded review-service fixture store used by the integration
tests: six extracted narratives, items generated, assigned to two evaluators
(three activities each).

Usage: python scripts/make_fixture.py <store-path>
"""

import datetime as dt
import sys

from playinsight.evaluate import assign_items, generate_items
from playinsight.extract import MockProvider, extract_batch
from playinsight.ingest import preprocess
from playinsight.model import ActivityRecord, Child, Gender
from playinsight.store import open_store

NARRATIVES = [
    "we counted ten blocks and built a tower together",
    "I climbed the hill and slid down",
    "I drew a picture and told the teacher",
    "we pretended the sand was soup",
    "I helped Meimei up when she was sad",
    "I asked for the bucket and we shared it",
]


def main() -> None:
    store = open_store(sys.argv[1])
    roster = [
        Child(child_id="c01", name="Lin Mei", nickname="Meimei",
              birth_year=2018, gender=Gender.F, class_id="classA"),
    ]
    store.insert_child(roster[0])
    records = []
    for i, narrative in enumerate(NARRATIVES):
        record = ActivityRecord(
            activity_id=f"act{i:02d}", child_id="c01", raw_narrative=narrative,
            area="sand_water", date=dt.date(2023, 9, 4 + i),
        )
        store.insert_activity(record)
        processed = preprocess(record, roster)
        store.set_processed_narrative(record.activity_id, processed.processed_narrative)
        records.append(processed)
    extract_batch(records, MockProvider(), store=store)
    items = generate_items(
        store.list_activities(), store.list_performances(),
        {r.activity_id for r in records},
    )
    store.replace_items(assign_items(items, ["e1", "e2"]))
    store.close()
    print(f"fixture ready: {sys.argv[1]}")


if __name__ == "__main__":
    main()
