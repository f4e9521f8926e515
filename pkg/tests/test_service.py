import datetime as dt
import threading

import pytest
from fastapi.testclient import TestClient

from playinsight.cli import reliability_report_dict
from playinsight.evaluate import ItemKind, assign_items, generate_items
from playinsight.extract import MockProvider, extract_batch
from playinsight.ingest import preprocess
from playinsight.model import ActivityRecord, Child, Gender
from playinsight.service import create_app
from playinsight.store import open_store

NARRATIVES = [
    "we counted ten blocks and built a tower together",
    "I climbed the hill and slid down",
    "I drew a picture and told the teacher",
    "we pretended the sand was soup",
    "I helped Meimei up when she was sad",
    "I asked for the bucket and we shared it",
]


def make_service_store(path, evaluators=("e1", "e2"), n_activities=6):
    store = open_store(path)
    roster = [
        Child(child_id="c01", name="Lin Mei", nickname="Meimei",
              birth_year=2018, gender=Gender.F, class_id="classA"),
    ]
    store.insert_child(roster[0])
    records = []
    for i in range(n_activities):
        record = ActivityRecord(
            activity_id=f"act{i:02d}", child_id="c01",
            raw_narrative=NARRATIVES[i % len(NARRATIVES)],
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
    store.replace_items(assign_items(items, list(evaluators)))
    return store


@pytest.fixture
def client(tmp_path):
    store = make_service_store(tmp_path / "svc.db")
    with TestClient(create_app(store, ui_dir=tmp_path / "no-ui")) as c:
        c.pli_store = store
        yield c
    store.close()


def login(client, evaluator_id):
    response = client.post("/api/session", json={"evaluator_id": evaluator_id})
    assert response.status_code == 200
    token = response.json()["token"]
    return {"Authorization": f"Bearer {token}"}


def answers_for(item):
    if item["kind"] == "identified":
        return {"semantic_consistency": True, "ability_relevance": True}
    return {"omission": False}


def rate_bundle(client, headers, bundle):
    for item in bundle["items"]:
        response = client.post(
            "/api/ratings",
            json={"item_id": item["item_id"], **answers_for(item)},
            headers=headers,
        )
        assert response.status_code == 201, response.text


class TestSession:
    def test_unknown_evaluator_404(self, client):
        response = client.post("/api/session", json={"evaluator_id": "stranger"})
        assert response.status_code == 404

    def test_session_reports_assignment_size(self, client):
        response = client.post("/api/session", json={"evaluator_id": "e1"})
        assert response.status_code == 200
        assert response.json()["assigned_activities"] == 3

    def test_missing_token_401(self, client):
        assert client.get("/api/items/next").status_code == 401

    def test_bad_token_401(self, client):
        headers = {"Authorization": "Bearer not-a-token"}
        assert client.get("/api/items/next", headers=headers).status_code == 401


class TestRatingWorkflow:
    def test_bundle_shape(self, client):
        headers = login(client, "e1")
        bundle = client.get("/api/items/next", headers=headers).json()
        assert len(bundle["items"]) == 8
        assert bundle["narrative"]
        kinds = {i["kind"] for i in bundle["items"]}
        assert kinds <= {"identified", "unidentified"}
        for item in bundle["items"]:
            if item["kind"] == "identified":
                assert item["behavior"]
            else:
                assert item["behavior"] is None

    def test_next_is_stable_until_rated_then_advances(self, client):
        headers = login(client, "e1")
        first = client.get("/api/items/next", headers=headers).json()
        again = client.get("/api/items/next", headers=headers).json()
        assert first["activity_id"] == again["activity_id"]
        rate_bundle(client, headers, first)
        after = client.get("/api/items/next", headers=headers)
        assert after.status_code == 200
        assert after.json()["activity_id"] != first["activity_id"]

    def test_empty_queue_gives_204(self, client):
        headers = login(client, "e1")
        while True:
            response = client.get("/api/items/next", headers=headers)
            if response.status_code == 204:
                break
            rate_bundle(client, headers, response.json())
        assert client.get("/api/items/next", headers=headers).status_code == 204

    def test_duplicate_rating_409(self, client):
        headers = login(client, "e1")
        bundle = client.get("/api/items/next", headers=headers).json()
        item = bundle["items"][0]
        body = {"item_id": item["item_id"], **answers_for(item)}
        assert client.post("/api/ratings", json=body, headers=headers).status_code == 201
        assert client.post("/api/ratings", json=body, headers=headers).status_code == 409

    def test_kind_mismatch_422(self, client):
        headers = login(client, "e1")
        bundle = client.get("/api/items/next", headers=headers).json()
        item = bundle["items"][0]
        wrong = (
            {"omission": True}
            if item["kind"] == "identified"
            else {"semantic_consistency": True, "ability_relevance": False}
        )
        response = client.post(
            "/api/ratings", json={"item_id": item["item_id"], **wrong}, headers=headers
        )
        assert response.status_code == 422

    def test_unknown_item_404(self, client):
        headers = login(client, "e1")
        response = client.post(
            "/api/ratings", json={"item_id": "nope:empathy", "omission": True},
            headers=headers,
        )
        assert response.status_code == 404

    def test_foreign_item_422(self, client):
        headers_e1 = login(client, "e1")
        headers_e2 = login(client, "e2")
        bundle = client.get("/api/items/next", headers=headers_e2).json()
        item = bundle["items"][0]
        response = client.post(
            "/api/ratings",
            json={"item_id": item["item_id"], **answers_for(item)},
            headers=headers_e1,
        )
        assert response.status_code == 422


class TestProgressAndReport:
    def test_progress_counts(self, client):
        headers = login(client, "e1")
        bundle = client.get("/api/items/next", headers=headers).json()
        rate_bundle(client, headers, bundle)
        progress = client.get("/api/progress").json()
        by_evaluator = {p["evaluator_id"]: p for p in progress["evaluators"]}
        assert by_evaluator["e1"]["assigned"] == 24
        assert by_evaluator["e1"]["rated"] == 8
        assert by_evaluator["e2"]["rated"] == 0
        assert progress["total_rated"] == 8

    def test_report_partial_until_complete(self, client):
        headers = login(client, "e1")
        bundle = client.get("/api/items/next", headers=headers).json()
        rate_bundle(client, headers, bundle)
        assert client.get("/api/report").json()["partial"] is True

    def test_report_matches_cli_field_for_field(self, client):
        for evaluator in ("e1", "e2"):
            headers = login(client, evaluator)
            while True:
                response = client.get("/api/items/next", headers=headers)
                if response.status_code == 204:
                    break
                rate_bundle(client, headers, response.json())
            client.post(
                "/api/comments",
                json={"question": "advantages", "text": f"fast, says {evaluator}"},
                headers=headers,
            )
        api_report = client.get("/api/report").json()
        cli_report = reliability_report_dict(client.pli_store)
        assert api_report == cli_report
        assert api_report["partial"] is False

    def test_comments_validation(self, client):
        headers = login(client, "e1")
        ok = client.post(
            "/api/comments", json={"question": "drawbacks", "text": "slow wifi"},
            headers=headers,
        )
        assert ok.status_code == 201
        bad = client.post(
            "/api/comments", json={"question": "musings", "text": "hmm"},
            headers=headers,
        )
        assert bad.status_code == 422
        empty = client.post(
            "/api/comments", json={"question": "drawbacks", "text": ""},
            headers=headers,
        )
        assert empty.status_code == 422


class TestConcurrentEvaluators:
    def test_partition_holds_under_concurrent_polling(self, tmp_path):
        store = make_service_store(tmp_path / "conc.db", evaluators=("e1", "e2"))
        with TestClient(create_app(store, ui_dir=tmp_path / "no-ui")) as client:
            seen: dict[str, list[str]] = {"e1": [], "e2": []}
            errors = []

            def work(evaluator):
                try:
                    headers = login(client, evaluator)
                    while True:
                        response = client.get("/api/items/next", headers=headers)
                        if response.status_code == 204:
                            return
                        bundle = response.json()
                        seen[evaluator].append(bundle["activity_id"])
                        rate_bundle(client, headers, bundle)
                except Exception as exc:  # pragma: no cover
                    errors.append(exc)

            threads = [threading.Thread(target=work, args=(e,)) for e in ("e1", "e2")]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert not errors
            assert not set(seen["e1"]) & set(seen["e2"])
            # post-run recount: every accepted submission is present exactly once
            ratings = store.list_ratings()
            assert len(ratings) == len(store.list_items())
            assert len({r.item_id for r in ratings}) == len(ratings)
        store.close()


class TestStaticHosting:
    def test_instructions_page(self, client):
        response = client.get("/instructions")
        assert response.status_code == 200
        assert "identified" in response.text

    def test_ui_mounted_when_built(self, tmp_path):
        store = make_service_store(tmp_path / "ui.db")
        ui = tmp_path / "dist"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>review ui</body></html>")
        with TestClient(create_app(store, ui_dir=ui)) as client:
            response = client.get("/")
            assert response.status_code == 200
            assert "review ui" in response.text
        store.close()


class TestApiDescription:
    def test_shipped_openapi_matches_app(self, tmp_path):
        import json
        from pathlib import Path

        store = make_service_store(tmp_path / "oa.db")
        app = create_app(store, ui_dir=tmp_path / "no-ui")
        shipped = json.loads(
            (Path(__file__).resolve().parent.parent / "docs" / "openapi.json").read_text()
        )
        assert app.openapi() == shipped
        store.close()
