"""HTTP review service: serves assigned questionnaire bundles to evaluators,
accepts ratings and comments, and exposes live progress and the reliability
report.

Sessions are bearer-token only; this is a LAN research tool, not an
internet-facing deployment (put TLS and real auth in a reverse proxy if you
must expose it).
"""

from __future__ import annotations

import datetime as dt
import os
import secrets
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .evaluate import (
    CommentEntry,
    CommentQuestion,
    ItemKind,
    Rating,
    compute_reliability,
    validate_rating_kind,
)
from .model import ABILITY_ORDER
from .store import Store, UniqueViolation

SESSION_TTL = dt.timedelta(hours=12)


class SessionRequest(BaseModel):
    evaluator_id: str = Field(min_length=1)


class SessionResponse(BaseModel):
    token: str
    evaluator_id: str
    assigned_activities: int


class RatingRequest(BaseModel):
    item_id: str
    semantic_consistency: bool | None = None
    ability_relevance: bool | None = None
    omission: bool | None = None


class CommentRequest(BaseModel):
    question: str
    text: str = Field(min_length=1)


_INSTRUCTIONS = """<!doctype html>
<html><head><meta charset="utf-8"><title>Evaluator instructions</title></head>
<body style="font-family: sans-serif; max-width: 42em; margin: 2em auto;">
<h1>Evaluator instructions</h1>
<p>Each screen shows one narrative and eight ability cards.</p>
<ul>
<li>For an <b>identified</b> ability, answer both questions:
  <i>Whether the generated description of the performance is consistent with
  the content of the child's narrative?</i> and
  <i>Whether the generated description of the performance matches with the
  identified ability?</i></li>
<li>For an <b>unidentified</b> ability, answer:
  <i>Whether the child's narrative reflects an ability, but AI failed to
  identify it?</i></li>
</ul>
<p>After your queue is empty you will be asked two open-ended questions about
the advantages and drawbacks of the technology.</p>
</body></html>
"""


def create_app(store: Store, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="playinsight review service", version="1.0.0")
    sessions: dict[str, tuple[str, dt.datetime]] = {}

    def _known_evaluators() -> set[str]:
        return {
            item.assigned_to for item in store.list_items() if item.assigned_to
        }

    def current_evaluator(authorization: str = Header(default="")) -> str:
        scheme, _, token = authorization.partition(" ")
        if scheme.lower() != "bearer" or not token:
            raise HTTPException(status_code=401, detail="missing bearer token")
        entry = sessions.get(token)
        if entry is None:
            raise HTTPException(status_code=401, detail="unknown token")
        evaluator_id, expiry = entry
        if dt.datetime.now(dt.timezone.utc) > expiry:
            sessions.pop(token, None)
            raise HTTPException(status_code=401, detail="session expired")
        return evaluator_id

    @app.post("/api/session", response_model=SessionResponse)
    def create_session(body: SessionRequest) -> SessionResponse:
        assigned = store.list_items(assigned_to=body.evaluator_id)
        if not assigned:
            raise HTTPException(
                status_code=404,
                detail=f"evaluator {body.evaluator_id!r} has no assignment",
            )
        token = secrets.token_hex(16)
        sessions[token] = (
            body.evaluator_id,
            dt.datetime.now(dt.timezone.utc) + SESSION_TTL,
        )
        return SessionResponse(
            token=token,
            evaluator_id=body.evaluator_id,
            assigned_activities=len({item.activity_id for item in assigned}),
        )

    @app.get("/api/items/next")
    def next_bundle(evaluator_id: str = Depends(current_evaluator)):
        items = store.list_items(assigned_to=evaluator_id)
        rated = {r.item_id for r in store.list_ratings()}
        by_activity: dict[str, list] = {}
        for item in items:
            by_activity.setdefault(item.activity_id, []).append(item)
        # Stable queue order: ascending activity id; a reconnecting evaluator
        # resumes at the same bundle.
        for activity_id in sorted(by_activity):
            bundle = by_activity[activity_id]
            if all(item.item_id in rated for item in bundle):
                continue
            record = store.get_activity(activity_id)
            order = {ability: i for i, ability in enumerate(ABILITY_ORDER)}
            bundle.sort(key=lambda item: order[item.ability])
            return {
                "activity_id": activity_id,
                "narrative": record.processed_narrative or record.raw_narrative,
                "items": [
                    {
                        "item_id": item.item_id,
                        "ability": item.ability.value,
                        "ability_display": item.ability.display_name,
                        "kind": item.kind.value,
                        "behavior": item.behavior,
                        "rated": item.item_id in rated,
                    }
                    for item in bundle
                ],
            }
        return Response(status_code=204)

    @app.post("/api/ratings", status_code=201)
    def submit_rating(
        body: RatingRequest, evaluator_id: str = Depends(current_evaluator)
    ):
        items = {item.item_id: item for item in store.list_items()}
        item = items.get(body.item_id)
        if item is None:
            raise HTTPException(status_code=404, detail=f"unknown item {body.item_id!r}")
        if item.assigned_to != evaluator_id:
            raise HTTPException(
                status_code=422,
                detail=f"item {body.item_id!r} is not assigned to {evaluator_id!r}",
            )
        rating = Rating(
            item_id=body.item_id,
            evaluator_id=evaluator_id,
            semantic_consistency=body.semantic_consistency,
            ability_relevance=body.ability_relevance,
            omission=body.omission,
            rated_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        )
        try:
            validate_rating_kind(item, rating)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            store.insert_rating(rating)
        except UniqueViolation:
            raise HTTPException(
                status_code=409, detail=f"item {body.item_id!r} already rated"
            )
        return {"status": "recorded", "item_id": body.item_id}

    @app.get("/api/progress")
    def progress():
        items = store.list_items()
        rated = {r.item_id for r in store.list_ratings()}
        tally: dict[str, dict[str, int]] = {}
        for item in items:
            evaluator = item.assigned_to or "(unassigned)"
            bucket = tally.setdefault(evaluator, {"assigned": 0, "rated": 0})
            bucket["assigned"] += 1
            bucket["rated"] += item.item_id in rated
        return {
            "evaluators": [
                {"evaluator_id": evaluator, **counts}
                for evaluator, counts in sorted(tally.items())
            ],
            "total_assigned": len(items),
            "total_rated": len(rated),
        }

    @app.get("/api/report")
    def report():
        items = store.list_items()
        if not items:
            raise HTTPException(status_code=404, detail="no evaluation items exist")
        result = compute_reliability(
            store.list_ratings(), items, store.list_comments(), allow_partial=True
        )
        return result.to_dict()

    @app.post("/api/comments", status_code=201)
    def submit_comment(
        body: CommentRequest, evaluator_id: str = Depends(current_evaluator)
    ):
        try:
            question = CommentQuestion(body.question)
        except ValueError:
            raise HTTPException(
                status_code=422,
                detail=f"question must be one of {[q.value for q in CommentQuestion]}",
            )
        store.insert_comment(
            CommentEntry(
                evaluator_id=evaluator_id,
                question=question,
                text=body.text,
                created_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            )
        )
        return {"status": "recorded"}

    @app.get("/instructions", response_class=HTMLResponse)
    def instructions() -> str:
        return _INSTRUCTIONS

    if ui_dir is None:
        ui_dir = default_ui_dir()
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=Path(ui_dir), html=True), name="ui")
    return app


def default_ui_dir() -> Path | None:
    """Locate the built review-ui assets: PLAYINSIGHT_UI_DIR, then the
    working directory, then the source checkout next to this package."""
    env = os.environ.get("PLAYINSIGHT_UI_DIR")
    candidates = [Path(env)] if env else []
    candidates.append(Path("frontend") / "dist")
    candidates.append(Path(__file__).resolve().parents[2] / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None
