"""
Human reliability-evaluation protocol
=====================================

Determines the evaluation sample size, draws a random sample of extracted
narratives, generates the 8-per-activity questionnaire items, partitions
them across professionals, and computes the reliability report from
(simulated) yes/no answers.

Run: python demos/03_reliability_protocol.py
"""

import random
import tempfile
from pathlib import Path

from playinsight.evaluate import (
    CommentEntry,
    CommentQuestion,
    ItemKind,
    Rating,
    assign_items,
    compute_reliability,
    draw_sample,
    generate_items,
    sample_size,
)
from playinsight.extract import MockProvider, extract_batch
from playinsight.ingest import preprocess
from playinsight.store import open_store
from playinsight.synth import synth_activities, synth_roster

workdir = Path(tempfile.mkdtemp(prefix="playinsight_eval_"))
store = open_store(workdir / "demo.db")

roster = synth_roster(seed=3)
activities = synth_activities(roster, seed=3)
for child in roster:
    store.insert_child(child)
processed = []
for record in activities:
    store.insert_activity(record)
    done = preprocess(record, roster)
    store.set_processed_narrative(done.activity_id, done.processed_narrative)
    processed.append(done)
extract_batch(processed, MockProvider(), max_parallel=8, store=store)

# 1. Sample size: Cochran formula with finite-population correction.
population = len(activities)
n = sample_size(population, confidence=0.95, margin=0.05, p=0.5)
print(f"population={population} -> sample size n={n} (95% confidence, 5% margin)")

# 2. Simple random sample, reproducible from the seed.
sample = draw_sample(store.list_activities(), n, seed=2024)

# 3. One item per (sampled narrative, ability): 8 x n items.
items = generate_items(
    sample,
    store.list_performances([r.activity_id for r in sample]),
    store.extracted_activity_ids(),
)
identified = sum(1 for i in items if i.kind is ItemKind.IDENTIFIED)
print(f"items={len(items)} (identified={identified}, "
      f"unidentified={len(items) - identified})")

# 4. Partition whole activities across eight professionals.
evaluators = [f"e{i}" for i in range(1, 9)]
assigned = assign_items(items, evaluators)
per = {}
for item in assigned:
    per.setdefault(item.assigned_to, set()).add(item.activity_id)
print("assignment:", {e: len(a) for e, a in sorted(per.items())})

# 5. Simulated answers: identified items mostly consistent and relevant,
#    unidentified items occasionally flagged as omissions.
rng = random.Random(7)
ratings = []
for item in assigned:
    if item.kind is ItemKind.IDENTIFIED:
        ratings.append(Rating(
            item_id=item.item_id, evaluator_id=item.assigned_to,
            semantic_consistency=rng.random() < 0.93,
            ability_relevance=rng.random() < 0.94,
        ))
    else:
        ratings.append(Rating(
            item_id=item.item_id, evaluator_id=item.assigned_to,
            omission=rng.random() < 0.14,
        ))
comments = [
    CommentEntry("e1", CommentQuestion.ADVANTAGES, "processes a semester in minutes"),
    CommentEntry("e2", CommentQuestion.DRAWBACKS, "emotion calls feel overconfident"),
]

# 6. The report: per-ability and overall percentages, rounded for display.
report = compute_reliability(ratings, assigned, comments)
print(f"\n{'ability':26} {'ident.':>6} {'SC%':>6} {'AR%':>6} {'Acc%':>6} "
      f"{'unid.':>6} {'Omis%':>6}")
for row in report.to_dict()["rows"]:
    fmt = lambda v: "-" if v is None else f"{v:.1f}"
    print(f"{row['ability']:26} {row['total_identified']:>6} "
          f"{fmt(row['semantic_consistency_pct']):>6} "
          f"{fmt(row['ability_relevance_pct']):>6} {fmt(row['accuracy_pct']):>6} "
          f"{row['total_unidentified']:>6} {fmt(row['omission_rate_pct']):>6}")

store.close()
print("\ndone.")
