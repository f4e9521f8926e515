"""Operator command line: ingest -> preprocess -> extract -> score -> stats ->
plot, plus the evaluation protocol and the review service.

Exit codes: 0 success, 2 usage error, 3 data error, 4 provider error.
Every command is re-runnable: completed stages are skipped (preprocess,
extract) or cleanly overwritten (score, stats, plot, eval sample).
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import sys
from pathlib import Path

from . import evaluate, extract as extraction, ingest, report, scoring
from .evaluate import CommentQuestion, ItemKind, Rating, validate_rating_kind
from .model import ABILITY_ORDER, AREA_ORDER
from .stats import AnalysisOutcome, descriptive, select_and_run
from .store import Store, StoreError, open_store

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_PROVIDER = 4


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="playinsight",
        description="Free-play narrative analysis pipeline",
    )
    parser.add_argument("--store", default="playinsight.db", help="store file path")
    parser.add_argument("--out", default="out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="import roster or narrative CSV files")
    ingest_sub = p_ingest.add_subparsers(dest="what", required=True)
    ingest_sub.add_parser("children", help="import children roster").add_argument("file")
    ingest_sub.add_parser("narratives", help="import activity narratives").add_argument("file")

    p_pre = sub.add_parser(
        "preprocess",
        help="normalize and anonymize all unprocessed narratives (no-op when done)",
    )
    p_pre.add_argument("--corrections", help="two-column find,replace CSV", default=None)

    p_ext = sub.add_parser(
        "extract",
        help="run ability extraction over unextracted records (no-op when done)",
    )
    p_ext.add_argument("--mock", action="store_true", help="use the offline deterministic provider")
    p_ext.add_argument("--provider-config", default=None, help="key=value provider config file")
    p_ext.add_argument("--max-parallel", type=int, default=None)

    p_score = sub.add_parser("score", help="compute ability scores (overwrites prior scores)")
    p_score.add_argument("--from", dest="from_date", type=_parse_date, required=True)
    p_score.add_argument("--to", dest="to_date", type=_parse_date, required=True)
    p_score.add_argument(
        "--granularity",
        choices=[g.value for g in scoring.Granularity],
        default="custom",
    )

    p_stats = sub.add_parser("stats", help="run the comparison chain, export tables (overwrites)")
    p_stats.add_argument("--from", dest="from_date", type=_parse_date, required=True)
    p_stats.add_argument("--to", dest="to_date", type=_parse_date, required=True)
    p_stats.add_argument("--alpha", type=float, default=0.05)

    sub.add_parser("plot", help="emit radar and box-plot SVG documents (overwrites)")

    p_eval = sub.add_parser("eval", help="human reliability evaluation protocol")
    eval_sub = p_eval.add_subparsers(dest="what", required=True)
    p_sample = eval_sub.add_parser(
        "sample", help="draw the evaluation sample and generate items (overwrites)"
    )
    p_sample.add_argument("--confidence", type=float, default=0.95)
    p_sample.add_argument("--margin", type=float, default=0.05)
    p_sample.add_argument("--p", type=float, default=0.5)
    p_sample.add_argument("--seed", type=int, required=True)
    p_assign = eval_sub.add_parser("assign", help="partition items across evaluators")
    p_assign.add_argument("--evaluators", required=True, help="comma-separated evaluator ids")
    p_report = eval_sub.add_parser("report", help="print the reliability report")
    p_report.add_argument("--json", action="store_true", help="machine-readable output")
    p_exp = eval_sub.add_parser("export-items", help="write items to CSV for offline rating")
    p_exp.add_argument("file")
    p_imp = eval_sub.add_parser("import-ratings", help="load offline ratings from CSV")
    p_imp.add_argument("file")

    p_serve = sub.add_parser("serve", help="start the review service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui-dir", default=None,
                         help="built review-ui assets (default: auto-detect)")
    return parser


def _print_report(result: ingest.ImportReport) -> None:
    print(f"accepted={result.accepted} rejected={result.rejected}")
    for line, reason in result.reasons[:50]:
        print(f"  line {line}: {reason}")
    if len(result.reasons) > 50:
        print(f"  ... and {len(result.reasons) - 50} more")


def _cmd_ingest(args, store: Store) -> int:
    if args.what == "children":
        _print_report(ingest.import_children(args.file, store))
    else:
        _print_report(ingest.import_narratives(args.file, store))
    return EXIT_OK


def _cmd_preprocess(args, store: Store) -> int:
    corrections = (
        ingest.load_correction_table(args.corrections) if args.corrections else ()
    )
    roster = store.list_children()
    pending = store.list_activities(unprocessed_only=True)
    for record in pending:
        processed = ingest.preprocess(record, roster, corrections)
        store.set_processed_narrative(record.activity_id, processed.processed_narrative)
    print(f"processed={len(pending)}")
    return EXIT_OK


def _cmd_extract(args, store: Store) -> int:
    pending = [
        r for r in store.list_activities(unextracted_only=True)
        if r.processed_narrative
    ]
    if args.mock:
        provider = extraction.MockProvider()
        max_parallel = args.max_parallel or 4
    else:
        if not args.provider_config:
            print("error: Usage: --provider-config is required without --mock", file=sys.stderr)
            return EXIT_USAGE
        config = extraction.load_provider_config(args.provider_config)
        provider = extraction.HttpProvider(config)
        max_parallel = args.max_parallel or config.max_parallel
    log = extraction.ResponseLog(Path(str(store.path) + ".responses.jsonl"))
    results = extraction.extract_batch(
        pending, provider, max_parallel=max_parallel, store=store, log=log
    )
    failures = [r for r in results if r.error]
    rows = sum(len(r.rows) for r in results if not r.error)
    print(f"extracted={len(results) - len(failures)} rows={rows} failures={len(failures)}")
    for failure in failures[:20]:
        print(f"  {failure.activity_id}: {failure.error}")
    if failures and len(failures) == len(results):
        return EXIT_PROVIDER
    return EXIT_OK


def _query_from_args(args) -> scoring.ScoringQuery:
    return scoring.ScoringQuery(
        period_start=args.from_date,
        period_end=args.to_date,
        granularity=scoring.Granularity(getattr(args, "granularity", "custom")),
    )


def _cmd_score(args, store: Store, out_dir: Path) -> int:
    scores = scoring.compute_scores(store, _query_from_args(args))
    store.replace_scores(scores)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = report.export_scores(scores, out_dir / "scores.csv")
    print(f"scores={len(scores)} written={path}")
    return EXIT_OK


def _groups_by_ability(scores) -> dict:
    groups: dict = {}
    for ability in ABILITY_ORDER:
        per_area: dict[str, list[float]] = {}
        for s in scores:
            if s.ability is ability:
                per_area.setdefault(s.area, []).append(s.score)
        groups[ability] = {
            area: per_area[area] for area in AREA_ORDER if area in per_area
        }
    return groups


def _cmd_stats(args, store: Store, out_dir: Path) -> int:
    scores = scoring.compute_scores(store, _query_from_args(args))
    analyses = []
    skipped: list[str] = []
    for ability, groups in _groups_by_ability(scores).items():
        if len(groups) < 2:
            skipped.append(f"{ability.value}: fewer than 2 areas with scores")
            continue
        try:
            outcome = select_and_run(groups, alpha=args.alpha)
        except ValueError as exc:
            skipped.append(f"{ability.value}: {exc}")
            continue
        analyses.append(
            report.AbilityAnalysis(
                ability=ability,
                outcome=outcome,
                descriptives={area: descriptive(vals) for area, vals in groups.items()},
            )
        )
    paths = report.export_tables(analyses, out_dir)
    for analysis in analyses:
        omnibus = analysis.outcome.omnibus
        print(
            f"{analysis.ability.value}: {omnibus.method.display_name} "
            f"statistic={omnibus.statistic:.3f} p={report.fmt_p(omnibus.p_value)} "
            f"significant={'Yes' if omnibus.significant else 'No'}"
        )
    for note in skipped:
        print(f"skipped {note}")
    print(f"tables={', '.join(str(p) for p in paths.values())}")
    return EXIT_OK


def _cmd_plot(args, store: Store, out_dir: Path) -> int:
    scores = store.list_scores()
    if not scores:
        raise StoreError("no scores in store; run `score` first")
    out_dir.mkdir(parents=True, exist_ok=True)
    means = scoring.mean_scores_by_area(scores)
    by_area: dict[str, dict] = {}
    for m in means:
        by_area.setdefault(m.area, {})[m.ability] = m.mean
    written = []
    for area, ability_means in by_area.items():
        values = [ability_means.get(a, 0.0) for a in ABILITY_ORDER]
        path = out_dir / f"radar_{area}.svg"
        path.write_text(report.render_radar(area, values), encoding="utf-8")
        written.append(path)
    for ability in ABILITY_ORDER:
        groups = {}
        for area in AREA_ORDER:
            values = [s.score for s in scores if s.ability is ability and s.area == area]
            if values:
                groups[area] = values
        if not groups:
            continue
        path = out_dir / f"box_{ability.value}.svg"
        path.write_text(report.render_boxplot(ability, groups), encoding="utf-8")
        written.append(path)
    print(f"plots={len(written)}")
    return EXIT_OK


def _cmd_eval_sample(args, store: Store) -> int:
    records = store.list_activities()
    if not records:
        raise StoreError("no activities in store; run `ingest narratives` first")
    n = evaluate.sample_size(len(records), args.confidence, args.margin, args.p)
    sample = evaluate.draw_sample(records, n, args.seed)
    items = evaluate.generate_items(
        sample,
        store.list_performances([r.activity_id for r in sample]),
        store.extracted_activity_ids(),
    )
    store.replace_items(items)
    identified = sum(1 for i in items if i.kind is ItemKind.IDENTIFIED)
    print(
        f"population={len(records)} sample={n} items={len(items)} "
        f"identified={identified} unidentified={len(items) - identified}"
    )
    return EXIT_OK


def _cmd_eval_assign(args, store: Store) -> int:
    evaluators = [e.strip() for e in args.evaluators.split(",") if e.strip()]
    items = store.list_items()
    if not items:
        raise StoreError("no evaluation items; run `eval sample` first")
    assigned = evaluate.assign_items(items, evaluators)
    store.update_assignments(assigned)
    per_evaluator: dict[str, set] = {}
    for item in assigned:
        per_evaluator.setdefault(item.assigned_to, set()).add(item.activity_id)
    summary = " ".join(
        f"{evaluator}={len(activities)}"
        for evaluator, activities in sorted(per_evaluator.items())
    )
    print(f"assigned activities: {summary}")
    return EXIT_OK


def reliability_report_dict(store: Store) -> dict:
    items = store.list_items()
    if not items:
        raise StoreError("no evaluation items; run `eval sample` first")
    result = evaluate.compute_reliability(
        store.list_ratings(), items, store.list_comments(), allow_partial=True
    )
    return result.to_dict()


def _cmd_eval_report(args, store: Store) -> int:
    payload = reliability_report_dict(store)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    if payload["partial"]:
        print("note: report is partial (unrated items remain)")
    header = (
        f"{'ability':24} {'ident.':>6} {'SC%':>6} {'AR%':>6} {'Acc%':>6} "
        f"{'unid.':>6} {'omis.':>6} {'Omis%':>6}"
    )
    print(header)
    for row in payload["rows"]:
        def cell(value):
            return "-" if value is None else f"{value:.1f}"
        print(
            f"{row['ability']:24} {row['total_identified']:>6} "
            f"{cell(row['semantic_consistency_pct']):>6} "
            f"{cell(row['ability_relevance_pct']):>6} "
            f"{cell(row['accuracy_pct']):>6} "
            f"{row['total_unidentified']:>6} {row['omission_count']:>6} "
            f"{cell(row['omission_rate_pct']):>6}"
        )
    print(f"comments={len(payload['comments'])}")
    return EXIT_OK


def _cmd_eval_export_items(args, store: Store) -> int:
    items = store.list_items()
    if not items:
        raise StoreError("no evaluation items; run `eval sample` first")
    narratives = {
        r.activity_id: r.processed_narrative or r.raw_narrative
        for r in store.list_activities()
    }
    with open(args.file, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["item_id", "activity_id", "ability", "kind", "behavior", "assigned_to", "narrative"]
        )
        for item in items:
            writer.writerow(
                [
                    item.item_id,
                    item.activity_id,
                    item.ability.value,
                    item.kind.value,
                    item.behavior or "",
                    item.assigned_to or "",
                    narratives.get(item.activity_id, ""),
                ]
            )
    print(f"items={len(items)} written={args.file}")
    return EXIT_OK


_YESNO = {"yes": True, "y": True, "1": True, "no": False, "n": False, "0": False, "": None}


def _cmd_eval_import_ratings(args, store: Store) -> int:
    items = {item.item_id: item for item in store.list_items()}
    result = ingest.ImportReport()
    with open(args.file, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = {"item_id", "evaluator_id", "semantic_consistency", "ability_relevance", "omission"}
        if not expected.issubset(set(reader.fieldnames or [])):
            raise StoreError(
                f"ratings CSV needs columns {sorted(expected)}, got {reader.fieldnames}"
            )
        for line, row in enumerate(reader, start=2):
            item = items.get(row["item_id"])
            if item is None:
                result.reject(line, f"unknown item {row['item_id']!r}")
                continue
            try:
                rating = Rating(
                    item_id=row["item_id"],
                    evaluator_id=row["evaluator_id"],
                    semantic_consistency=_YESNO[row["semantic_consistency"].strip().casefold()],
                    ability_relevance=_YESNO[row["ability_relevance"].strip().casefold()],
                    omission=_YESNO[row["omission"].strip().casefold()],
                    rated_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
                )
                validate_rating_kind(item, rating)
            except (KeyError, ValueError) as exc:
                result.reject(line, f"MalformedRow: {exc}")
                continue
            try:
                store.insert_rating(rating)
            except StoreError as exc:
                result.reject(line, f"{type(exc).__name__}: {exc}")
                continue
            result.accepted += 1
    _print_report(result)
    return EXIT_OK


def _cmd_serve(args, store: Store) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(store, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    try:
        store = open_store(args.store)
    except StoreError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        if args.command == "ingest":
            return _cmd_ingest(args, store)
        if args.command == "preprocess":
            return _cmd_preprocess(args, store)
        if args.command == "extract":
            return _cmd_extract(args, store)
        if args.command == "score":
            return _cmd_score(args, store, out_dir)
        if args.command == "stats":
            return _cmd_stats(args, store, out_dir)
        if args.command == "plot":
            return _cmd_plot(args, store, out_dir)
        if args.command == "eval":
            if args.what == "sample":
                return _cmd_eval_sample(args, store)
            if args.what == "assign":
                return _cmd_eval_assign(args, store)
            if args.what == "report":
                return _cmd_eval_report(args, store)
            if args.what == "export-items":
                return _cmd_eval_export_items(args, store)
            if args.what == "import-ratings":
                return _cmd_eval_import_ratings(args, store)
        if args.command == "serve":
            return _cmd_serve(args, store)
        raise AssertionError(f"unhandled command {args.command}")
    except extraction.ProviderUnavailable as exc:
        print(f"error: ProviderUnavailable: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (StoreError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    finally:
        store.close()


if __name__ == "__main__":
    sys.exit(main())
