"""Operator command line: train models, grow corpora, query the KB, serve.

Every subcommand is a thin adapter over one module operation.  Exit codes:
0 success, 1 domain error (bad file, validation failure), 2 usage error.
``--json`` switches stdout to machine-readable JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import analytics, augment, classify, events, qa, textproc
from .server import KioskEngine, create_app


def _emit_json(payload) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))


def _load_stopwords(path: Optional[str]) -> frozenset[str]:
    return textproc.load_stopwords(path) if path else frozenset()


def _eval_payload(report: classify.EvalReport) -> dict:
    return {
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "per_class": [
            {"label": m.label, "precision": m.precision, "recall": m.recall, "f1": m.f1}
            for m in report.per_class
        ],
        "confusion": [list(row) for row in report.confusion],
        "labels": list(report.labels),
    }


def _cmd_train(args: argparse.Namespace) -> int:
    corpus = classify.load_corpus(args.data)
    stop_words = _load_stopwords(args.stopwords)
    model = classify.train_mnb(
        corpus, alpha=args.alpha, min_count=args.min_count, stop_words=stop_words
    )
    Path(args.out).write_bytes(classify.save_model(model))
    report = None
    if args.eval:
        report = classify.evaluate(model, classify.load_corpus(args.eval), stop_words=stop_words)
    if args.json:
        payload = {
            "model_path": args.out,
            "alpha": model.alpha,
            "classes": list(model.labels),
            "vocabulary_size": len(model.vocabulary),
            "documents": len(corpus),
            "eval": _eval_payload(report) if report else None,
        }
        _emit_json(payload)
    else:
        print(f"trained {len(model.labels)} classes on {len(corpus)} documents")
        print(f"vocabulary: {len(model.vocabulary)} terms, alpha={model.alpha}")
        print(f"model written to {args.out}")
        if report:
            print(f"eval accuracy={report.accuracy:.4f} macro_f1={report.macro_f1:.4f}")
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    model = classify.load_model(Path(args.model).read_bytes())
    stop_words = _load_stopwords(args.stopwords)
    label, posteriors = classify.predict(model, args.text, stop_words=stop_words)
    if args.json:
        _emit_json({"label": label, "posteriors": posteriors})
    else:
        print(f"label: {label}")
        for name in sorted(posteriors):
            print(f"  {name}: {posteriors[name]:.6f}")
    return 0


def _cmd_ask(args: argparse.Namespace) -> int:
    kb = qa.load_kb(args.kb)
    model = classify.load_model(Path(args.model).read_bytes()) if args.model else None
    stop_words = _load_stopwords(args.stopwords)
    result = qa.answer(
        args.text,
        kb,
        model=model,
        threshold=args.threshold,
        category_filter=not args.no_category_filter,
        stop_words=stop_words,
    )
    if args.json:
        _emit_json(
            {
                "entry_id": result.entry_id,
                "answer_text": result.answer_text,
                "score": result.score,
                "recall_term": result.recall_term,
                "precision_term": result.precision_term,
                "fallback": result.fallback,
            }
        )
    else:
        print(result.answer_text)
        origin = f"entry {result.entry_id}" if result.entry_id else "fallback"
        print(f"({origin}, score={result.score:.4f})")
    return 0


def _cmd_augment(args: argparse.Namespace) -> int:
    corpus = classify.load_corpus(args.data)
    lexicon = augment.load_lexicon(args.lexicon)
    grown = augment.augment_corpus(
        corpus, lexicon, target_size=args.target, cap_per_sentence=args.cap
    )
    classify.save_corpus(grown, args.out)
    if args.json:
        _emit_json(
            {
                "input_records": len(corpus),
                "output_records": len(grown),
                "generated": len(grown) - len(corpus),
                "out_path": args.out,
            }
        )
    else:
        print(f"{len(corpus)} records grown to {len(grown)} ({len(grown) - len(corpus)} variants)")
        print(f"written to {args.out}")
    return 0


def _cmd_mine_ngrams(args: argparse.Namespace) -> int:
    corpus = classify.load_corpus(args.corpus)
    docs = [textproc.tokenize(rec.text) for rec in corpus.records]
    table = augment.mine_frequent_ngrams(docs, n=args.n, top_k=args.top)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            augment.write_ngram_csv(table, handle)
    if args.json:
        _emit_json([{"ngram": " ".join(gram), "count": count} for gram, count in table.entries])
    else:
        augment.write_ngram_csv(table, sys.stdout)
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    document = Path(args.page).read_text(encoding="utf-8")
    stop_words = _load_stopwords(args.stopwords)
    markers = (
        tuple(m.strip() for m in args.markers.split(",") if m.strip())
        if args.markers
        else qa.DEFAULT_QUANT_MARKERS
    )
    short = qa.extract_short_answer(args.question, document, stop_words=stop_words, markers=markers)
    if args.json:
        _emit_json(
            {"sentence": short.sentence, "extracted": short.extracted, "score": short.score}
        )
    else:
        if short.extracted is not None:
            print(short.extracted)
        print(f"sentence: {short.sentence}")
        print(f"score: {short.score:.4f}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    log = analytics.RequestLog(args.log)
    stats = analytics.compute_stats(log.records(), top_k=args.top, day_basis=args.days)
    if args.json:
        _emit_json(
            {
                "total": stats.total,
                "by_weekday": list(stats.by_weekday),
                "mean_daily": stats.mean_daily,
                "top_requests": [{"text": t, "count": c} for t, c in stats.top_requests],
            }
        )
    else:
        weekdays = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
        print(f"total requests: {stats.total}")
        print(f"mean daily ({args.days}): {stats.mean_daily:.2f}")
        for day, count in zip(weekdays, stats.by_weekday):
            print(f"  {day}: {count}")
        if stats.top_requests:
            print("top requests:")
            for text, count in stats.top_requests:
                print(f"  {count:6d}  {text}")
    return 0


def build_engine(
    kb_path: str,
    model_path: Optional[str] = None,
    rules_path: Optional[str] = None,
    log_path: Optional[str] = None,
    threshold: float = 0.5,
    stopwords_path: Optional[str] = None,
) -> KioskEngine:
    """Load all artifacts for the service; any failure propagates."""
    kb = qa.load_kb(kb_path)
    model = classify.load_model(Path(model_path).read_bytes()) if model_path else None
    rules = events.load_rules(rules_path) if rules_path else events.DEFAULT_RULES
    return KioskEngine(
        kb=kb,
        rules=rules,
        model=model,
        threshold=threshold,
        stop_words=_load_stopwords(stopwords_path),
        log=analytics.RequestLog(log_path),
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from . import bundled_data_path

    kb_path = args.kb or str(bundled_data_path("faq.json"))
    try:
        engine = build_engine(
            kb_path=kb_path,
            model_path=args.model,
            rules_path=args.rules,
            log_path=args.log,
            threshold=args.threshold,
            stopwords_path=args.stopwords,
        )
    except (ValueError, OSError) as exc:
        print(f"error: cannot start, artifact failed to load: {exc}", file=sys.stderr)
        return 1
    ui_dir = args.ui if args.ui and Path(args.ui).is_dir() else None
    if args.ui and ui_dir is None:
        print(f"error: UI directory not found: {args.ui}", file=sys.stderr)
        return 1
    app = create_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kiosk-assistant",
        description="Offline kiosk assistant: classification, FAQ answers, events, analytics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a Naive Bayes classifier from a labeled corpus")
    p.add_argument("--data", required=True, help="labeled corpus JSON")
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--alpha", type=float, default=1.0, help="Laplace smoothing constant")
    p.add_argument("--min-count", type=int, default=1, help="vocabulary frequency floor")
    p.add_argument("--stopwords", help="stop-word file (one token per line)")
    p.add_argument("--eval", help="held-out corpus JSON to evaluate after training")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("classify", help="classify one text with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--stopwords")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("ask", help="answer a question from the FAQ knowledge base")
    p.add_argument("--kb", required=True, help="knowledge base JSON")
    p.add_argument("--text", required=True)
    p.add_argument("--model", help="optional classifier model for category filtering")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--no-category-filter", action="store_true")
    p.add_argument("--stopwords")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_ask)

    p = sub.add_parser("augment", help="grow a labeled corpus with lexicon substitutions")
    p.add_argument("--data", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--target", type=int, required=True, help="target corpus size")
    p.add_argument("--cap", type=int, default=20, help="max variants per sentence")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_augment)

    p = sub.add_parser("mine-ngrams", help="most frequent n-grams of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--top", type=int, default=50)
    p.add_argument("--out", help="also write CSV to this path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_mine_ngrams)

    p = sub.add_parser("extract", help="extract a short answer from a document")
    p.add_argument("--question", required=True)
    p.add_argument("--page", required=True, help="local document / HTML file")
    p.add_argument("--markers", help="comma-separated quantitative markers")
    p.add_argument("--stopwords")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("stats", help="usage statistics from a request log")
    p.add_argument("--log", required=True, help="JSON Lines request log")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--days", choices=list(analytics.DAY_BASES), default="calendar")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--kb", help="knowledge base JSON (default: the bundled campus FAQ)")
    p.add_argument("--model")
    p.add_argument("--rules")
    p.add_argument("--log")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--stopwords")
    p.add_argument("--ui", help="directory with the kiosk web UI to mount at /ui")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
