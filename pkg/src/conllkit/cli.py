"""Command-line entry point wiring all modules together for batch use.

Exit codes: 0 success, 1 data findings under --strict or a module error,
2 usage, 3 I/O, 4 internal invariant breach. Output is deterministic for
identical inputs and arguments; the only timestamps live in decision logs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import conll_io, diffing, reporting, repair as repair_mod, scoring, taxonomy
from .errors import ConllkitError
from .model import DocFormat, Domain, EncodingScheme


def _load(path: str, encoding: str | None, ner_column: int):
    spec = conll_io.ColumnSpec(ner_column_index=ner_column)
    override = EncodingScheme.parse(encoding) if encoding else None
    corpus, report = conll_io.parse_file(path, spec, encoding=override)
    effective = override if override is not None else report.detected_encoding
    return corpus, report, effective


def _load_metadata(path: str | None):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return conll_io.read_metadata_sidecar(fh)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _color(args) -> bool:
    # styling only for terminal text output; NO_COLOR wins (see reporting.use_color)
    return args.output is None and args.out_format == "text" and reporting.use_color()


def _add_common(p: argparse.ArgumentParser, *, fmt_choices=("text", "json")) -> None:
    p.add_argument("--format", choices=fmt_choices, default="text", dest="out_format")
    p.add_argument("--output", "-o", default=None, help="write to file instead of stdout")


def _add_encoding(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoding", choices=("iob1", "bio", "iob2"), default=None,
                   help="override label encoding (default: auto-detect per file)")
    p.add_argument("--ner-column", type=int, default=-1,
                   help="column index of the NER tag (default: last)")


def cmd_validate(args) -> int:
    corpus, report, encoding = _load(args.corpus, args.encoding, args.ner_column)
    if args.repair:
        repaired = conll_io.conlleval_repair(corpus)
        if args.output is None:
            sys.stdout.buffer.write(conll_io.serialize_corpus(repaired))
        else:
            conll_io.write_file(args.output, repaired)
        return 0
    payload = {
        "token_count": report.token_count,
        "sentence_count": report.sentence_count,
        "document_count": report.document_count,
        "detected_encoding": report.detected_encoding.value,
        "encoding_ambiguous": report.encoding_ambiguous,
        "violations": [
            {
                "doc_index": v.doc_index,
                "sentence_index": v.sentence_index,
                "token_index": v.token_index,
                "source_line": v.source_line,
                "prev_label": str(v.prev_label),
                "cur_label": str(v.cur_label),
            }
            for v in report.violations
        ],
    }
    if args.out_format == "json":
        _emit(reporting.dumps(payload), args.output)
    else:
        lines = [
            f"documents: {report.document_count}  sentences: {report.sentence_count}  "
            f"tokens: {report.token_count}",
            f"detected encoding: {report.detected_encoding.value}"
            + (" (ambiguous, defaulted)" if report.encoding_ambiguous else ""),
            f"violations under {encoding.value}: {len(report.violations)}",
        ]
        lines.extend(f"  {v}" for v in report.violations)
        _emit("\n".join(lines) + "\n", args.output)
    if args.strict and report.violations:
        return 1
    return 0


def cmd_score(args) -> int:
    gold, _, gold_enc = _load(args.gold, args.encoding, args.ner_column)
    pred, _, pred_enc = _load(args.pred, args.encoding, args.ner_column)
    if args.repair:
        gold = conll_io.conlleval_repair(gold)
        pred = conll_io.conlleval_repair(pred)
        gold_enc = pred_enc = EncodingScheme.BIO
    if args.metadata:
        metadata = _load_metadata(args.metadata)
        reports = scoring.score_stratified(
            gold, pred, metadata, gold_encoding=gold_enc, pred_encoding=pred_enc
        )
        if args.out_format == "json":
            _emit(reporting.dumps([reporting.score_to_dict(r) for r in reports]), args.output)
        else:
            overall = reports[-1]
            text = reporting.render_stratified_text(reports, color=_color(args))
            text += "\n" + reporting.render_score_text(overall, color=_color(args))
            _emit(text, args.output)
    else:
        report = scoring.score(gold, pred, gold_encoding=gold_enc, pred_encoding=pred_enc)
        if args.out_format == "json":
            _emit(reporting.dumps(reporting.score_to_dict(report)), args.output)
        else:
            _emit(reporting.render_score_text(report, color=_color(args)), args.output)
    return 0


def cmd_errors(args) -> int:
    gold, _, gold_enc = _load(args.gold, args.encoding, args.ner_column)
    pred, pred_report, pred_enc = _load(args.pred, args.encoding, args.ner_column)
    # invalid transitions in the predictions ride along with the taxonomy
    # report; they are not a fifth error category
    pred_violations = list(pred_report.violations)
    if args.repair:
        gold = conll_io.conlleval_repair(gold)
        pred = conll_io.conlleval_repair(pred)
        gold_enc = pred_enc = EncodingScheme.BIO
    metadata = _load_metadata(args.metadata)
    domain = Domain.parse(args.domain) if args.domain else None
    doc_format = DocFormat.parse(args.doc_format) if args.doc_format else None

    records = taxonomy.classify_errors(
        gold, pred, gold_encoding=gold_enc, pred_encoding=pred_enc
    )
    summary = taxonomy.error_summary(records, group_by=args.group_by, metadata=metadata)
    rows = taxonomy.count_mention_errors(
        gold, pred, metadata=metadata, domain=domain, doc_format=doc_format,
        gold_encoding=gold_enc, pred_encoding=pred_enc,
    )
    if args.out_format == "json":
        payload = {
            "summary": summary,
            "counts": [
                {"count": r.count, "polarity": r.polarity, "type": r.entity_type,
                 "surface": r.surface}
                for r in rows
            ],
            "pred_transition_violations": len(pred_violations),
        }
        _emit(reporting.dumps(payload), args.output)
    elif args.out_format == "tsv":
        _emit(reporting.render_error_counts_tsv(rows), args.output)
    else:
        text = reporting.render_summary_text(summary, color=_color(args))
        text += "\n" + reporting.render_error_counts_text(rows, color=_color(args))
        text += f"\ninvalid label transitions in pred: {len(pred_violations)}\n"
        _emit(text, args.output)
    return 0


def cmd_recall_split(args) -> int:
    gold, _, gold_enc = _load(args.gold, args.encoding, args.ner_column)
    pred, _, pred_enc = _load(args.pred, args.encoding, args.ner_column)
    train, _, train_enc = _load(args.train, args.encoding, args.ner_column)
    split = scoring.seen_unseen_recall(
        gold, pred, train,
        case_sensitive=not args.ignore_case,
        match_type=args.match_type,
        test_gold_encoding=gold_enc,
        test_pred_encoding=pred_enc,
        train_encoding=train_enc,
    )
    if args.out_format == "json":
        _emit(reporting.dumps(reporting.seen_split_to_dict(split)), args.output)
    else:
        _emit(reporting.render_seen_split_text(split, color=_color(args)), args.output)
    return 0


def _version_names(paths: list[str], names: str | None) -> list[str]:
    if names:
        out = [n.strip() for n in names.split(",")]
        if len(out) != len(paths):
            raise ValueError(f"--names needs {len(paths)} comma-separated names")
        return out
    stems = [Path(p).stem for p in paths]
    if len(set(stems)) != len(stems):  # duplicate filenames: fall back to v0..vN
        return [f"v{i}" for i in range(len(paths))]
    return stems


def cmd_diff(args) -> int:
    names = _version_names([args.a, args.b], args.names)
    a, _, _ = _load(args.a, args.encoding, args.ner_column)
    b, _, _ = _load(args.b, args.encoding, args.ner_column)
    count, records = diffing.diff_pair(
        a, b, names=(names[0], names[1]), normalize=not args.raw_labels
    )
    if args.out_format == "json":
        payload = {
            "count": count,
            "records": [
                {
                    "diff_id": r.diff_id,
                    "doc_index": r.doc_index,
                    "sentence_index": r.sentence_index,
                    "token_index": r.token_index,
                    "surface": r.surface,
                    "labels": r.labels_dict,
                }
                for r in records
            ],
        }
        _emit(reporting.dumps(payload), args.output)
    else:
        lines = [f"label differences: {count}"]
        for r in records:
            labs = "  ".join(f"{n}={lab}" for n, lab in r.labels)
            lines.append(
                f"  doc {r.doc_index} sent {r.sentence_index} tok {r.token_index} "
                f"{r.surface!r}: {labs}"
            )
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_agree(args) -> int:
    names = _version_names(args.corpora, args.names)
    versions = [_load(p, args.encoding, args.ner_column)[0] for p in args.corpora]
    partition = diffing.agreement(versions, names=names, normalize=not args.raw_labels)
    buckets = []
    for key, count in sorted(partition.counts.items(), key=lambda kv: (-kv[1], kv[0])):
        agree_blocks = [
            "{" + ",".join(names[i] for i in block) + "}" for block in key
        ]
        buckets.append({"partition": " vs ".join(agree_blocks), "count": count})
    if args.out_format == "json":
        payload = {
            "versions": names,
            "aligned_tuples": partition.aligned_total,
            "all_agree": partition.all_agree,
            "buckets": buckets,
        }
        _emit(reporting.dumps(payload), args.output)
    else:
        lines = [f"aligned token tuples: {partition.aligned_total}"]
        lines.extend(f"  {b['partition']}: {b['count']}" for b in buckets)
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_export_disagreements(args) -> int:
    names = _version_names(args.corpora, args.names)
    versions = [_load(p, args.encoding, args.ner_column)[0] for p in args.corpora]
    _, records = diffing.diff_versions(versions, names=names, normalize=not args.raw_labels)
    text = diffing.export_disagreements(
        records, versions, names=names, context_window=args.window
    )
    _emit(text, args.output)
    return 0


def cmd_repair(args) -> int:
    corpus, _, encoding = _load(args.corpus, args.encoding, args.ner_column)
    with open(args.patch, encoding="utf-8") as fh:
        patch = repair_mod.parse_patch(fh)
    if args.stats_only:
        stats = repair_mod.patch_stats(patch)
        if args.out_format == "json":
            payload = {
                "counts": {k.value: n for k, n in stats.counts.items()},
                "total": stats.applied,
            }
            _emit(reporting.dumps(payload), args.output)
        else:
            _emit(_stats_text(stats), args.output)
        return 0
    corpus, stats = repair_mod.apply_patch(
        corpus, patch, encoding=encoding,
        on_error="skip" if args.lenient else "raise",
    )
    if args.output is None:
        sys.stdout.buffer.write(conll_io.serialize_corpus(corpus))
    else:
        conll_io.write_file(args.output, corpus)
    print(_stats_text(stats), end="", file=sys.stderr)
    return 0


def _stats_text(stats) -> str:
    lines = [
        f"{kind.value}: {stats.count(kind)}"
        for kind in repair_mod.RepairKind
        if stats.count(kind)
    ]
    lines.append(f"applied: {stats.applied}  skipped: {len(stats.skipped)}")
    for op, reason in stats.skipped:
        lines.append(f"  skipped {op.kind.value} at doc {op.doc_index}: {reason}")
    return "\n".join(lines) + "\n"


def cmd_detect(args) -> int:
    corpus, _, _ = _load(args.corpus, args.encoding, args.ner_column)
    metadata = _load_metadata(args.metadata)
    if args.kind == "boundary":
        lo, hi = (int(x) for x in args.window.split(":"))
        candidates = repair_mod.detect_headline_boundary_candidates(
            corpus, metadata, window=(lo, hi)
        )
    else:
        candidates = repair_mod.detect_hyphen_candidates(corpus)
    if args.out_format == "json":
        payload = [
            {
                "doc_index": c.doc_index,
                "sentence_index": c.sentence_index,
                "token_index": c.token_index,
                "reason": c.reason,
            }
            for c in candidates
        ]
        _emit(reporting.dumps(payload), args.output)
    else:
        lines = [f"candidates: {len(candidates)}"]
        lines.extend(
            f"  doc {c.doc_index} sent {c.sentence_index}"
            + (f" tok {c.token_index}" if c.token_index is not None else "")
            + f": {c.reason}"
            for c in candidates
        )
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_apply_decisions(args) -> int:
    corpus, _, encoding = _load(args.corpus, args.encoding, args.ner_column)
    with open(args.disagreements, encoding="utf-8") as fh:
        records = diffing.records_from_dicts(diffing.read_disagreement_file(fh))
    with open(args.decisions, encoding="utf-8") as fh:
        decisions = [
            diffing.Decision.from_json(line) for line in fh if line.strip()
        ]
    result = diffing.apply_decisions(corpus, decisions, records, encoding=encoding)
    if args.output is None:
        sys.stdout.buffer.write(conll_io.serialize_corpus(result))
    else:
        conll_io.write_file(args.output, result)
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    metadata = _load_metadata(args.metadata) if args.metadata else None
    serve(
        args.disagreements,
        args.log,
        port=args.port,
        host=args.host,
        static_dir=args.static_dir,
        metadata=metadata,
    )
    return 0


def cmd_stats(args) -> int:
    corpus, _, _ = _load(args.corpus, args.encoding, args.ner_column)
    metadata = _load_metadata(args.metadata)
    report = scoring.census(corpus, metadata)
    if args.out_format == "json":
        _emit(reporting.dumps(reporting.census_to_dict(report)), args.output)
    else:
        _emit(reporting.render_census_text(report, color=_color(args)), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conllkit",
        description="Audit, score, diff, repair, and adjudicate CoNLL-03 NER corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse report and label-transition violations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--strict", action="store_true", help="exit 1 when violations exist")
    p.add_argument("--repair", choices=("conlleval",), default=None,
                   help="write a repaired BIO corpus instead of a report")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="span precision/recall/F1, optionally stratified")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--metadata", default=None, help="TSV sidecar for stratified scores")
    p.add_argument("--repair", choices=("conlleval",), default=None,
                   help="repair invalid sequences before scoring")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("errors", help="error taxonomy and most-frequent FP/FN counts")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--metadata", default=None)
    p.add_argument("--group-by", choices=("category", "domain", "format"),
                   default="category")
    p.add_argument("--domain", choices=[d.token for d in Domain if d is not Domain.UNKNOWN],
                   default=None, help="restrict counts to one domain")
    p.add_argument("--doc-format",
                   choices=[f.token for f in DocFormat if f is not DocFormat.UNKNOWN],
                   default=None, help="restrict counts to one format")
    p.add_argument("--repair", choices=("conlleval",), default=None)
    _add_encoding(p)
    _add_common(p, fmt_choices=("text", "json", "tsv"))
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("recall-split", help="seen/unseen recall against a training set")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--ignore-case", action="store_true")
    p.add_argument("--match-type", action="store_true",
                   help="seen requires surface AND type to match")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_recall_split)

    p = sub.add_parser("diff", help="token-label differences between two versions")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--names", default=None, help="comma-separated version names")
    p.add_argument("--raw-labels", action="store_true",
                   help="compare labels verbatim instead of BIO-normalized")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("agree", help="n-way agreement partition across versions")
    p.add_argument("corpora", nargs="+")
    p.add_argument("--names", default=None)
    p.add_argument("--raw-labels", action="store_true")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("export-disagreements",
                       help="write the adjudication queue as JSON lines")
    p.add_argument("corpora", nargs="+")
    p.add_argument("--names", default=None)
    p.add_argument("--window", type=int, default=3, help="context tokens per side")
    p.add_argument("--raw-labels", action="store_true")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_export_disagreements)

    p = sub.add_parser("repair", help="apply a JSON-lines patch of repair ops")
    p.add_argument("--corpus", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--stats", dest="stats_only", action="store_true",
                   help="report per-kind op counts without applying")
    p.add_argument("--lenient", action="store_true",
                   help="skip bad ops instead of rejecting the whole patch")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("detect", help="flag boundary/hyphen repair candidates")
    p.add_argument("--corpus", required=True)
    p.add_argument("--metadata", default=None)
    p.add_argument("--kind", choices=("boundary", "hyphen"), required=True)
    p.add_argument("--window", default="16:20",
                   help="headline char window LO:HI (boundary detector)")
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("apply-decisions",
                       help="apply adjudication decisions to the pivot corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--disagreements", required=True)
    p.add_argument("--decisions", required=True)
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_apply_decisions)

    p = sub.add_parser("serve", help="run the adjudication HTTP service")
    p.add_argument("--disagreements", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static-dir", default=None, help="serve a built UI bundle")
    p.add_argument("--metadata", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("stats", help="document/domain/format census")
    p.add_argument("--corpus", required=True)
    p.add_argument("--metadata", default=None)
    _add_encoding(p)
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConllkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # invariant breach; anything here is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
