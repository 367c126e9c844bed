"""Presentation-layer rendering: aligned text tables, JSON, and TSV.

Rounding policy lives here and only here: scores are exact rationals until
they are formatted, and percentage formatting is half-up to two decimals.
"""

from __future__ import annotations

import json
import os
import sys
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .model import DocFormat, Domain
from .scoring import ALL_DOMAINS, ALL_FORMATS, CensusReport, ScoreReport, SeenSplit
from .taxonomy import ErrorCountRow


def pct(value: Fraction | None) -> str:
    """Format a ratio as a percentage with 2 decimals, half-up; None -> 0.00."""
    if value is None:
        return "0.00"
    as_decimal = Decimal(value.numerator * 100) / Decimal(value.denominator)
    return str(as_decimal.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def pct_float(value: Fraction | None) -> float:
    return float(pct(value))


def use_color(stream=None) -> bool:
    if os.environ.get("NO_COLOR"):
        return False
    stream = stream or sys.stdout
    return hasattr(stream, "isatty") and stream.isatty()


def _bold(text: str, color: bool) -> str:
    return f"\x1b[1m{text}\x1b[0m" if color else text


def render_table(
    headers: list[str], rows: list[list[str]], *, color: bool = False
) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    header_cells = [h.ljust(w) if i == 0 else h.rjust(w) for i, (h, w) in enumerate(zip(headers, widths))]
    lines.append(_bold("  ".join(header_cells).rstrip(), color))
    for row in rows:
        cells = [c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def score_to_dict(report: ScoreReport) -> dict:
    undefined = []
    if report.precision is None:
        undefined.append("precision")
    if report.recall is None:
        undefined.append("recall")
    out = {
        "precision": pct_float(report.precision),
        "recall": pct_float(report.recall),
        "f1": pct_float(report.f1),
        "tp": report.tp,
        "fp": report.fp,
        "fn": report.fn,
        "stratum": list(report.stratum) if report.stratum else None,
    }
    if undefined:
        out["undefined"] = undefined
    if report.per_type:
        out["per_type"] = {
            etype: score_to_dict(sub) for etype, sub in report.per_type.items()
        }
    return out


def render_score_text(report: ScoreReport, *, color: bool = False) -> str:
    headers = ["", "Precision", "Recall", "F1", "TP", "FP", "FN"]
    rows = [
        [
            "overall",
            pct(report.precision),
            pct(report.recall),
            pct(report.f1),
            str(report.tp),
            str(report.fp),
            str(report.fn),
        ]
    ]
    for etype, sub in report.per_type.items():
        rows.append(
            [etype, pct(sub.precision), pct(sub.recall), pct(sub.f1),
             str(sub.tp), str(sub.fp), str(sub.fn)]
        )
    return render_table(headers, rows, color=color)


def render_stratified_text(reports: list[ScoreReport], *, color: bool = False) -> str:
    """Grid of F1 per (format row, domain column); '-' marks empty cells."""
    by_stratum = {r.stratum: r for r in reports}
    domains = [Domain.SPORTS.display, Domain.WORLD_EVENTS.display, Domain.ECONOMY.display]
    formats = [DocFormat.TEXT_ARTICLE.display, DocFormat.DATA_REPORT.display, DocFormat.HYBRID.display]
    if any(s and s[0] == Domain.UNKNOWN.display for s in by_stratum):
        domains.append(Domain.UNKNOWN.display)
    if any(s and s[1] == DocFormat.UNKNOWN.display for s in by_stratum):
        formats.append(DocFormat.UNKNOWN.display)
    domains.append(ALL_DOMAINS)
    formats.append(ALL_FORMATS)

    headers = ["F1"] + domains
    rows = []
    for fmt in formats:
        row = [fmt]
        for dom in domains:
            rep = by_stratum.get((dom, fmt))
            row.append(pct(rep.f1) if rep is not None else "-")
        rows.append(row)
    return render_table(headers, rows, color=color)


def render_seen_split_text(split: SeenSplit, *, color: bool = False) -> str:
    headers = ["", "Recall", "Gold", "Correct"]
    rows = [
        ["seen", pct(split.seen_recall), str(split.seen_gold_count), str(split.seen_tp)],
        ["unseen", pct(split.unseen_recall), str(split.unseen_gold_count), str(split.unseen_tp)],
    ]
    return render_table(headers, rows, color=color)


def seen_split_to_dict(split: SeenSplit) -> dict:
    return {
        "seen_recall": pct_float(split.seen_recall),
        "unseen_recall": pct_float(split.unseen_recall),
        "seen_gold_count": split.seen_gold_count,
        "unseen_gold_count": split.unseen_gold_count,
    }


def render_error_counts_tsv(rows: list[ErrorCountRow]) -> str:
    lines = ["count\tpolarity\ttype\tsurface"]
    for row in rows:
        lines.append(f"{row.count}\t{row.polarity}\t{row.entity_type}\t{row.surface}")
    return "\n".join(lines) + "\n"


def render_error_counts_text(rows: list[ErrorCountRow], *, color: bool = False) -> str:
    headers = ["Count", "Error", "Type", "Text"]
    body = [[str(r.count), r.polarity, r.entity_type, r.surface] for r in rows]
    return render_table(headers, body, color=color)


def render_summary_text(table: dict[str, dict[str, int]], *, color: bool = False) -> str:
    groups = list(table)
    categories = list(next(iter(table.values()))) if table else []
    headers = [""] + groups
    rows = [[cat] + [str(table[g][cat]) for g in groups] for cat in categories]
    return render_table(headers, rows, color=color)


def render_census_text(report: CensusReport, *, color: bool = False) -> str:
    domains = [Domain.WORLD_EVENTS, Domain.ECONOMY, Domain.SPORTS]
    formats = [DocFormat.TEXT_ARTICLE, DocFormat.DATA_REPORT, DocFormat.HYBRID]
    if any(d is Domain.UNKNOWN for d, _ in report.by_cell):
        domains.append(Domain.UNKNOWN)
    if any(f is DocFormat.UNKNOWN for _, f in report.by_cell):
        formats.append(DocFormat.UNKNOWN)
    headers = ["Format"] + [d.display for d in domains] + ["Total"]
    rows = []
    for fmt in formats:
        row = [fmt.display]
        for dom in domains:
            row.append(str(report.by_cell.get((dom, fmt), 0)))
        row.append(str(report.format_total(fmt)))
        rows.append(row)
    totals = ["Total"] + [str(report.domain_total(d)) for d in domains]
    totals.append(str(report.documents))
    rows.append(totals)
    grid = render_table(headers, rows, color=color)
    tail = (
        f"documents: {report.documents}  sentences: {report.sentences}  "
        f"tokens: {report.tokens}\n"
    )
    return grid + tail


def census_to_dict(report: CensusReport) -> dict:
    return {
        "documents": report.documents,
        "sentences": report.sentences,
        "tokens": report.tokens,
        "cells": [
            {"domain": d.token, "format": f.token, "documents": n}
            for (d, f), n in sorted(
                report.by_cell.items(), key=lambda kv: (kv[0][0].token, kv[0][1].token)
            )
        ],
        "by_domain": {
            d.token: report.domain_total(d)
            for d in Domain
            if report.domain_total(d) > 0
        },
        "by_format": {
            f.token: report.format_total(f)
            for f in DocFormat
            if report.format_total(f) > 0
        },
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
