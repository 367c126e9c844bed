"""Classify gold/prediction mismatches into the four-way MUC-style schema.

Categories: Missed (full false negative), Spurious (full false positive),
Boundary Error (detected with imperfect overlap), Type Error (perfect
boundaries, wrong type). A paired overlap with both wrong boundaries and
wrong type counts as a Boundary Error.

Pairing of non-exact mentions is greedy by maximal token overlap within one
sentence, with deterministic tie-breaks (earlier gold start, then longer
prediction). The result is a partition: every gold mention is exactly one of
{exact match, Missed, gold side of one pair}; symmetrically for predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    Corpus,
    DocFormat,
    DocMetadata,
    Domain,
    EncodingScheme,
    Mention,
    corpus_mentions,
)
from .scoring import check_tokenization


class ErrorCategory(Enum):
    MISSED = "Missed"
    SPURIOUS = "Spurious"
    BOUNDARY = "Boundary Error"
    TYPE = "Type Error"

    @property
    def display(self) -> str:
        return self.value


CATEGORY_ORDER = (
    ErrorCategory.MISSED,
    ErrorCategory.SPURIOUS,
    ErrorCategory.BOUNDARY,
    ErrorCategory.TYPE,
)


@dataclass(frozen=True)
class ErrorRecord:
    category: ErrorCategory
    doc_index: int
    sentence_index: int
    gold: Mention | None = None
    pred: Mention | None = None
    confusion: tuple[str, str] | None = None  # (gold type, pred type); Type Error only

    def __post_init__(self):
        if self.category is ErrorCategory.MISSED:
            assert self.gold is not None and self.pred is None
        elif self.category is ErrorCategory.SPURIOUS:
            assert self.pred is not None and self.gold is None
        else:
            assert self.gold is not None and self.pred is not None
        assert (self.confusion is not None) == (self.category is ErrorCategory.TYPE)


@dataclass(frozen=True)
class ErrorCountRow:
    """One aggregated Table-style row: count, FP/FN polarity, type, surface."""

    count: int
    polarity: str  # "FP" or "FN"
    entity_type: str
    surface: str


def _sentence_key(m: Mention) -> tuple[int, int]:
    return (m.doc_index, m.sentence_index)


def _exact_key(m: Mention) -> tuple[int, int, int, int, str]:
    return (m.doc_index, m.sentence_index, m.start_token, m.end_token, m.entity_type)


def classify_errors(
    gold: Corpus,
    pred: Corpus,
    *,
    gold_encoding: EncodingScheme = EncodingScheme.BIO,
    pred_encoding: EncodingScheme = EncodingScheme.BIO,
) -> list[ErrorRecord]:
    """Classify every non-exact mention into the four-way schema."""
    check_tokenization(gold, pred)
    gold_ms = corpus_mentions(gold, gold_encoding)
    pred_ms = corpus_mentions(pred, pred_encoding)

    pred_exact = {_exact_key(m) for m in pred_ms}
    gold_exact = {_exact_key(m) for m in gold_ms}
    gold_rest = [m for m in gold_ms if _exact_key(m) not in pred_exact]
    pred_rest = [m for m in pred_ms if _exact_key(m) not in gold_exact]

    by_sentence: dict[tuple[int, int], tuple[list[Mention], list[Mention]]] = {}
    for m in gold_rest:
        by_sentence.setdefault(_sentence_key(m), ([], []))[0].append(m)
    for m in pred_rest:
        by_sentence.setdefault(_sentence_key(m), ([], []))[1].append(m)

    records: list[ErrorRecord] = []
    for (d_idx, s_idx) in sorted(by_sentence):
        g_list, p_list = by_sentence[(d_idx, s_idx)]
        candidates = []
        for g in g_list:
            for p in p_list:
                ov = g.overlap(p)
                if ov > 0:
                    candidates.append((ov, g, p))
        candidates.sort(
            key=lambda c: (
                -c[0],  # maximal overlap first
                c[1].start_token,  # then earliest gold start
                -(c[2].end_token - c[2].start_token),  # then longest pred
                c[2].start_token,
                c[1].end_token,
            )
        )
        used_g: set[tuple] = set()
        used_p: set[tuple] = set()
        pairs: list[tuple[Mention, Mention]] = []
        for _, g, p in candidates:
            gk, pk = _exact_key(g), _exact_key(p)
            if gk in used_g or pk in used_p:
                continue
            used_g.add(gk)
            used_p.add(pk)
            pairs.append((g, p))

        sentence_records: list[ErrorRecord] = []
        for g, p in pairs:
            if g.span == p.span:
                sentence_records.append(
                    ErrorRecord(
                        ErrorCategory.TYPE, d_idx, s_idx, gold=g, pred=p,
                        confusion=(g.entity_type, p.entity_type),
                    )
                )
            else:
                sentence_records.append(
                    ErrorRecord(ErrorCategory.BOUNDARY, d_idx, s_idx, gold=g, pred=p)
                )
        for g in g_list:
            if _exact_key(g) not in used_g:
                sentence_records.append(
                    ErrorRecord(ErrorCategory.MISSED, d_idx, s_idx, gold=g)
                )
        for p in p_list:
            if _exact_key(p) not in used_p:
                sentence_records.append(
                    ErrorRecord(ErrorCategory.SPURIOUS, d_idx, s_idx, pred=p)
                )
        sentence_records.sort(key=_record_order)
        records.extend(sentence_records)
    return records


def _record_order(rec: ErrorRecord):
    anchor = rec.gold if rec.gold is not None else rec.pred
    return (anchor.start_token, anchor.end_token, rec.category.value)


def error_summary(
    records: list[ErrorRecord],
    group_by: str = "category",
    metadata: dict[int, DocMetadata] | None = None,
) -> dict[str, dict[str, int]]:
    """Counts per group value and category.

    ``group_by`` is one of ``category`` (single "All" group), ``domain``, or
    ``format`` (both need sidecar metadata; unannotated documents count under
    Unknown). Every category appears in every group, zero-filled.
    """
    if group_by not in ("category", "domain", "format"):
        raise ValueError(f"group_by must be category/domain/format, got {group_by!r}")

    def group_of(rec: ErrorRecord) -> str:
        if group_by == "category":
            return "All"
        meta = (metadata or {}).get(rec.doc_index, DocMetadata())
        return meta.domain.display if group_by == "domain" else meta.doc_format.display

    table: dict[str, dict[str, int]] = {}
    order = (
        [d.display for d in (Domain.SPORTS, Domain.ECONOMY, Domain.WORLD_EVENTS)]
        if group_by == "domain"
        else [f.display for f in (DocFormat.TEXT_ARTICLE, DocFormat.DATA_REPORT, DocFormat.HYBRID)]
        if group_by == "format"
        else ["All"]
    )
    for g in order:
        table[g] = {c.display: 0 for c in CATEGORY_ORDER}
    for rec in records:
        g = group_of(rec)
        if g not in table:
            table[g] = {c.display: 0 for c in CATEGORY_ORDER}
        table[g][rec.category.display] += 1
    # canonical columns first; extras (Unknown) follow in sorted order
    ordered = {g: table[g] for g in order}
    for g in sorted(table):
        ordered.setdefault(g, table[g])
    return ordered


def count_mention_errors(
    gold: Corpus,
    pred: Corpus,
    *,
    metadata: dict[int, DocMetadata] | None = None,
    domain: Domain | None = None,
    doc_format: DocFormat | None = None,
    gold_encoding: EncodingScheme = EncodingScheme.BIO,
    pred_encoding: EncodingScheme = EncodingScheme.BIO,
) -> list[ErrorCountRow]:
    """Most-frequent mention errors: FN rows from non-matched gold mentions,
    FP rows from non-matched predictions, keyed by (type, surface).

    Rows sort by descending count, FP before FN, then surface, then type.
    An optional domain/format filter restricts to matching documents.
    """
    check_tokenization(gold, pred)

    def included(doc_index: int) -> bool:
        meta = (metadata or {}).get(doc_index, DocMetadata())
        if domain is not None and meta.domain is not domain:
            return False
        if doc_format is not None and meta.doc_format is not doc_format:
            return False
        return True

    gold_ms = [m for m in corpus_mentions(gold, gold_encoding) if included(m.doc_index)]
    pred_ms = [m for m in corpus_mentions(pred, pred_encoding) if included(m.doc_index)]
    gold_exact = {_exact_key(m) for m in gold_ms}
    pred_exact = {_exact_key(m) for m in pred_ms}

    tallies: dict[tuple[str, str, str], int] = {}
    for m in gold_ms:
        if _exact_key(m) not in pred_exact:
            key = ("FN", m.entity_type, m.surface)
            tallies[key] = tallies.get(key, 0) + 1
    for m in pred_ms:
        if _exact_key(m) not in gold_exact:
            key = ("FP", m.entity_type, m.surface)
            tallies[key] = tallies.get(key, 0) + 1

    rows = [
        ErrorCountRow(count, polarity, etype, surface)
        for (polarity, etype, surface), count in tallies.items()
    ]
    rows.sort(key=lambda r: (-r.count, 0 if r.polarity == "FP" else 1, r.surface, r.entity_type))
    return rows
