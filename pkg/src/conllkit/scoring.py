"""Span-level precision/recall/F1 between a gold corpus and predictions.

Scoring is exact-match (boundaries and type must both agree) and
micro-averaged, the CoNLL shared-task convention. All arithmetic is on
integer counts and exact rationals; rounding to two-decimal percentages
happens only at presentation time (see :mod:`conllkit.reporting`).

Undefined ratios (zero denominators) are kept as ``None`` internally and
rendered as 0.00 plus an ``undefined`` flag, so tabular output stays
parseable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .conll_io import validate_transitions
from .errors import EncodingInvalid, TokenizationMismatch
from .model import (
    Corpus,
    DocFormat,
    DocMetadata,
    Domain,
    EncodingScheme,
    Mention,
    corpus_mentions,
)

ALL_DOMAINS = "All Domains"
ALL_FORMATS = "All Formats"


def _ratio(num: int, den: int) -> Fraction | None:
    if den == 0:
        return None
    return Fraction(num, den)


@dataclass(frozen=True)
class ScoreReport:
    """TP/FP/FN counts with derived P/R/F1, optionally for one stratum."""

    tp: int
    fp: int
    fn: int
    per_type: dict[str, "ScoreReport"] = field(default_factory=dict)
    stratum: tuple[str, str] | None = None  # (domain display, format display)

    @property
    def precision(self) -> Fraction | None:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> Fraction | None:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> Fraction:
        p = self.precision or Fraction(0)
        r = self.recall or Fraction(0)
        if p + r == 0:
            return Fraction(0)
        return 2 * p * r / (p + r)

    @property
    def gold_count(self) -> int:
        return self.tp + self.fn

    @property
    def pred_count(self) -> int:
        return self.tp + self.fp


@dataclass(frozen=True)
class SeenSplit:
    """Recall split by whether the gold surface occurred in training gold."""

    seen_tp: int
    seen_gold_count: int
    unseen_tp: int
    unseen_gold_count: int

    @property
    def seen_recall(self) -> Fraction | None:
        return _ratio(self.seen_tp, self.seen_gold_count)

    @property
    def unseen_recall(self) -> Fraction | None:
        return _ratio(self.unseen_tp, self.unseen_gold_count)


def check_tokenization(gold: Corpus, pred: Corpus) -> None:
    """Raise TokenizationMismatch at the first position where surfaces differ."""
    if len(gold) != len(pred):
        raise TokenizationMismatch(
            f"document counts differ: gold {len(gold)}, pred {len(pred)}"
        )
    for g_doc, p_doc in zip(gold.documents, pred.documents):
        d = g_doc.doc_index
        if len(g_doc.sentences) != len(p_doc.sentences):
            raise TokenizationMismatch(
                f"doc {d}: sentence counts differ "
                f"(gold {len(g_doc.sentences)}, pred {len(p_doc.sentences)})",
                doc_index=d,
            )
        for s, (g_sent, p_sent) in enumerate(zip(g_doc.sentences, p_doc.sentences)):
            if len(g_sent) != len(p_sent):
                raise TokenizationMismatch(
                    f"doc {d} sentence {s}: token counts differ "
                    f"(gold {len(g_sent)}, pred {len(p_sent)})",
                    doc_index=d,
                    sentence_index=s,
                )
            for t, (g_tok, p_tok) in enumerate(zip(g_sent.tokens, p_sent.tokens)):
                if g_tok.surface != p_tok.surface:
                    raise TokenizationMismatch(
                        f"doc {d} sentence {s} token {t}: surfaces differ "
                        f"(gold {g_tok.surface!r}, pred {p_tok.surface!r})",
                        doc_index=d,
                        sentence_index=s,
                        token_index=t,
                    )


def _require_valid(corpus: Corpus, encoding: EncodingScheme, which: str) -> None:
    violations = validate_transitions(corpus, encoding)
    if violations:
        raise EncodingInvalid(which, violations)


def mention_keys(mentions: list[Mention]) -> set[tuple[int, int, int, int, str]]:
    return {
        (m.doc_index, m.sentence_index, m.start_token, m.end_token, m.entity_type)
        for m in mentions
    }


def _count(gold_keys: set, pred_keys: set, stratum=None) -> ScoreReport:
    tp_keys = gold_keys & pred_keys
    per_type: dict[str, ScoreReport] = {}
    for etype in sorted({k[4] for k in gold_keys | pred_keys}):
        g = {k for k in gold_keys if k[4] == etype}
        p = {k for k in pred_keys if k[4] == etype}
        per_type[etype] = ScoreReport(len(g & p), len(p - g), len(g - p))
    return ScoreReport(
        tp=len(tp_keys),
        fp=len(pred_keys - gold_keys),
        fn=len(gold_keys - pred_keys),
        per_type=per_type,
        stratum=stratum,
    )


def score(
    gold: Corpus,
    pred: Corpus,
    *,
    gold_encoding: EncodingScheme = EncodingScheme.BIO,
    pred_encoding: EncodingScheme = EncodingScheme.BIO,
) -> ScoreReport:
    """Micro-averaged exact-match span scores with a per-type breakdown."""
    check_tokenization(gold, pred)
    _require_valid(gold, gold_encoding, "gold")
    _require_valid(pred, pred_encoding, "pred")
    gold_keys = mention_keys(corpus_mentions(gold, gold_encoding))
    pred_keys = mention_keys(corpus_mentions(pred, pred_encoding))
    return _count(gold_keys, pred_keys)


def score_stratified(
    gold: Corpus,
    pred: Corpus,
    metadata: dict[int, DocMetadata],
    *,
    gold_encoding: EncodingScheme = EncodingScheme.BIO,
    pred_encoding: EncodingScheme = EncodingScheme.BIO,
) -> list[ScoreReport]:
    """One report per non-empty (domain, format) cell, plus marginals and global.

    Documents without a sidecar entry land in the Unknown strata; nothing is
    dropped, so the per-cell counts always sum to the global counts.
    """
    check_tokenization(gold, pred)
    _require_valid(gold, gold_encoding, "gold")
    _require_valid(pred, pred_encoding, "pred")
    gold_keys = mention_keys(corpus_mentions(gold, gold_encoding))
    pred_keys = mention_keys(corpus_mentions(pred, pred_encoding))

    def meta(doc_index: int) -> DocMetadata:
        return metadata.get(doc_index, DocMetadata())

    cells: dict[tuple[Domain, DocFormat], tuple[set, set]] = {}
    for doc in gold.documents:
        key = (meta(doc.doc_index).domain, meta(doc.doc_index).doc_format)
        cells.setdefault(key, (set(), set()))
    for k in gold_keys:
        m = meta(k[0])
        cells[(m.domain, m.doc_format)][0].add(k)
    for k in pred_keys:
        m = meta(k[0])
        cells.setdefault((m.domain, m.doc_format), (set(), set()))[1].add(k)

    domain_order = [Domain.SPORTS, Domain.WORLD_EVENTS, Domain.ECONOMY, Domain.UNKNOWN]
    format_order = [
        DocFormat.TEXT_ARTICLE,
        DocFormat.DATA_REPORT,
        DocFormat.HYBRID,
        DocFormat.UNKNOWN,
    ]

    reports: list[ScoreReport] = []
    for dom in domain_order:
        for fmt in format_order:
            if (dom, fmt) in cells:
                g, p = cells[(dom, fmt)]
                reports.append(_count(g, p, stratum=(dom.display, fmt.display)))
    for dom in domain_order:
        keys = [c for c in cells if c[0] is dom]
        if keys:
            g = set().union(*(cells[c][0] for c in keys))
            p = set().union(*(cells[c][1] for c in keys))
            reports.append(_count(g, p, stratum=(dom.display, ALL_FORMATS)))
    for fmt in format_order:
        keys = [c for c in cells if c[1] is fmt]
        if keys:
            g = set().union(*(cells[c][0] for c in keys))
            p = set().union(*(cells[c][1] for c in keys))
            reports.append(_count(g, p, stratum=(ALL_DOMAINS, fmt.display)))
    reports.append(_count(gold_keys, pred_keys, stratum=(ALL_DOMAINS, ALL_FORMATS)))
    return reports


def seen_unseen_recall(
    gold_test: Corpus,
    pred_test: Corpus,
    gold_train: Corpus,
    *,
    case_sensitive: bool = True,
    match_type: bool = False,
    test_gold_encoding: EncodingScheme = EncodingScheme.BIO,
    test_pred_encoding: EncodingScheme = EncodingScheme.BIO,
    train_encoding: EncodingScheme = EncodingScheme.BIO,
) -> SeenSplit:
    """Recall over gold test mentions split into seen/unseen partitions.

    A test mention is seen iff its exact surface occurs as the surface of any
    gold training mention. The default match is case-sensitive and ignores the
    entity type; both behaviors are switchable.
    """
    check_tokenization(gold_test, pred_test)
    _require_valid(gold_test, test_gold_encoding, "gold")
    _require_valid(pred_test, test_pred_encoding, "pred")

    def norm(surface: str) -> str:
        return surface if case_sensitive else surface.lower()

    train_seen: set = set()
    for m in corpus_mentions(gold_train, train_encoding):
        train_seen.add((norm(m.surface), m.entity_type) if match_type else norm(m.surface))

    pred_keys = mention_keys(corpus_mentions(pred_test, test_pred_encoding))
    seen_tp = seen_total = unseen_tp = unseen_total = 0
    for m in corpus_mentions(gold_test, test_gold_encoding):
        probe = (norm(m.surface), m.entity_type) if match_type else norm(m.surface)
        key = (m.doc_index, m.sentence_index, m.start_token, m.end_token, m.entity_type)
        hit = key in pred_keys
        if probe in train_seen:
            seen_total += 1
            seen_tp += hit
        else:
            unseen_total += 1
            unseen_tp += hit
    return SeenSplit(seen_tp, seen_total, unseen_tp, unseen_total)


@dataclass(frozen=True)
class CensusReport:
    """Document counts per (domain, format) cell plus corpus totals."""

    documents: int
    sentences: int
    tokens: int
    by_cell: dict[tuple[Domain, DocFormat], int]

    def domain_total(self, domain: Domain) -> int:
        return sum(n for (d, _), n in self.by_cell.items() if d is domain)

    def format_total(self, doc_format: DocFormat) -> int:
        return sum(n for (_, f), n in self.by_cell.items() if f is doc_format)


def census(corpus: Corpus, metadata: dict[int, DocMetadata]) -> CensusReport:
    by_cell: dict[tuple[Domain, DocFormat], int] = {}
    for doc in corpus.documents:
        meta = metadata.get(doc.doc_index, DocMetadata())
        key = (meta.domain, meta.doc_format)
        by_cell[key] = by_cell.get(key, 0) + 1
    return CensusReport(
        documents=len(corpus),
        sentences=corpus.sentence_count,
        tokens=corpus.token_count,
        by_cell=by_cell,
    )
