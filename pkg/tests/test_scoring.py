"""Span scoring against an independent brute-force oracle, plus strata."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conllkit.errors import EncodingInvalid, TokenizationMismatch
from conllkit.model import (
    Corpus,
    DocFormat,
    DocMetadata,
    Domain,
    EncodingScheme,
    corpus_mentions,
)
from conllkit.reporting import pct
from conllkit.scoring import (
    ALL_DOMAINS,
    ALL_FORMATS,
    census,
    score,
    score_stratified,
    seen_unseen_recall,
)

from conftest import (
    TYPES,
    corpus,
    one_sentence_corpus,
    paired_corpora,
    random_pair,
    sent,
    sent_from_labels,
)


def oracle_spans(labels: list[str]) -> set[tuple[int, int, str]]:
    """Enumerate all candidate spans and keep the ones the BIO tags encode.

    Deliberately a different algorithm from the extractor: it tests every
    (start, end, type) triple against the tag pattern instead of walking the
    sequence once.
    """
    n = len(labels)
    found = set()
    types = {l[2:] for l in labels if l != "O"}
    for start in range(n):
        for end in range(start + 1, n + 1):
            for t in types:
                starts = labels[start] == f"B-{t}"
                continues = all(labels[i] == f"I-{t}" for i in range(start + 1, end))
                maximal = end == n or labels[end] != f"I-{t}"
                if starts and continues and maximal:
                    found.add((start, end, t))
    return found


def oracle_counts(gold_sentences: list[list[str]], pred_sentences: list[list[str]]):
    """Per-type TP/FP/FN from materialized per-sentence mention sets."""
    tp = fp = fn = 0
    per_type: dict[str, list[int]] = {}
    for g_labels, p_labels in zip(gold_sentences, pred_sentences):
        g_set = oracle_spans(g_labels)
        p_set = oracle_spans(p_labels)
        tp += len(g_set & p_set)
        fp += len(p_set - g_set)
        fn += len(g_set - p_set)
        for t in {k[2] for k in g_set | p_set}:
            g_t = {k for k in g_set if k[2] == t}
            p_t = {k for k in p_set if k[2] == t}
            row = per_type.setdefault(t, [0, 0, 0])
            row[0] += len(g_t & p_t)
            row[1] += len(p_t - g_t)
            row[2] += len(g_t - p_t)
    return tp, fp, fn, per_type


class TestScore:
    def test_identity(self):
        c = one_sentence_corpus(["B-ORG", "I-ORG", "O", "B-PER"])
        report = score(c, c)
        assert (report.tp, report.fp, report.fn) == (2, 0, 0)
        assert pct(report.precision) == "100.00"
        assert pct(report.recall) == "100.00"
        assert pct(report.f1) == "100.00"

    def test_empty_prediction(self):
        gold = one_sentence_corpus(["B-ORG", "O"])
        pred = one_sentence_corpus(["O", "O"])
        report = score(gold, pred)
        assert report.recall == 0
        assert report.precision is None  # undefined, rendered as 0.00
        assert pct(report.precision) == "0.00"
        assert report.f1 == 0

    def test_three_of_four_plus_spurious(self):
        gold_labels = ["B-ORG", "I-ORG", "O", "B-PER", "O", "B-LOC", "O", "B-LOC", "O", "O", "O"]
        pred_labels = ["B-ORG", "I-ORG", "O", "B-PER", "O", "B-LOC", "O", "O", "O", "B-MISC", "O"]
        report = score(one_sentence_corpus(gold_labels), one_sentence_corpus(pred_labels))
        assert (report.tp, report.fp, report.fn) == (3, 1, 1)
        assert pct(report.precision) == pct(report.recall) == pct(report.f1) == "75.00"

    def test_tokenization_mismatch(self):
        gold = corpus([sent(("a", "O"), ("b", "O"))])
        pred = corpus([sent(("a", "O"), ("c", "O"))])
        with pytest.raises(TokenizationMismatch) as exc:
            score(gold, pred)
        assert exc.value.token_index == 1

    def test_invalid_pred_raises(self):
        gold = one_sentence_corpus(["O", "O"])
        pred = one_sentence_corpus(["O", "I-PER"])
        with pytest.raises(EncodingInvalid):
            score(gold, pred)

    def test_iob1_gold_scored_directly(self):
        gold = one_sentence_corpus(["I-ORG", "I-ORG", "B-ORG"])
        pred = one_sentence_corpus(["B-ORG", "I-ORG", "B-ORG"])
        report = score(gold, pred, gold_encoding=EncodingScheme.IOB1)
        assert (report.tp, report.fp, report.fn) == (2, 0, 0)

    def test_type_breakdown_sums_to_micro(self, rng):
        gold, pred = paired_corpora(rng, 200)
        report = score(gold, pred)
        assert sum(r.tp for r in report.per_type.values()) == report.tp
        assert sum(r.fp for r in report.per_type.values()) == report.fp
        assert sum(r.fn for r in report.per_type.values()) == report.fn

    def test_counts_tie_to_mention_totals(self, rng):
        gold, pred = paired_corpora(rng, 150)
        report = score(gold, pred)
        assert report.tp + report.fn == len(corpus_mentions(gold, EncodingScheme.BIO))
        assert report.tp + report.fp == len(corpus_mentions(pred, EncodingScheme.BIO))

    def test_oracle_equivalence_thousand_pairs(self, rng):
        gold_sents, pred_sents = [], []
        for _ in range(1000):
            g, p = random_pair(rng)
            gold_sents.append(g)
            pred_sents.append(p)
        gold = corpus(*[[sent_from_labels(l) for l in gold_sents[i:i + 10]]
                        for i in range(0, 1000, 10)])
        pred = corpus(*[[sent_from_labels(l) for l in pred_sents[i:i + 10]]
                        for i in range(0, 1000, 10)])
        report = score(gold, pred)
        tp, fp, fn, per_type = oracle_counts(gold_sents, pred_sents)
        assert (report.tp, report.fp, report.fn) == (tp, fp, fn)
        assert {t: (r.tp, r.fp, r.fn) for t, r in report.per_type.items()} == {
            t: tuple(v) for t, v in per_type.items()
        }

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_oracle_equivalence_hypothesis(self, data):
        import random as random_mod

        seed = data.draw(st.integers(0, 2**32 - 1))
        rng = random_mod.Random(seed)
        g_labels, p_labels = random_pair(rng)
        report = score(one_sentence_corpus(g_labels), one_sentence_corpus(p_labels))
        g_set, p_set = oracle_spans(g_labels), oracle_spans(p_labels)
        assert report.tp == len(g_set & p_set)
        assert report.fp == len(p_set - g_set)
        assert report.fn == len(g_set - p_set)

    def test_adding_exact_match_never_decreases_tp(self, rng):
        for _ in range(100):
            g_labels, p_labels = random_pair(rng, max_tokens=8)
            gold = one_sentence_corpus(g_labels)
            pred = one_sentence_corpus(p_labels)
            before = score(gold, pred).tp
            # graft one gold mention onto the prediction where it fits cleanly
            g_set = sorted(oracle_spans(g_labels))
            p_set = oracle_spans(p_labels)
            for (s, e, t) in g_set:
                occupied = any(not (e <= ps or pe <= s) for ps, pe, _ in p_set)
                if occupied:
                    continue
                new_p = list(p_labels)
                new_p[s] = f"B-{t}"
                for i in range(s + 1, e):
                    new_p[i] = f"I-{t}"
                # splice must not corrupt a following mention continuation
                if e < len(new_p) and new_p[e].startswith("I-"):
                    continue
                after = score(gold, one_sentence_corpus(new_p)).tp
                assert after >= before + 1
                break


class TestStratified:
    @staticmethod
    def fixture():
        gold = corpus(
            [sent_from_labels(["B-ORG", "O"]), sent_from_labels(["B-PER", "O"])],
            [sent_from_labels(["B-LOC", "O", "O"])],
            [sent_from_labels(["B-MISC", "O"])],
        )
        metadata = {
            0: DocMetadata(Domain.SPORTS, DocFormat.DATA_REPORT),
            1: DocMetadata(Domain.SPORTS, DocFormat.DATA_REPORT),
            2: DocMetadata(Domain.ECONOMY, DocFormat.TEXT_ARTICLE),
        }
        return gold, metadata

    def test_identity_all_cells_100(self):
        gold, metadata = self.fixture()
        reports = score_stratified(gold, gold, metadata)
        for rep in reports:
            assert pct(rep.f1) == "100.00", rep.stratum

    def test_injected_fp_changes_only_economy(self):
        gold, metadata = self.fixture()
        pred = corpus(
            [sent_from_labels(["B-ORG", "O"]), sent_from_labels(["B-PER", "O"])],
            [sent_from_labels(["B-LOC", "O", "O"])],
            [sent_from_labels(["B-MISC", "B-ORG"])],  # spurious in the economy doc
        )
        reports = {r.stratum: r for r in score_stratified(gold, pred, metadata)}
        assert reports[("Sports", "Data Report")].fp == 0
        assert reports[("Economy", "Text Article")].fp == 1
        assert pct(reports[("Economy", "Text Article")].precision) == "50.00"
        assert reports[("Economy", ALL_FORMATS)].fp == 1
        assert reports[(ALL_DOMAINS, "Text Article")].fp == 1
        assert reports[(ALL_DOMAINS, ALL_FORMATS)].fp == 1
        assert reports[("Sports", ALL_FORMATS)].fp == 0

    def test_cells_sum_to_global(self, rng):
        gold, pred = paired_corpora(rng, 120, sentences_per_doc=6)
        domains = [Domain.SPORTS, Domain.ECONOMY, Domain.WORLD_EVENTS]
        formats = [DocFormat.TEXT_ARTICLE, DocFormat.DATA_REPORT, DocFormat.HYBRID]
        metadata = {}
        for d in range(len(gold)):
            if d % 5 == 4:
                continue  # leave some documents Unknown
            dom = domains[d % 3]
            fmt = formats[d % 2]  # avoid the world_events+data_report warning pair
            if dom is Domain.WORLD_EVENTS:
                fmt = DocFormat.TEXT_ARTICLE
            metadata[d] = DocMetadata(dom, fmt)
        reports = score_stratified(gold, pred, metadata)
        cells = [r for r in reports if r.stratum[0] != ALL_DOMAINS and r.stratum[1] != ALL_FORMATS]
        overall = [r for r in reports if r.stratum == (ALL_DOMAINS, ALL_FORMATS)][0]
        assert sum(r.tp for r in cells) == overall.tp
        assert sum(r.fp for r in cells) == overall.fp
        assert sum(r.fn for r in cells) == overall.fn

    def test_unknown_stratum_reported_not_dropped(self):
        gold, _ = self.fixture()
        reports = score_stratified(gold, gold, {})
        strata = {r.stratum for r in reports}
        assert ("Unknown", "Unknown") in strata

    def test_grid_marks_empty_cells_with_dash(self):
        from conllkit.reporting import render_stratified_text

        # one document per non-empty cell of the published census shape;
        # world-events data reports and hybrids stay empty
        cells = [
            (Domain.WORLD_EVENTS, DocFormat.TEXT_ARTICLE),
            (Domain.ECONOMY, DocFormat.TEXT_ARTICLE),
            (Domain.SPORTS, DocFormat.TEXT_ARTICLE),
            (Domain.ECONOMY, DocFormat.DATA_REPORT),
            (Domain.SPORTS, DocFormat.DATA_REPORT),
            (Domain.ECONOMY, DocFormat.HYBRID),
            (Domain.SPORTS, DocFormat.HYBRID),
        ]
        gold = corpus(*[[sent_from_labels(["B-ORG", "O"])] for _ in cells])
        metadata = {i: DocMetadata(d, f) for i, (d, f) in enumerate(cells)}
        text = render_stratified_text(score_stratified(gold, gold, metadata))
        lines = text.splitlines()
        assert lines[0].split() == ["F1", "Sports", "World", "Events", "Economy",
                                    "All", "Domains"]
        rows = {line.split("  ")[0]: line for line in lines[1:]}
        assert set(rows) == {"Text Article", "Data Report", "Hybrid", "All Formats"}
        assert rows["Data Report"].split()[-3:] == ["-", "100.00", "100.00"]
        assert rows["Hybrid"].split()[-3:] == ["-", "100.00", "100.00"]
        assert "-" not in rows["All Formats"].split()


class TestSeenUnseen:
    def test_seen_and_unseen_partition(self):
        train = corpus([sent(("Chelsea", "B-ORG"), ("won", "O"))])
        gold = corpus([sent(("Chelsea", "B-ORG"), ("beat", "O"), ("Wrexham", "B-ORG"))])
        pred = corpus([sent(("Chelsea", "B-ORG"), ("beat", "O"), ("Wrexham", "O"))])
        split = seen_unseen_recall(gold, pred, train)
        assert (split.seen_gold_count, split.unseen_gold_count) == (1, 1)
        assert split.seen_recall == 1
        assert split.unseen_recall == 0

    def test_full_overlap_means_no_unseen(self):
        c = one_sentence_corpus(["B-ORG", "O", "B-PER"])
        split = seen_unseen_recall(c, c, c)
        assert split.unseen_gold_count == 0
        assert split.seen_recall == 1

    def test_empty_training_corpus(self):
        gold = one_sentence_corpus(["B-ORG", "O", "B-PER"])
        pred = one_sentence_corpus(["B-ORG", "O", "O"])
        split = seen_unseen_recall(gold, pred, Corpus())
        assert split.seen_gold_count == 0
        assert split.unseen_recall == Fraction(1, 2)  # equals the overall recall

    def test_case_and_type_toggles(self):
        train = corpus([sent(("CHELSEA", "B-LOC"),)])
        gold = corpus([sent(("Chelsea", "B-ORG"),)])
        pred = gold
        assert seen_unseen_recall(gold, pred, train).seen_gold_count == 0
        assert seen_unseen_recall(gold, pred, train, case_sensitive=False).seen_gold_count == 1
        assert (
            seen_unseen_recall(gold, pred, train, case_sensitive=False, match_type=True)
            .seen_gold_count
            == 0
        )

    def test_weighted_identity(self, rng):
        for _ in range(30):
            gold, pred = paired_corpora(rng, 40)
            train, _ = paired_corpora(rng, 15)
            split = seen_unseen_recall(gold, pred, train)
            overall = score(gold, pred)
            assert split.seen_tp + split.unseen_tp == overall.tp
            assert split.seen_gold_count + split.unseen_gold_count == overall.tp + overall.fn


class TestCensus:
    def test_census_counts(self):
        docs = [[sent(("x", "O"))] for _ in range(4)]
        c = corpus(*docs)
        metadata = {
            0: DocMetadata(Domain.SPORTS, DocFormat.DATA_REPORT),
            1: DocMetadata(Domain.SPORTS, DocFormat.DATA_REPORT),
            2: DocMetadata(Domain.ECONOMY, DocFormat.TEXT_ARTICLE),
        }
        report = census(c, metadata)
        assert report.documents == 4
        assert report.by_cell[(Domain.SPORTS, DocFormat.DATA_REPORT)] == 2
        assert report.by_cell[(Domain.UNKNOWN, DocFormat.UNKNOWN)] == 1
        assert report.domain_total(Domain.SPORTS) == 2
        assert report.format_total(DocFormat.TEXT_ARTICLE) == 1
