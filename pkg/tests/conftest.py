"""Shared builders and random-corpus generators for the test suite."""

from __future__ import annotations

import random

import pytest

from conllkit.model import (
    Corpus,
    Document,
    EncodingScheme,
    Label,
    Mention,
    Sentence,
    Token,
    encode_labels,
)

TYPES = ("PER", "ORG", "LOC", "MISC")


def sent(*pairs: tuple[str, str]) -> Sentence:
    return Sentence(tuple(Token(s, Label.parse(l)) for s, l in pairs))


def sent_from_labels(labels: list[str], prefix: str = "w") -> Sentence:
    return Sentence(
        tuple(Token(f"{prefix}{i}", Label.parse(l)) for i, l in enumerate(labels))
    )


def corpus(*docs: list[Sentence], ner_column_index: int = -1) -> Corpus:
    return Corpus(
        tuple(Document(i, tuple(sents)) for i, sents in enumerate(docs)),
        ner_column_index=ner_column_index,
    )


def one_sentence_corpus(labels: list[str]) -> Corpus:
    return corpus([sent_from_labels(labels)])


def random_bio_labels(rng: random.Random, n: int, types=TYPES) -> list[str]:
    """Random walk over {O, B-T, I-T} states that only takes legal steps."""
    labels: list[str] = []
    open_type: str | None = None
    for _ in range(n):
        choices = ["O", "B"]
        if open_type is not None:
            choices.append("I")
        pick = rng.choice(choices)
        if pick == "O":
            labels.append("O")
            open_type = None
        elif pick == "B":
            open_type = rng.choice(types)
            labels.append(f"B-{open_type}")
        else:
            labels.append(f"I-{open_type}")
    return labels


def random_mentions(rng: random.Random, n_tokens: int, types=TYPES) -> list[tuple[int, int, str]]:
    """Random non-overlapping typed spans over n_tokens positions."""
    spans = []
    i = 0
    while i < n_tokens:
        if rng.random() < 0.4:
            length = rng.randint(1, min(3, n_tokens - i))
            spans.append((i, i + length, rng.choice(types)))
            i += length
        else:
            i += 1
    return spans


def labels_from_spans(
    spans: list[tuple[int, int, str]], n: int, encoding: EncodingScheme
) -> list[str]:
    mentions = [Mention(0, 0, s, e, t, "x") for s, e, t in spans]
    return [str(l) for l in encode_labels(mentions, n, encoding)]


def perturb_spans(
    rng: random.Random, spans: list[tuple[int, int, str]], n_tokens: int, types=TYPES
) -> list[tuple[int, int, str]]:
    """A plausible prediction: drop, retype, shift, and invent spans."""
    out: list[tuple[int, int, str]] = []
    for (s, e, t) in spans:
        roll = rng.random()
        if roll < 0.25:
            continue  # missed
        if roll < 0.45:
            t = rng.choice(types)  # possible type confusion
        if roll < 0.6:
            s = max(0, s - rng.randint(0, 1))
            e = min(n_tokens, e + rng.randint(0, 1))
            if s >= e:
                continue
        out.append((s, e, t))
    if rng.random() < 0.4 and n_tokens >= 2:
        s = rng.randrange(n_tokens - 1)
        out.append((s, s + rng.randint(1, 2), rng.choice(types)))
    # resolve overlaps greedily, earlier span wins
    out.sort()
    kept: list[tuple[int, int, str]] = []
    last_end = 0
    for s, e, t in out:
        if s >= last_end and e <= n_tokens:
            kept.append((s, e, t))
            last_end = e
    return kept


def random_pair(rng: random.Random, max_tokens: int = 10, types=TYPES):
    """One (gold labels, pred labels) sentence pair with realistic overlap."""
    n = rng.randint(1, max_tokens)
    gold_spans = random_mentions(rng, n, types)
    pred_spans = perturb_spans(rng, gold_spans, n, types)
    gold = labels_from_spans(gold_spans, n, EncodingScheme.BIO)
    pred = labels_from_spans(pred_spans, n, EncodingScheme.BIO)
    return gold, pred


def paired_corpora(rng: random.Random, n_pairs: int, sentences_per_doc: int = 10):
    """Two identically tokenized corpora built from n_pairs random pairs."""
    gold_docs: list[list[Sentence]] = [[]]
    pred_docs: list[list[Sentence]] = [[]]
    for _ in range(n_pairs):
        gold_labels, pred_labels = random_pair(rng)
        if len(gold_docs[-1]) >= sentences_per_doc:
            gold_docs.append([])
            pred_docs.append([])
        gold_docs[-1].append(sent_from_labels(gold_labels))
        pred_docs[-1].append(sent_from_labels(pred_labels))
    return corpus(*gold_docs), corpus(*pred_docs)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240315)
