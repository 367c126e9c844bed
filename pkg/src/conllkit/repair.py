"""Declarative corpus repairs: sentence boundaries, token splits, label fixes.

A patch is an ordered list of ops, applied atomically by default: any bad
location, stale surface, or newly introduced invalid transition rejects the
whole patch. Ops are applied by ascending (document, sentence); within one
sentence, structure first (merge/split) and then token-level ops from the
highest token index down, so earlier token indices stay valid. Op locations
refer to the corpus state at the op's turn.

The detectors at the bottom only emit candidates for human review; they never
change the corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .conll_io import validate_transitions
from .errors import BadLocation, SurfaceMismatch, WouldCreateInvalidTransition
from .model import (
    Corpus,
    DocFormat,
    DocMetadata,
    Document,
    Domain,
    EncodingScheme,
    Label,
    Sentence,
    Token,
)


class RepairKind(Enum):
    SENTENCE_MERGE = "sentence_merge"
    SENTENCE_SPLIT = "sentence_split"
    TOKEN_SPLIT = "token_split"
    HYPHEN_SPLIT = "hyphen_split"
    LABEL_FIX = "label_fix"

    @classmethod
    def parse(cls, text: str) -> "RepairKind":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown repair kind {text!r}")


TOKEN_KINDS = (RepairKind.TOKEN_SPLIT, RepairKind.HYPHEN_SPLIT, RepairKind.LABEL_FIX)


@dataclass(frozen=True)
class RepairOp:
    kind: RepairKind
    doc_index: int
    sentence_index: int
    token_index: int | None = None
    expected_surface: str | None = None
    surfaces: tuple[str, ...] | None = None  # TokenSplit replacement surfaces
    labels: tuple[str, ...] | None = None    # TokenSplit / HyphenSplit labels
    new_label: str | None = None             # LabelFix
    split_at: int | None = None              # SentenceSplit

    def __post_init__(self):
        if self.kind in TOKEN_KINDS:
            if self.token_index is None:
                raise ValueError(f"{self.kind.value} requires token_index")
            if self.expected_surface is None:
                raise ValueError(f"{self.kind.value} requires expected_surface")
        if self.kind is RepairKind.TOKEN_SPLIT:
            if not self.surfaces or len(self.surfaces) < 2:
                raise ValueError("token_split requires >= 2 replacement surfaces")
            if not self.labels or len(self.labels) != len(self.surfaces):
                raise ValueError("token_split requires one label per surface")
            if "".join(self.surfaces) != self.expected_surface:
                raise ValueError(
                    "token_split surfaces must concatenate to the original surface"
                )
        if self.kind is RepairKind.HYPHEN_SPLIT:
            if not self.labels or len(self.labels) != 3:
                raise ValueError("hyphen_split requires exactly 3 labels")
        if self.kind is RepairKind.SENTENCE_SPLIT and self.split_at is None:
            raise ValueError("sentence_split requires split_at")

    def to_json(self) -> str:
        obj: dict = {
            "kind": self.kind.value,
            "doc_index": self.doc_index,
            "sentence_index": self.sentence_index,
        }
        if self.token_index is not None:
            obj["token_index"] = self.token_index
        if self.expected_surface is not None:
            obj["expected_surface"] = self.expected_surface
        if self.surfaces is not None:
            obj["surfaces"] = list(self.surfaces)
        if self.labels is not None:
            obj["labels"] = list(self.labels)
        if self.new_label is not None:
            obj["new_label"] = self.new_label
        if self.split_at is not None:
            obj["split_at"] = self.split_at
        return json.dumps(obj, ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "RepairOp":
        return cls(
            kind=RepairKind.parse(obj["kind"]),
            doc_index=obj["doc_index"],
            sentence_index=obj["sentence_index"],
            token_index=obj.get("token_index"),
            expected_surface=obj.get("expected_surface"),
            surfaces=tuple(obj["surfaces"]) if "surfaces" in obj else None,
            labels=tuple(obj["labels"]) if "labels" in obj else None,
            new_label=obj.get("new_label"),
            split_at=obj.get("split_at"),
        )


def parse_patch(source) -> list[RepairOp]:
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    return [RepairOp.from_dict(json.loads(ln)) for ln in text.splitlines() if ln.strip()]


@dataclass
class RepairStats:
    counts: dict[RepairKind, int] = field(default_factory=dict)
    applied: int = 0
    skipped: list[tuple[RepairOp, str]] = field(default_factory=list)

    def count(self, kind: RepairKind) -> int:
        return self.counts.get(kind, 0)

    @property
    def submitted(self) -> int:
        return self.applied + len(self.skipped)


def patch_stats(patch: list[RepairOp]) -> RepairStats:
    """Per-kind op counts without applying anything."""
    stats = RepairStats()
    for op in patch:
        stats.counts[op.kind] = stats.counts.get(op.kind, 0) + 1
        stats.applied += 1
    return stats


def _op_sort_key(patch: list[RepairOp]):
    def effective_token(op: RepairOp) -> float:
        if op.kind is RepairKind.SENTENCE_MERGE:
            return float("inf")  # structure first within the sentence
        if op.kind is RepairKind.SENTENCE_SPLIT:
            return float(op.split_at)
        return float(op.token_index)

    return sorted(
        range(len(patch)),
        key=lambda i: (patch[i].doc_index, patch[i].sentence_index, -effective_token(patch[i])),
    )


def apply_patch(
    corpus: Corpus,
    patch: list[RepairOp],
    *,
    encoding: EncodingScheme = EncodingScheme.BIO,
    on_error: str = "raise",
) -> tuple[Corpus, RepairStats]:
    """Apply a patch and report per-kind fix statistics.

    ``on_error="raise"`` (default) is atomic; ``on_error="skip"`` records bad
    ops in the stats and applies the rest. Either way the result must not
    introduce invalid transitions the input did not already have.
    """
    if on_error not in ("raise", "skip"):
        raise ValueError("on_error must be 'raise' or 'skip'")

    work: list[list[list[Token]]] = [
        [list(sent.tokens) for sent in doc.sentences] for doc in corpus.documents
    ]
    stats = RepairStats()
    for i in _op_sort_key(patch):
        op = patch[i]
        try:
            _apply_one(work, op)
        except (BadLocation, SurfaceMismatch) as exc:
            if on_error == "raise":
                raise
            stats.skipped.append((op, str(exc)))
            continue
        stats.counts[op.kind] = stats.counts.get(op.kind, 0) + 1
        stats.applied += 1

    docs = []
    for d_idx, sents in enumerate(work):
        non_empty = [Sentence(tuple(toks)) for toks in sents if toks]
        meta = corpus.documents[d_idx].metadata
        docs.append(Document(d_idx, tuple(non_empty), meta))
    result = Corpus(tuple(docs), ner_column_index=corpus.ner_column_index)

    before = {
        (v.doc_index, v.sentence_index, v.token_index)
        for v in validate_transitions(corpus, encoding)
    }
    introduced = [
        v
        for v in validate_transitions(result, encoding)
        if (v.doc_index, v.sentence_index, v.token_index) not in before
    ]
    if introduced:
        raise WouldCreateInvalidTransition(introduced)
    return result, stats


def _locate(work, op: RepairOp) -> list[Token]:
    try:
        doc = work[op.doc_index]
    except IndexError:
        raise BadLocation(f"no document {op.doc_index}") from None
    try:
        return doc[op.sentence_index]
    except IndexError:
        raise BadLocation(
            f"doc {op.doc_index}: no sentence {op.sentence_index}"
        ) from None


def _check_surface(op: RepairOp, tok: Token) -> None:
    if op.expected_surface is not None and tok.surface != op.expected_surface:
        raise SurfaceMismatch(
            op.expected_surface,
            tok.surface,
            f"doc {op.doc_index} sentence {op.sentence_index} token {op.token_index}",
        )


def _apply_one(work, op: RepairOp) -> None:
    from dataclasses import replace

    sent = _locate(work, op)

    if op.kind is RepairKind.SENTENCE_MERGE:
        doc = work[op.doc_index]
        if op.sentence_index + 1 >= len(doc):
            raise BadLocation(
                f"doc {op.doc_index}: sentence {op.sentence_index} has no successor to merge"
            )
        successor = doc[op.sentence_index + 1]
        if op.expected_surface is not None and (
            not successor or successor[0].surface != op.expected_surface
        ):
            actual = successor[0].surface if successor else "<empty>"
            raise SurfaceMismatch(
                op.expected_surface, actual,
                f"doc {op.doc_index} sentence {op.sentence_index + 1} token 0",
            )
        sent.extend(successor)
        del doc[op.sentence_index + 1]
        return

    if op.kind is RepairKind.SENTENCE_SPLIT:
        if not (0 < op.split_at < len(sent)):
            raise BadLocation(
                f"doc {op.doc_index} sentence {op.sentence_index}: "
                f"split_at {op.split_at} out of range (1..{len(sent) - 1})"
            )
        if op.expected_surface is not None and sent[op.split_at].surface != op.expected_surface:
            raise SurfaceMismatch(
                op.expected_surface, sent[op.split_at].surface,
                f"doc {op.doc_index} sentence {op.sentence_index} token {op.split_at}",
            )
        tail = sent[op.split_at:]
        del sent[op.split_at:]
        work[op.doc_index].insert(op.sentence_index + 1, tail)
        return

    if op.token_index >= len(sent) or op.token_index < 0:
        raise BadLocation(
            f"doc {op.doc_index} sentence {op.sentence_index}: "
            f"no token {op.token_index}"
        )
    tok = sent[op.token_index]
    _check_surface(op, tok)

    if op.kind is RepairKind.LABEL_FIX:
        sent[op.token_index] = replace(tok, label=Label.parse(op.new_label))
        return

    if op.kind is RepairKind.TOKEN_SPLIT:
        parts = [
            Token(s, Label.parse(lab), tok.extra_columns, source_line=tok.source_line)
            for s, lab in zip(op.surfaces, op.labels)
        ]
        sent[op.token_index:op.token_index + 1] = parts
        return

    if op.kind is RepairKind.HYPHEN_SPLIT:
        interior = tok.surface[1:-1]
        if interior.count("-") != 1:
            raise BadLocation(
                f"hyphen_split target {tok.surface!r} does not contain exactly one "
                "interior hyphen"
            )
        cut = 1 + interior.index("-")
        left, right = tok.surface[:cut], tok.surface[cut + 1:]
        parts = [
            Token(s, Label.parse(lab), tok.extra_columns, source_line=tok.source_line)
            for s, lab in zip((left, "-", right), op.labels)
        ]
        sent[op.token_index:op.token_index + 1] = parts
        return

    raise AssertionError(f"unhandled repair kind {op.kind}")


@dataclass(frozen=True)
class Candidate:
    """A detector hit for human review; never applied automatically."""

    doc_index: int
    sentence_index: int
    token_index: int | None
    reason: str


def _caps_style(surfaces: list[str]) -> bool:
    has_letter = False
    for s in surfaces:
        for ch in s:
            if ch.isalpha():
                has_letter = True
                if ch.islower():
                    return False
    return has_letter


def detect_headline_boundary_candidates(
    corpus: Corpus,
    metadata: dict[int, DocMetadata],
    *,
    window: tuple[int, int] = (16, 20),
) -> list[Candidate]:
    """Flag sports data reports whose headline looks split across sentences.

    A candidate document has its first sentence ending within the character
    window (surface characters plus single inter-token spaces) and a second
    sentence that continues in all-caps headline style.
    """
    lo, hi = window
    out: list[Candidate] = []
    for doc in corpus.documents:
        meta = metadata.get(doc.doc_index, DocMetadata())
        if meta.domain is not Domain.SPORTS or meta.doc_format is not DocFormat.DATA_REPORT:
            continue
        if len(doc.sentences) < 2:
            continue
        first = doc.sentences[0]
        second = doc.sentences[1]
        chars = sum(len(t.surface) for t in first.tokens) + (len(first) - 1)
        if not (lo <= chars <= hi):
            continue
        if not _caps_style(first.surfaces()):
            continue
        if not _caps_style([second.tokens[0].surface]):
            continue
        out.append(
            Candidate(
                doc.doc_index,
                0,
                None,
                f"first sentence ends at {chars} chars inside window "
                f"[{lo}, {hi}] and the next sentence continues in caps",
            )
        )
    return out


def detect_hyphen_candidates(corpus: Corpus) -> list[Candidate]:
    """Flag SPORT-HEADLINE style hyphenated tokens in all-caps first sentences.

    Both hyphen sides must be alphabetic and at least two characters, and the
    whole first sentence must be caps-style, so hyphen-joined entities in
    normal prose (like a MISC "UK-US") are left alone.
    """
    out: list[Candidate] = []
    for doc in corpus.documents:
        first = doc.sentences[0]
        if not _caps_style(first.surfaces()):
            continue
        for t_idx, tok in enumerate(first.tokens):
            parts = tok.surface.split("-")
            if len(parts) != 2:
                continue
            left, right = parts
            if len(left) >= 2 and len(right) >= 2 and left.isalpha() and right.isalpha():
                out.append(
                    Candidate(
                        doc.doc_index,
                        0,
                        t_idx,
                        f"all-caps headline token {tok.surface!r} splits as "
                        f"{left!r} - {right!r}",
                    )
                )
    return out
