"""Core value types for corpora, documents, sentences, tokens, and mentions.

Everything here is an immutable value: construction validates, and after that
instances are safe to share across threads or processes. A corpus is an
ordered tuple of documents; documents are identified by their ordinal index in
file order because the CoNLL-03 column format carries no document ids (the
``-DOCSTART-`` sentinel only delimits them).

Two chunk-label encodings are supported:

* ``BIO`` (also called IOB2): every mention begins with ``B-TYPE``; ``I-TYPE``
  is legal only immediately after ``B-TYPE`` or ``I-TYPE`` of the same type.
* ``IOB1``: mentions begin with ``I-TYPE``; ``B-TYPE`` is legal only
  immediately after ``B-TYPE``/``I-TYPE`` of the same type, where it separates
  two adjacent same-type mentions.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .errors import InvalidSequence, MalformedLabel

DOCSTART = "-DOCSTART-"

CONLL_TYPES = ("PER", "ORG", "LOC", "MISC")


class MetadataWarning(UserWarning):
    """Document metadata combination that never occurs in practice."""


def entity_type(name: str) -> str:
    """Validate, uppercase, and intern an entity type tag (PER, ORG, ...).

    The tag inventory is open: any non-empty string without whitespace or
    hyphens is accepted, so corpora with other schemas still parse.
    """
    if not name:
        raise MalformedLabel("")
    if "-" in name or any(ch.isspace() for ch in name):
        raise MalformedLabel(name)
    return sys.intern(name.upper())


class LabelKind(Enum):
    OUTSIDE = "O"
    BEGIN = "B"
    INSIDE = "I"


@dataclass(frozen=True)
class Label:
    """One token's chunk tag: O, or B/I with an entity type."""

    kind: LabelKind
    entity_type: str | None = None

    def __post_init__(self):
        if self.kind is LabelKind.OUTSIDE:
            if self.entity_type is not None:
                raise MalformedLabel(f"O+{self.entity_type}")
        else:
            if self.entity_type is None:
                raise MalformedLabel(self.kind.value)
            object.__setattr__(self, "entity_type", entity_type(self.entity_type))

    @classmethod
    def outside(cls) -> "Label":
        return _OUTSIDE

    @classmethod
    def begin(cls, etype: str) -> "Label":
        return cls(LabelKind.BEGIN, etype)

    @classmethod
    def inside(cls, etype: str) -> "Label":
        return cls(LabelKind.INSIDE, etype)

    @classmethod
    def parse(cls, text: str, line_number: int | None = None) -> "Label":
        """Parse ``O`` / ``B-TYPE`` / ``I-TYPE``; anything else is malformed."""
        if text == "O":
            return _OUTSIDE
        if len(text) > 2 and text[1] == "-" and text[0] in ("B", "I"):
            kind = LabelKind.BEGIN if text[0] == "B" else LabelKind.INSIDE
            try:
                return cls(kind, text[2:])
            except MalformedLabel:
                raise MalformedLabel(text, line_number) from None
        raise MalformedLabel(text, line_number)

    @property
    def is_outside(self) -> bool:
        return self.kind is LabelKind.OUTSIDE

    def __str__(self) -> str:
        if self.kind is LabelKind.OUTSIDE:
            return "O"
        return f"{self.kind.value}-{self.entity_type}"


_OUTSIDE = Label(LabelKind.OUTSIDE)


@dataclass(frozen=True)
class Token:
    """One surface form plus its tag columns and source-line provenance.

    ``source_line`` is excluded from equality: two corpora with identical
    content compare equal regardless of where their rows sat in a file.
    """

    surface: str
    label: Label
    extra_columns: tuple[str, ...] = ()
    source_line: int = field(default=1, compare=False)

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"token surface must be non-empty, no whitespace: {self.surface!r}")
        if self.surface == DOCSTART:
            raise ValueError(f"{DOCSTART} is a document sentinel, not a token")
        if self.source_line < 1:
            raise ValueError("source_line must be >= 1")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    def labels(self) -> list[Label]:
        return [t.label for t in self.tokens]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


class Domain(Enum):
    SPORTS = ("sports", "Sports")
    ECONOMY = ("economy", "Economy")
    WORLD_EVENTS = ("world_events", "World Events")
    UNKNOWN = ("unknown", "Unknown")

    @property
    def token(self) -> str:
        return self.value[0]

    @property
    def display(self) -> str:
        return self.value[1]

    @classmethod
    def parse(cls, text: str) -> "Domain":
        for member in cls:
            if member.token == text:
                return member
        raise ValueError(f"unknown domain {text!r}")


class DocFormat(Enum):
    TEXT_ARTICLE = ("text_article", "Text Article")
    DATA_REPORT = ("data_report", "Data Report")
    HYBRID = ("hybrid", "Hybrid")
    UNKNOWN = ("unknown", "Unknown")

    @property
    def token(self) -> str:
        return self.value[0]

    @property
    def display(self) -> str:
        return self.value[1]

    @classmethod
    def parse(cls, text: str) -> "DocFormat":
        for member in cls:
            if member.token == text:
                return member
        raise ValueError(f"unknown format {text!r}")


@dataclass(frozen=True)
class DocMetadata:
    """Per-document domain/format annotation; Unknown is first-class."""

    domain: Domain = Domain.UNKNOWN
    doc_format: DocFormat = DocFormat.UNKNOWN

    def __post_init__(self):
        # World-events documents are all prose; a data report or hybrid there
        # is almost certainly a mislabeled sidecar row. Warn, don't reject.
        if self.domain is Domain.WORLD_EVENTS and self.doc_format in (
            DocFormat.DATA_REPORT,
            DocFormat.HYBRID,
        ):
            warnings.warn(
                f"suspicious metadata: {self.domain.token} + {self.doc_format.token}",
                MetadataWarning,
                stacklevel=2,
            )


UNKNOWN_METADATA = DocMetadata()


@dataclass(frozen=True)
class Document:
    doc_index: int
    sentences: tuple[Sentence, ...]
    metadata: DocMetadata = UNKNOWN_METADATA

    def __post_init__(self):
        if self.doc_index < 0:
            raise ValueError("doc_index must be >= 0")
        if not self.sentences:
            raise ValueError("document must contain at least one sentence")


@dataclass(frozen=True)
class Corpus:
    """Ordered documents plus the column layout needed to re-emit them.

    ``ner_column_index`` records which input column carried the NER tag
    (negative indices count from the right); serialization puts it back.
    """

    documents: tuple[Document, ...] = ()
    ner_column_index: int = -1

    def __post_init__(self):
        for expected, doc in enumerate(self.documents):
            if doc.doc_index != expected:
                raise ValueError(
                    f"doc_index values must be consecutive from 0; "
                    f"found {doc.doc_index} at position {expected}"
                )

    def __len__(self) -> int:
        return len(self.documents)

    def sentences(self) -> Iterator[tuple[int, int, Sentence]]:
        """Yield (doc_index, sentence_index, sentence) in corpus order."""
        for doc in self.documents:
            for s_idx, sent in enumerate(doc.sentences):
                yield doc.doc_index, s_idx, sent

    @property
    def sentence_count(self) -> int:
        return sum(len(d.sentences) for d in self.documents)

    @property
    def token_count(self) -> int:
        return sum(len(s) for _, _, s in self.sentences())


@dataclass(frozen=True)
class Mention:
    """A typed, contiguous token span within one sentence (the scoring unit)."""

    doc_index: int
    sentence_index: int
    start_token: int
    end_token: int  # exclusive
    entity_type: str
    surface: str

    def __post_init__(self):
        if not (0 <= self.start_token < self.end_token):
            raise ValueError(
                f"mention span must satisfy 0 <= start < end; "
                f"got [{self.start_token}, {self.end_token})"
            )
        object.__setattr__(self, "entity_type", entity_type(self.entity_type))

    @property
    def span(self) -> tuple[int, int]:
        return (self.start_token, self.end_token)

    def overlap(self, other: "Mention") -> int:
        """Number of shared token positions (0 when in different sentences)."""
        if (self.doc_index, self.sentence_index) != (other.doc_index, other.sentence_index):
            return 0
        return max(0, min(self.end_token, other.end_token) - max(self.start_token, other.start_token))


class EncodingScheme(Enum):
    IOB1 = "iob1"
    BIO = "bio"  # IOB2

    @classmethod
    def parse(cls, text: str) -> "EncodingScheme":
        norm = text.strip().lower()
        if norm in ("bio", "iob2"):
            return cls.BIO
        if norm == "iob1":
            return cls.IOB1
        raise ValueError(f"unknown encoding {text!r}")


def transition_legal(prev: Label, cur: Label, encoding: EncodingScheme) -> bool:
    """Is the adjacent pair (prev, cur) legal under the encoding?

    Sentence-initial positions use a virtual previous label of O.
    """
    if cur.kind is LabelKind.OUTSIDE:
        return True
    same_type_chunk = (
        prev.kind in (LabelKind.BEGIN, LabelKind.INSIDE)
        and prev.entity_type == cur.entity_type
    )
    if encoding is EncodingScheme.BIO:
        if cur.kind is LabelKind.BEGIN:
            return True
        return same_type_chunk  # I-X needs a same-type B/I immediately before
    # IOB1: I-X may appear anywhere; B-X only separates adjacent same-type mentions
    if cur.kind is LabelKind.INSIDE:
        return True
    return same_type_chunk


def extract_mentions(
    sentence: Sentence,
    encoding: EncodingScheme,
    doc_index: int = 0,
    sentence_index: int = 0,
    *,
    repair: bool = False,
) -> list[Mention]:
    """Extract maximal typed spans from a sentence, left to right.

    With ``repair=False`` an illegal transition raises :class:`InvalidSequence`.
    With ``repair=True`` the conventional scorer reading is applied instead: a
    chunk tag in an illegal position starts a new mention. The repair reading
    is identical for both encodings, which is what makes it usable as a common
    normalization.
    """
    mentions: list[Mention] = []
    tokens = sentence.tokens
    open_start: int | None = None
    open_type: str | None = None

    def close(end: int) -> None:
        nonlocal open_start, open_type
        if open_start is not None:
            surface = " ".join(t.surface for t in tokens[open_start:end])
            mentions.append(
                Mention(doc_index, sentence_index, open_start, end, open_type, surface)
            )
        open_start, open_type = None, None

    prev = Label.outside()
    for i, tok in enumerate(tokens):
        cur = tok.label
        if cur.kind is LabelKind.OUTSIDE:
            close(i)
        else:
            legal = transition_legal(prev, cur, encoding)
            if not legal and not repair:
                raise InvalidSequence(
                    f"illegal transition {prev} -> {cur} under {encoding.value.upper()} "
                    f"(doc {doc_index}, sentence {sentence_index}, token {i})",
                    (doc_index, sentence_index, i),
                )
            continues = (
                open_start is not None
                and open_type == cur.entity_type
                and cur.kind is LabelKind.INSIDE
            )
            if not continues:
                close(i)
                open_start, open_type = i, cur.entity_type
        prev = cur
    close(len(tokens))
    return mentions


def encode_labels(
    mentions: list[Mention], length: int, encoding: EncodingScheme
) -> list[Label]:
    """Inverse of :func:`extract_mentions`: mentions back to a label sequence.

    Mentions must be sorted, within one sentence, and non-overlapping.
    """
    labels: list[Label] = [Label.outside()] * length
    prev_end = 0
    prev_type: str | None = None
    last_end = -1
    for m in mentions:
        if m.start_token < last_end:
            raise ValueError("mentions must be sorted and non-overlapping")
        if m.end_token > length:
            raise ValueError("mention extends past sentence end")
        last_end = m.end_token
        if encoding is EncodingScheme.BIO:
            first = Label.begin(m.entity_type)
        else:
            # IOB1: I- begins a mention unless it would merge into an adjacent
            # same-type mention, where B- is the separator.
            adjacent_same = prev_end == m.start_token and prev_type == m.entity_type
            first = Label.begin(m.entity_type) if adjacent_same else Label.inside(m.entity_type)
        labels[m.start_token] = first
        for i in range(m.start_token + 1, m.end_token):
            labels[i] = Label.inside(m.entity_type)
        prev_end, prev_type = m.end_token, m.entity_type
    return labels


def corpus_mentions(
    corpus: Corpus, encoding: EncodingScheme, *, repair: bool = False
) -> list[Mention]:
    """All mentions of a corpus in (doc, sentence, start) order."""
    out: list[Mention] = []
    for d_idx, s_idx, sent in corpus.sentences():
        out.extend(extract_mentions(sent, encoding, d_idx, s_idx, repair=repair))
    return out


def with_token_label(
    corpus: Corpus, doc_index: int, sentence_index: int, token_index: int, label: Label
) -> Corpus:
    """Return a corpus with exactly one token's label replaced."""
    from dataclasses import replace

    doc = corpus.documents[doc_index]
    sent = doc.sentences[sentence_index]
    tok = sent.tokens[token_index]
    new_tok = replace(tok, label=label)
    new_tokens = sent.tokens[:token_index] + (new_tok,) + sent.tokens[token_index + 1:]
    new_sent = Sentence(new_tokens)
    new_sents = doc.sentences[:sentence_index] + (new_sent,) + doc.sentences[sentence_index + 1:]
    new_doc = replace(doc, sentences=new_sents)
    new_docs = corpus.documents[:doc_index] + (new_doc,) + corpus.documents[doc_index + 1:]
    return replace(corpus, documents=new_docs)


def with_metadata(corpus: Corpus, metadata: dict[int, DocMetadata]) -> Corpus:
    """Attach sidecar metadata by doc_index; documents without entries keep Unknown."""
    from dataclasses import replace

    docs = tuple(
        replace(doc, metadata=metadata.get(doc.doc_index, UNKNOWN_METADATA))
        for doc in corpus.documents
    )
    return replace(corpus, documents=docs)
