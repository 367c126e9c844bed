"""Parse and serialize CoNLL-03 column files; validate and convert encodings.

The file format: one token per line as space-separated columns, a blank line
between sentences, and a ``-DOCSTART-`` row at the start of each document.
``-DOCSTART-`` rows are metadata, never tokens: they are consumed on parse and
regenerated on serialization with O-filled tag columns.

Input is tolerant (runs of spaces/tabs, CRLF, extra blank lines); output is
canonical (single-space separators, LF, one blank line after every sentence).
``serialize_corpus`` is the byte-exact inverse of ``parse_corpus`` on files
already in canonical form, and ``parse_corpus`` inverts ``serialize_corpus``
for any in-memory corpus.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

from .errors import RaggedRow
from .model import (
    DOCSTART,
    Corpus,
    DocFormat,
    DocMetadata,
    Document,
    Domain,
    EncodingScheme,
    Label,
    LabelKind,
    Sentence,
    Token,
    encode_labels,
    extract_mentions,
    transition_legal,
)

__all__ = [
    "ColumnSpec",
    "ParseReport",
    "TransitionViolation",
    "parse_corpus",
    "parse_file",
    "serialize_corpus",
    "write_file",
    "convert_encoding",
    "validate_transitions",
    "conlleval_repair",
    "read_metadata_sidecar",
    "EncodingScheme",
]


@dataclass(frozen=True)
class ColumnSpec:
    """Where the NER tag lives and how many columns to expect (None = auto)."""

    ner_column_index: int = -1
    expected_column_count: int | None = None


@dataclass(frozen=True)
class TransitionViolation:
    """One illegal adjacent label pair, with provenance."""

    doc_index: int
    sentence_index: int
    token_index: int
    source_line: int
    prev_label: Label
    cur_label: Label

    def __str__(self) -> str:
        return (
            f"{self.prev_label} -> {self.cur_label} at doc {self.doc_index}, "
            f"sentence {self.sentence_index}, token {self.token_index} "
            f"(line {self.source_line})"
        )


@dataclass(frozen=True)
class ParseReport:
    token_count: int
    sentence_count: int
    document_count: int
    detected_encoding: EncodingScheme
    violations: tuple[TransitionViolation, ...] = ()
    encoding_ambiguous: bool = False

    def __post_init__(self):
        if self.token_count > 0 and not (
            self.document_count <= self.sentence_count <= self.token_count
        ):
            raise ValueError("count invariant violated: docs <= sentences <= tokens")


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_corpus(
    source,
    column_spec: ColumnSpec = ColumnSpec(),
    *,
    encoding: EncodingScheme | None = None,
) -> tuple[Corpus, ParseReport]:
    """Parse CoNLL column text into a corpus plus a parse report.

    ``source`` may be bytes, str, or a file object (text or binary). Empty
    input is not an error; it yields an empty corpus. Violations in the report
    are computed under ``encoding`` when given, else under the detected one.

    Encoding detection is file-global: IOB1 when at least one mention starts
    with ``I-X`` in a position illegal under BIO and no ``B-X`` appears in a
    position illegal under IOB1; everything else (including files consistent
    under both readings) is reported as BIO, with ``encoding_ambiguous`` set
    when neither scheme had distinguishing evidence.
    """
    text = _as_text(source)

    documents: list[Document] = []
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    expected_cols = column_spec.expected_column_count

    def flush_sentence() -> None:
        nonlocal tokens
        if tokens:
            sentences.append(Sentence(tuple(tokens)))
            tokens = []

    def flush_document() -> None:
        nonlocal sentences
        flush_sentence()
        if sentences:
            documents.append(Document(len(documents), tuple(sentences)))
            sentences = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            flush_sentence()
            continue
        fields = line.split()
        if fields[0] == DOCSTART:
            flush_document()
            continue
        if expected_cols is None:
            expected_cols = len(fields)
        elif len(fields) != expected_cols:
            raise RaggedRow(line_number, expected_cols, len(fields))
        ner_idx = column_spec.ner_column_index
        if ner_idx < 0:
            ner_idx += len(fields)
        if not (0 < ner_idx < len(fields)):
            raise ValueError(
                f"line {line_number}: ner_column_index {column_spec.ner_column_index} "
                f"does not address a tag column in a {len(fields)}-column row"
            )
        label = Label.parse(fields[ner_idx], line_number)
        extra = tuple(fields[i] for i in range(1, len(fields)) if i != ner_idx)
        tokens.append(Token(fields[0], label, extra, source_line=line_number))
    flush_document()

    ner_index = column_spec.ner_column_index
    corpus = Corpus(tuple(documents), ner_column_index=ner_index)

    detected, ambiguous = _detect_encoding(corpus)
    check_under = encoding if encoding is not None else detected
    violations = tuple(validate_transitions(corpus, check_under))
    report = ParseReport(
        token_count=corpus.token_count,
        sentence_count=corpus.sentence_count,
        document_count=len(corpus),
        detected_encoding=detected,
        violations=violations,
        encoding_ambiguous=ambiguous,
    )
    return corpus, report


def parse_file(
    path, column_spec: ColumnSpec = ColumnSpec(), *, encoding: EncodingScheme | None = None
) -> tuple[Corpus, ParseReport]:
    with open(path, "rb") as fh:
        return parse_corpus(fh, column_spec, encoding=encoding)


def _detect_encoding(corpus: Corpus) -> tuple[EncodingScheme, bool]:
    iob1_evidence = 0  # mention-initial I-X: illegal under BIO, normal in IOB1
    bio_evidence = 0  # free-standing B-X: illegal under IOB1, normal in BIO
    for _, _, sent in corpus.sentences():
        prev = Label.outside()
        for tok in sent.tokens:
            cur = tok.label
            if cur.kind is not LabelKind.OUTSIDE:
                chunk_continues = (
                    prev.kind is not LabelKind.OUTSIDE
                    and prev.entity_type == cur.entity_type
                )
                if cur.kind is LabelKind.INSIDE and not chunk_continues:
                    iob1_evidence += 1
                if cur.kind is LabelKind.BEGIN and not chunk_continues:
                    bio_evidence += 1
            prev = cur
    if iob1_evidence > 0 and bio_evidence == 0:
        return EncodingScheme.IOB1, False
    return EncodingScheme.BIO, iob1_evidence == 0 and bio_evidence == 0


def serialize_corpus(corpus: Corpus) -> bytes:
    """Emit canonical CoNLL column bytes for a corpus.

    One ``-DOCSTART-`` row (tag columns O-filled) starts each document; every
    sentence, and the sentinel row, is followed by exactly one blank line.
    Labels are written verbatim in whatever encoding they carry.
    """
    out = io.StringIO()
    width = _row_width(corpus)
    for doc in corpus.documents:
        out.write(DOCSTART + " O" * (width - 1) + "\n\n")
        for sent in doc.sentences:
            for tok in sent.tokens:
                out.write(" ".join(_row_fields(corpus, tok)) + "\n")
            out.write("\n")
    return out.getvalue().encode("utf-8")


def write_file(path, corpus: Corpus) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_corpus(corpus))


def _row_width(corpus: Corpus) -> int:
    for _, _, sent in corpus.sentences():
        return 2 + len(sent.tokens[0].extra_columns)
    return 2


def _row_fields(corpus: Corpus, tok: Token) -> list[str]:
    fields = [tok.surface, *tok.extra_columns]
    ner_idx = corpus.ner_column_index
    if ner_idx < 0:
        ner_idx += len(fields) + 1
    fields.insert(ner_idx, str(tok.label))
    return fields


def validate_transitions(
    corpus: Corpus, encoding: EncodingScheme
) -> list[TransitionViolation]:
    """Every illegal adjacent label pair, sentence-initial positions included.

    Violations are data, not failures: the empty list means the corpus is
    valid under ``encoding``.
    """
    violations: list[TransitionViolation] = []
    for d_idx, s_idx, sent in corpus.sentences():
        prev = Label.outside()
        for t_idx, tok in enumerate(sent.tokens):
            if not transition_legal(prev, tok.label, encoding):
                violations.append(
                    TransitionViolation(
                        d_idx, s_idx, t_idx, tok.source_line, prev, tok.label
                    )
                )
            prev = tok.label
    return violations


def _map_labels(corpus: Corpus, fn) -> Corpus:
    """Rebuild a corpus with per-sentence label sequences replaced by fn(sent, d, s)."""
    docs = []
    for doc in corpus.documents:
        sents = []
        for s_idx, sent in enumerate(doc.sentences):
            new_labels = fn(sent, doc.doc_index, s_idx)
            sents.append(
                Sentence(
                    tuple(
                        replace(tok, label=lab)
                        for tok, lab in zip(sent.tokens, new_labels)
                    )
                )
            )
        docs.append(replace(doc, sentences=tuple(sents)))
    return replace(corpus, documents=tuple(docs))


def convert_encoding(
    corpus: Corpus, from_encoding: EncodingScheme, to_encoding: EncodingScheme
) -> Corpus:
    """Re-express labels in another scheme; the mention sets are unchanged.

    Raises :class:`InvalidSequence` when the corpus is invalid under
    ``from_encoding``.
    """

    def convert(sent: Sentence, d_idx: int, s_idx: int) -> list[Label]:
        mentions = extract_mentions(sent, from_encoding, d_idx, s_idx)
        return encode_labels(mentions, len(sent), to_encoding)

    return _map_labels(corpus, convert)


def conlleval_repair(corpus: Corpus) -> Corpus:
    """Apply the conventional scorer repair and return a valid BIO corpus.

    A chunk tag in an illegal position (``I-X`` after O or after another type)
    becomes the start of a new mention. This is a lossy normalization meant
    for explicitly requested cleanup; parsing never applies it silently.
    """

    def rebio(sent: Sentence, d_idx: int, s_idx: int) -> list[Label]:
        mentions = extract_mentions(sent, EncodingScheme.BIO, d_idx, s_idx, repair=True)
        return encode_labels(mentions, len(sent), EncodingScheme.BIO)

    return _map_labels(corpus, rebio)


def read_metadata_sidecar(source) -> dict[int, DocMetadata]:
    """Read the TSV sidecar mapping doc_index to (domain, format).

    Expected header: ``doc_index<TAB>domain<TAB>format``. Documents without a
    row simply stay Unknown; the literal value ``unknown`` is also accepted.
    """
    text = _as_text(source)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return {}
    header = [col.strip() for col in lines[0].split("\t")]
    if header != ["doc_index", "domain", "format"]:
        raise ValueError(
            f"bad sidecar header {lines[0]!r}; expected doc_index<TAB>domain<TAB>format"
        )
    out: dict[int, DocMetadata] = {}
    for ln in lines[1:]:
        cols = [col.strip() for col in ln.split("\t")]
        if len(cols) != 3:
            raise ValueError(f"bad sidecar row {ln!r}")
        idx = int(cols[0])
        out[idx] = DocMetadata(Domain.parse(cols[1]), DocFormat.parse(cols[2]))
    return out
