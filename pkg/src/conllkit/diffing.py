"""Token-level label comparison across 2..N versions of the same corpus.

Versions of a corpus produced by different correction efforts may retokenize
(split tokens, move sentence boundaries), so comparison starts from an
order-preserving alignment over token surface forms, computed per document
with the first-listed version as the pivot. Aligned positions are compared on
labels normalized to BIO so that IOB1-vs-BIO artifacts never count as
disagreements; unaligned (retokenized) regions are excluded from counts and
reported separately.

Normalization uses the repair reading of the label sequence (see
``extract_mentions(..., repair=True)``), which is total: corpora containing
invalid transitions can still be diffed, matching how scorers read them.
"""

from __future__ import annotations

import difflib
import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .conll_io import validate_transitions
from .errors import BadLocation, DocumentCountMismatch, UnknownDiffId, WouldCreateInvalidTransition
from .model import (
    Corpus,
    Document,
    EncodingScheme,
    Label,
    Sentence,
    Token,
    encode_labels,
    extract_mentions,
    with_token_label,
)


@dataclass(frozen=True)
class DocumentAlignment:
    """Aligned flat-token index tuples for one document, plus leftovers."""

    tuples: tuple[tuple[int, ...], ...]
    unaligned: tuple[tuple[int, ...], ...]  # per version


@dataclass(frozen=True)
class TokenAlignment:
    version_count: int
    documents: tuple[DocumentAlignment, ...]

    @property
    def aligned_total(self) -> int:
        return sum(len(d.tuples) for d in self.documents)


@dataclass(frozen=True)
class DiffRecord:
    """One aligned token position where at least two versions disagree.

    Coordinates refer to the first (pivot) version. ``labels`` holds
    (version name, label string) pairs in version order.
    """

    diff_id: str
    doc_index: int
    sentence_index: int
    token_index: int
    surface: str
    labels: tuple[tuple[str, str], ...]

    @property
    def labels_dict(self) -> dict[str, str]:
        return dict(self.labels)


@dataclass
class AgreementPartition:
    """Counts of fully aligned token tuples by label-equality pattern.

    Keys are canonical set partitions of version indices: tuples of tuples,
    blocks sorted by first member. For three versions A, B, C the keys are
    ((0,1,2),) all agree, ((0,),(1,),(2,)) all disagree, ((0,1),(2,)) A,B vs
    C, and so on.
    """

    version_names: tuple[str, ...]
    counts: dict[tuple[tuple[int, ...], ...], int]

    @property
    def aligned_total(self) -> int:
        return sum(self.counts.values())

    @property
    def all_agree(self) -> int:
        n = len(self.version_names)
        return self.counts.get((tuple(range(n)),), 0)

    @property
    def all_disagree(self) -> int:
        n = len(self.version_names)
        return self.counts.get(tuple((i,) for i in range(n)), 0)

    def bucket(self, *blocks: Iterable[int]) -> int:
        return self.counts.get(partition_key(blocks), 0)


@dataclass(frozen=True)
class Decision:
    """One human adjudication outcome for a diff record."""

    diff_id: str
    chosen_label: str
    chooser: str
    timestamp: str  # RFC 3339
    note: str | None = None

    def to_json(self) -> str:
        obj = {
            "diff_id": self.diff_id,
            "chosen_label": self.chosen_label,
            "chooser": self.chooser,
            "timestamp": self.timestamp,
            "note": self.note,
        }
        return json.dumps(obj, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "Decision":
        obj = json.loads(line)
        return cls(
            diff_id=obj["diff_id"],
            chosen_label=obj["chosen_label"],
            chooser=obj.get("chooser", ""),
            timestamp=obj.get("timestamp", ""),
            note=obj.get("note"),
        )


def partition_key(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


def _flatten(doc: Document) -> list[tuple[int, int, Token]]:
    out = []
    for s_idx, sent in enumerate(doc.sentences):
        for t_idx, tok in enumerate(sent.tokens):
            out.append((s_idx, t_idx, tok))
    return out


def _match_pairs(a: list[str], b: list[str]) -> dict[int, int]:
    """Order-preserving matching of equal surfaces (index in a -> index in b)."""
    matcher = difflib.SequenceMatcher(a=a, b=b, autojunk=False)
    pairs: dict[int, int] = {}
    for block in matcher.get_matching_blocks():
        for k in range(block.size):
            pairs[block.a + k] = block.b + k
    return pairs


def align(versions: Sequence[Corpus]) -> TokenAlignment:
    """Per-document surface alignment of N corpus versions against the first.

    Identically tokenized versions align one-for-one with nothing unaligned.
    Document structure is assumed stable: differing document counts are an
    error, retokenization within documents is not.
    """
    if len(versions) < 2:
        raise ValueError("alignment needs at least 2 versions")
    counts = [len(v) for v in versions]
    if len(set(counts)) != 1:
        raise DocumentCountMismatch(counts)

    doc_alignments: list[DocumentAlignment] = []
    for d in range(counts[0]):
        flats = [_flatten(v.documents[d]) for v in versions]
        surfaces = [[tok.surface for _, _, tok in flat] for flat in flats]
        maps = [_match_pairs(surfaces[0], surfaces[k]) for k in range(1, len(versions))]
        tuples = []
        for i0 in range(len(surfaces[0])):
            if all(i0 in m for m in maps):
                tuples.append((i0, *(m[i0] for m in maps)))
        used = [set() for _ in versions]
        for tup in tuples:
            for v, idx in enumerate(tup):
                used[v].add(idx)
        unaligned = tuple(
            tuple(i for i in range(len(surfaces[v])) if i not in used[v])
            for v in range(len(versions))
        )
        doc_alignments.append(DocumentAlignment(tuple(tuples), unaligned))
    return TokenAlignment(len(versions), tuple(doc_alignments))


def _normalized_label_strings(corpus: Corpus) -> list[list[str]]:
    """Per document: flat list of BIO-normalized label strings (repair reading)."""
    out = []
    for doc in corpus.documents:
        flat: list[str] = []
        for s_idx, sent in enumerate(doc.sentences):
            mentions = extract_mentions(
                sent, EncodingScheme.BIO, doc.doc_index, s_idx, repair=True
            )
            flat.extend(str(lab) for lab in encode_labels(mentions, len(sent), EncodingScheme.BIO))
        out.append(flat)
    return out


def _raw_label_strings(corpus: Corpus) -> list[list[str]]:
    return [
        [str(tok.label) for _, _, tok in _flatten(doc)]
        for doc in corpus.documents
    ]


def _labels_for(versions: Sequence[Corpus], normalize: bool) -> list[list[list[str]]]:
    fn = _normalized_label_strings if normalize else _raw_label_strings
    return [fn(v) for v in versions]


def _pivot_coords(doc: Document) -> list[tuple[int, int]]:
    return [(s_idx, t_idx) for s_idx, t_idx, _ in _flatten(doc)]


def make_diff_id(doc_index: int, sentence_index: int, token_index: int, surface: str) -> str:
    payload = f"{doc_index}:{sentence_index}:{token_index}:{surface}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def diff_pair(
    a: Corpus,
    b: Corpus,
    *,
    names: tuple[str, str] = ("a", "b"),
    normalize: bool = True,
) -> tuple[int, list[DiffRecord]]:
    """Count and list aligned token positions whose labels differ.

    For identically tokenized versions the count is symmetric and independent
    of argument order (only the pivot coordinates change). Retokenized
    regions are excluded from the count and reported via ``align``.
    """
    count, records = diff_versions([a, b], names=list(names), normalize=normalize)
    return count, records


def diff_versions(
    versions: Sequence[Corpus], *, names: list[str], normalize: bool
) -> tuple[int, list[DiffRecord]]:
    alignment = align(versions)
    labels = _labels_for(versions, normalize)
    records: list[DiffRecord] = []
    pivot = versions[0]
    for d, doc_align in enumerate(alignment.documents):
        coords = _pivot_coords(pivot.documents[d])
        flat0 = _flatten(pivot.documents[d])
        for tup in doc_align.tuples:
            labs = [labels[v][d][idx] for v, idx in enumerate(tup)]
            if len(set(labs)) > 1:
                s_idx, t_idx = coords[tup[0]]
                surface = flat0[tup[0]][2].surface
                records.append(
                    DiffRecord(
                        diff_id=make_diff_id(d, s_idx, t_idx, surface),
                        doc_index=d,
                        sentence_index=s_idx,
                        token_index=t_idx,
                        surface=surface,
                        labels=tuple(zip(names, labs)),
                    )
                )
    return len(records), records


def agreement(
    versions: Sequence[Corpus],
    *,
    names: Sequence[str] | None = None,
    normalize: bool = True,
) -> AgreementPartition:
    """Assign every fully aligned token tuple to a label-equality partition."""
    if names is None:
        names = [f"v{i}" for i in range(len(versions))]
    alignment = align(versions)
    labels = _labels_for(versions, normalize)
    counts: dict[tuple[tuple[int, ...], ...], int] = {}
    for d, doc_align in enumerate(alignment.documents):
        for tup in doc_align.tuples:
            labs = [labels[v][d][idx] for v, idx in enumerate(tup)]
            blocks: dict[str, list[int]] = {}
            for v, lab in enumerate(labs):
                blocks.setdefault(lab, []).append(v)
            key = partition_key(blocks.values())
            counts[key] = counts.get(key, 0) + 1
    return AgreementPartition(tuple(names), counts)


def export_disagreements(
    records: list[DiffRecord],
    versions: Sequence[Corpus],
    *,
    names: Sequence[str],
    context_window: int = 3,
) -> str:
    """Render diff records as JSON lines with sentence-clipped token context.

    Each line carries a stable content-addressed ``diff_id``, the pivot
    location, the per-version labels, and up to ``context_window`` tokens of
    context on each side of the disputed token (``context_offset`` points at
    it within the list).
    """
    alignment = align(versions)
    labels = _labels_for(versions, normalize=True)
    pivot = versions[0]

    # pivot flat index -> aligned tuple, per document
    tuple_by_pivot: list[dict[int, tuple[int, ...]]] = [
        {tup[0]: tup for tup in doc_align.tuples} for doc_align in alignment.documents
    ]
    flat_index_of: list[dict[tuple[int, int], int]] = []
    for doc in pivot.documents:
        flat_index_of.append(
            {(s, t): i for i, (s, t, _) in enumerate(_flatten(doc))}
        )

    lines = []
    for rec in sorted(records, key=lambda r: (r.doc_index, r.sentence_index, r.token_index)):
        d = rec.doc_index
        sent = pivot.documents[d].sentences[rec.sentence_index]
        lo = max(0, rec.token_index - context_window)
        hi = min(len(sent), rec.token_index + context_window + 1)
        context = []
        for t in range(lo, hi):
            flat_idx = flat_index_of[d][(rec.sentence_index, t)]
            tok_labels: dict[str, str] = {}
            tup = tuple_by_pivot[d].get(flat_idx)
            if tup is not None:
                for v, idx in enumerate(tup):
                    tok_labels[names[v]] = labels[v][d][idx]
            else:
                tok_labels[names[0]] = labels[0][d][flat_idx]
            context.append({"surface": sent.tokens[t].surface, "labels": tok_labels})
        obj = {
            "diff_id": rec.diff_id,
            "doc_index": rec.doc_index,
            "sentence_index": rec.sentence_index,
            "token_index": rec.token_index,
            "surface": rec.surface,
            "labels": rec.labels_dict,
            "context": context,
            "context_offset": rec.token_index - lo,
        }
        lines.append(json.dumps(obj, ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def apply_decisions(
    base: Corpus,
    decisions: Sequence[Decision],
    records: Sequence[DiffRecord],
    *,
    encoding: EncodingScheme = EncodingScheme.BIO,
) -> Corpus:
    """Replace decided token labels in the pivot-version corpus.

    Later decisions for the same diff_id supersede earlier ones. The edit set
    is atomic: if the result would introduce any invalid transition that the
    base did not already have, nothing is applied.
    """
    by_id = {rec.diff_id: rec for rec in records}
    latest: dict[str, Decision] = {}
    for dec in decisions:
        if dec.diff_id not in by_id:
            raise UnknownDiffId(dec.diff_id)
        latest[dec.diff_id] = dec

    result = base
    for diff_id, dec in latest.items():
        rec = by_id[diff_id]
        try:
            tok = (
                result.documents[rec.doc_index]
                .sentences[rec.sentence_index]
                .tokens[rec.token_index]
            )
        except IndexError:
            raise BadLocation(
                f"decision {diff_id}: no token at doc {rec.doc_index}, "
                f"sentence {rec.sentence_index}, token {rec.token_index}"
            ) from None
        if tok.surface != rec.surface:
            raise BadLocation(
                f"decision {diff_id}: surface {tok.surface!r} does not match "
                f"record surface {rec.surface!r}; is this the pivot version?"
            )
        result = with_token_label(
            result, rec.doc_index, rec.sentence_index, rec.token_index,
            Label.parse(dec.chosen_label),
        )

    before = {
        (v.doc_index, v.sentence_index, v.token_index)
        for v in validate_transitions(base, encoding)
    }
    introduced = [
        v
        for v in validate_transitions(result, encoding)
        if (v.doc_index, v.sentence_index, v.token_index) not in before
    ]
    if introduced:
        raise WouldCreateInvalidTransition(introduced)
    return result


def read_disagreement_file(source) -> list[dict]:
    """Load an exported disagreement file (JSON lines) back into dicts."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def records_from_dicts(items: Iterable[dict]) -> list[DiffRecord]:
    """Rebuild DiffRecords from exported disagreement objects."""
    out = []
    for obj in items:
        out.append(
            DiffRecord(
                diff_id=obj["diff_id"],
                doc_index=obj["doc_index"],
                sentence_index=obj["sentence_index"],
                token_index=obj["token_index"],
                surface=obj["surface"],
                labels=tuple((k, v) for k, v in obj["labels"].items()),
            )
        )
    return out
