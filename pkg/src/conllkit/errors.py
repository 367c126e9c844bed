"""Exception types shared across the toolkit.

Every error raised by library code derives from :class:`ConllkitError` so
callers (and the CLI) can map tool failures to a single diagnostic path.
Errors carry structured fields in addition to the formatted message; the
message is always one line.
"""

from __future__ import annotations


class ConllkitError(Exception):
    """Base class for all toolkit errors."""


class MalformedLabel(ConllkitError):
    """A label string does not parse as O / B-TYPE / I-TYPE."""

    def __init__(self, text: str, line_number: int | None = None):
        where = f" at line {line_number}" if line_number is not None else ""
        super().__init__(f"malformed label {text!r}{where}")
        self.text = text
        self.line_number = line_number


class RaggedRow(ConllkitError):
    """A token row has a different column count than the rest of the file."""

    def __init__(self, line_number: int, expected: int, actual: int):
        super().__init__(
            f"line {line_number}: expected {expected} columns, got {actual}"
        )
        self.line_number = line_number
        self.expected = expected
        self.actual = actual


class InvalidSequence(ConllkitError):
    """A label sequence violates its declared encoding scheme."""

    def __init__(self, message: str, location: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.location = location  # (doc_index, sentence_index, token_index)


class EncodingInvalid(ConllkitError):
    """A corpus failed transition validation where validity was required."""

    def __init__(self, which: str, violations):
        first = violations[0]
        super().__init__(
            f"{which} corpus has {len(violations)} invalid label transition(s); "
            f"first: {first}"
        )
        self.which = which
        self.violations = list(violations)


class TokenizationMismatch(ConllkitError):
    """Two corpora that must share tokenization differ; reports the first difference."""

    def __init__(self, message: str, doc_index: int | None = None,
                 sentence_index: int | None = None, token_index: int | None = None):
        super().__init__(message)
        self.doc_index = doc_index
        self.sentence_index = sentence_index
        self.token_index = token_index


class DocumentCountMismatch(ConllkitError):
    """Corpus versions to be aligned have differing document counts."""

    def __init__(self, counts):
        super().__init__(f"document counts differ across versions: {list(counts)}")
        self.counts = list(counts)


class UnknownDiffId(ConllkitError):
    """A decision references a diff_id absent from the disagreement set."""

    def __init__(self, diff_id: str):
        super().__init__(f"unknown diff_id {diff_id!r}")
        self.diff_id = diff_id


class WouldCreateInvalidTransition(ConllkitError):
    """Applying an edit would introduce label transitions that validate dirty."""

    def __init__(self, violations):
        spots = ", ".join(
            f"doc {v.doc_index} sent {v.sentence_index} tok {v.token_index}"
            for v in violations[:5]
        )
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"edit would create invalid transition(s) at: {spots}{more}")
        self.violations = list(violations)


class BadLocation(ConllkitError):
    """An edit references a document/sentence/token that does not exist or does not fit."""


class SurfaceMismatch(ConllkitError):
    """An edit's expected surface differs from the corpus; the patch is stale."""

    def __init__(self, expected: str, actual: str, location: str):
        super().__init__(
            f"surface mismatch at {location}: patch expects {expected!r}, corpus has {actual!r}"
        )
        self.expected = expected
        self.actual = actual


class BadPage(ConllkitError):
    """Pagination parameters out of range."""
