"""conllkit: audit, score, diff, repair, and adjudicate CoNLL-03 NER corpora."""

from .conll_io import (
    ColumnSpec,
    ParseReport,
    TransitionViolation,
    conlleval_repair,
    convert_encoding,
    parse_corpus,
    parse_file,
    read_metadata_sidecar,
    serialize_corpus,
    validate_transitions,
    write_file,
)
from .diffing import (
    AgreementPartition,
    Decision,
    DiffRecord,
    TokenAlignment,
    agreement,
    align,
    apply_decisions,
    diff_pair,
    export_disagreements,
)
from .errors import (
    BadLocation,
    BadPage,
    ConllkitError,
    DocumentCountMismatch,
    EncodingInvalid,
    InvalidSequence,
    MalformedLabel,
    RaggedRow,
    SurfaceMismatch,
    TokenizationMismatch,
    UnknownDiffId,
    WouldCreateInvalidTransition,
)
from .model import (
    Corpus,
    DocFormat,
    DocMetadata,
    Document,
    Domain,
    EncodingScheme,
    Label,
    LabelKind,
    Mention,
    Sentence,
    Token,
    corpus_mentions,
    encode_labels,
    extract_mentions,
)
from .repair import (
    Candidate,
    RepairKind,
    RepairOp,
    RepairStats,
    apply_patch,
    detect_headline_boundary_candidates,
    detect_hyphen_candidates,
    parse_patch,
    patch_stats,
)
from .scoring import (
    CensusReport,
    ScoreReport,
    SeenSplit,
    census,
    score,
    score_stratified,
    seen_unseen_recall,
)
from .taxonomy import (
    ErrorCategory,
    ErrorCountRow,
    ErrorRecord,
    classify_errors,
    count_mention_errors,
    error_summary,
)

__version__ = "0.1.0"
