"""Feedback comment generation over learner-English error spans.

Corpus handling (FCG TSV with character-offset spans), GEC ingestion (M2 and
parallel TSV), token-level alignment, preposition-error selection, a
retrieval comment generator plus an external-generator protocol client,
pseudo-data augmentation with the combined/multi-stage training regimes, and
the BLEU/F1/agreement evaluation stack.
"""

from .align import Edit, align, apply_edits, edit_cost
from .augment import (
    BALANCED_CAP,
    AugmentError,
    Provenance,
    PseudoSample,
    RegimeSchedules,
    build_pseudo,
    edits_to_spans,
    make_regimes,
    pseudo_corpus,
)
from .corpus import (
    DEFAULT_MARKER,
    Corpus,
    CorpusFormatError,
    Sample,
    Span,
    mark_span,
    parse_fcg,
    serialize_fcg,
    snap_span,
    tokenize,
    unmark_span,
)
from .errtype import (
    DEFAULT_PREPOSITIONS,
    ErrorType,
    LexiconError,
    PrepositionLexicon,
    classify,
    load_lexicon,
    select_prep_sentences,
)
from .evaluation import (
    BleuScore,
    EvalError,
    EvalReport,
    HumanLabel,
    agreement_bins,
    category_table,
    corpus_bleu,
    overlap_stats,
    parse_labels,
    score_outputs,
    sentence_bleu,
    task_f1,
)
from .gec_ingest import (
    GecFormatError,
    ParallelPair,
    parse_m2,
    parse_parallel_tsv,
)
from .generator import (
    PROTOCOL_NAME,
    PROTOCOL_VERSION,
    ExternalClient,
    GeneratorError,
    ProtocolError,
    RetrievalModel,
    generate,
    generate_batch,
    train_retrieval,
)

__all__ = [
    "BALANCED_CAP",
    "DEFAULT_MARKER",
    "DEFAULT_PREPOSITIONS",
    "PROTOCOL_NAME",
    "PROTOCOL_VERSION",
    "AugmentError",
    "BleuScore",
    "Corpus",
    "CorpusFormatError",
    "Edit",
    "ErrorType",
    "EvalError",
    "EvalReport",
    "ExternalClient",
    "GecFormatError",
    "GeneratorError",
    "HumanLabel",
    "LexiconError",
    "ParallelPair",
    "PrepositionLexicon",
    "ProtocolError",
    "Provenance",
    "PseudoSample",
    "RegimeSchedules",
    "RetrievalModel",
    "Sample",
    "Span",
    "agreement_bins",
    "align",
    "apply_edits",
    "build_pseudo",
    "category_table",
    "classify",
    "corpus_bleu",
    "edit_cost",
    "edits_to_spans",
    "generate",
    "generate_batch",
    "load_lexicon",
    "make_regimes",
    "mark_span",
    "overlap_stats",
    "parse_fcg",
    "parse_labels",
    "parse_m2",
    "parse_parallel_tsv",
    "pseudo_corpus",
    "score_outputs",
    "select_prep_sentences",
    "sentence_bleu",
    "serialize_fcg",
    "snap_span",
    "task_f1",
    "tokenize",
    "train_retrieval",
    "unmark_span",
]

__version__ = "0.1.0"
