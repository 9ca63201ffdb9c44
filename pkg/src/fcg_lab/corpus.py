"""Span-annotated feedback corpus (FCG TSV) parsing, validation, and marker encoding.

The format is one sample per line: ``sentence TAB start:end [TAB comment]``.
Sentences are pre-tokenized and single-space separated; offsets are 0-based
character offsets (Unicode scalar values, end-exclusive) into the raw sentence
and must land on token boundaries.  Error spans are encoded for sequence
models by inserting a sentinel token immediately before and after the span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

VALID_SPLITS = ("train", "dev", "test", "pseudo", "other")

DEFAULT_MARKER = "***"

_OFFSET_RE = re.compile(r"^(\d+):(\d+)$")


class CorpusFormatError(ValueError):
    """Malformed FCG TSV input or an invalid span/sentence combination."""


@dataclass(frozen=True)
class Span:
    """Character range of an error, start inclusive, end exclusive."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise CorpusFormatError(f"span start must be >= 0, got {self.start}")
        if self.end <= self.start:
            # Zero-width spans are resolved to token windows upstream; they
            # are never representable here.
            raise CorpusFormatError(
                f"span end must be > start, got {self.start}:{self.end}"
            )


@dataclass(frozen=True)
class Sample:
    """One corpus row: a sentence, an error span, and optional comments."""

    sentence: str
    span: Span
    id: str
    reference_comment: str | None = None
    system_comment: str | None = None
    snapped: bool = False

    @property
    def span_text(self) -> str:
        return self.sentence[self.span.start : self.span.end]

    def validate(self) -> None:
        """Check the sentence/span invariants, raising CorpusFormatError."""
        check_sentence(self.sentence)
        check_span(self.sentence, self.span)


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of samples belonging to one split."""

    samples: tuple[Sample, ...]
    split_name: str = "other"

    def __post_init__(self) -> None:
        if self.split_name not in VALID_SPLITS:
            raise CorpusFormatError(
                f"unknown split {self.split_name!r}, expected one of {VALID_SPLITS}"
            )
        seen: set[str] = set()
        for sample in self.samples:
            if sample.id in seen:
                raise CorpusFormatError(f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


def tokenize(sentence: str) -> list[str]:
    """Split a single-space separated sentence into tokens."""
    return sentence.split(" ")


def token_offsets(sentence: str) -> list[tuple[int, int]]:
    """Character (start, end) offsets of each whitespace token."""
    offsets = []
    pos = 0
    for token in tokenize(sentence):
        offsets.append((pos, pos + len(token)))
        pos += len(token) + 1
    return offsets


def check_sentence(sentence: str) -> None:
    if not sentence:
        raise CorpusFormatError("empty sentence")
    if "\t" in sentence:
        raise CorpusFormatError("sentence contains a tab character")
    if sentence != sentence.strip():
        raise CorpusFormatError("sentence has leading or trailing whitespace")
    if "  " in sentence:
        raise CorpusFormatError("sentence is not single-space separated")


def check_span(sentence: str, span: Span) -> None:
    if span.end > len(sentence):
        raise CorpusFormatError(
            f"span {span.start}:{span.end} out of range for sentence of length "
            f"{len(sentence)}"
        )
    starts = {start for start, _ in token_offsets(sentence)}
    ends = {end for _, end in token_offsets(sentence)}
    if span.start not in starts or span.end not in ends:
        raise CorpusFormatError(
            f"span {span.start}:{span.end} does not fall on token boundaries "
            f"of {sentence!r}"
        )


def snap_span(sentence: str, start: int, end: int) -> Span:
    """Widen a character range outward to the nearest token boundaries."""
    if start < 0 or end > len(sentence) or start >= end:
        raise CorpusFormatError(f"span {start}:{end} cannot be snapped")
    offsets = token_offsets(sentence)
    snapped_start = max(s for s, _ in offsets if s <= start)
    snapped_end = min(e for _, e in offsets if e >= end)
    return Span(snapped_start, snapped_end)


def parse_fcg(
    text: str,
    *,
    expect_comments: bool = False,
    snap: bool = False,
    split_name: str = "other",
    source: str = "<string>",
) -> Corpus:
    """Parse FCG TSV text into a Corpus, preserving row order.

    Rows are ``sentence TAB start:end`` with an optional third comment field.
    An empty comment field normalizes to an absent comment.  When
    ``expect_comments`` is set a missing third field is an error.  Spans that
    do not fall on token boundaries are rejected unless ``snap`` is set, in
    which case they are widened outward and the sample is flagged.
    """
    if text.startswith("﻿"):
        raise CorpusFormatError(f"{source}: byte order mark not allowed")
    if "\r" in text:
        raise CorpusFormatError(f"{source}: carriage returns not allowed (LF only)")
    samples = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        where = f"{source}:{lineno}"
        fields = line.split("\t")
        if len(fields) == 2:
            if expect_comments:
                raise CorpusFormatError(f"{where}: missing comment field")
            sentence, offsets = fields
            comment = None
        elif len(fields) == 3:
            sentence, offsets, raw_comment = fields
            comment = raw_comment if raw_comment != "" else None
        else:
            raise CorpusFormatError(
                f"{where}: expected 2 or 3 tab-separated fields, got {len(fields)}"
            )
        match = _OFFSET_RE.match(offsets)
        if match is None:
            raise CorpusFormatError(f"{where}: malformed offsets {offsets!r}")
        start, end = int(match.group(1)), int(match.group(2))
        try:
            check_sentence(sentence)
            span = Span(start, end)
            snapped = False
            try:
                check_span(sentence, span)
            except CorpusFormatError:
                if not snap:
                    raise
                widened = snap_span(sentence, start, end)
                snapped = widened != span
                span = widened
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"{where}: {exc}") from None
        samples.append(
            Sample(
                sentence=sentence,
                span=span,
                id=where,
                reference_comment=comment,
                snapped=snapped,
            )
        )
    return Corpus(samples=tuple(samples), split_name=split_name)


def serialize_fcg(
    corpus: Corpus,
    *,
    with_comments: bool = False,
    comment_field: str = "reference",
) -> str:
    """Render a Corpus back to FCG TSV text (newline-terminated, LF).

    ``comment_field`` selects which comment goes into the third column when
    ``with_comments`` is set; absent comments serialize as an empty field.
    """
    if comment_field not in ("reference", "system"):
        raise ValueError(f"unknown comment_field {comment_field!r}")
    rows = []
    for sample in corpus:
        row = f"{sample.sentence}\t{sample.span.start}:{sample.span.end}"
        if with_comments:
            if comment_field == "reference":
                comment = sample.reference_comment
            else:
                comment = sample.system_comment
            row += "\t" + (comment if comment is not None else "")
        rows.append(row + "\n")
    return "".join(rows)


def span_token_range(sample: Sample) -> tuple[int, int]:
    """Token index range (start, end-exclusive) covered by the sample's span."""
    sample.validate()
    offsets = token_offsets(sample.sentence)
    first = next(i for i, (s, _) in enumerate(offsets) if s == sample.span.start)
    last = next(i for i, (_, e) in enumerate(offsets) if e == sample.span.end)
    return first, last + 1


def mark_span(sample: Sample, marker: str = DEFAULT_MARKER) -> str:
    """Insert the marker token around the sample's span tokens.

    The result has exactly two more tokens than the sentence; removing both
    markers and rejoining with single spaces reproduces the sentence.
    """
    tokens = tokenize(sample.sentence)
    if marker in tokens:
        raise CorpusFormatError(
            f"marker {marker!r} already occurs as a token in {sample.sentence!r}"
        )
    first, after = span_token_range(sample)
    marked = tokens[:first] + [marker] + tokens[first:after] + [marker] + tokens[after:]
    return " ".join(marked)


def unmark_span(marked: str, marker: str = DEFAULT_MARKER) -> tuple[str, Span]:
    """Invert mark_span: recover the original sentence and span."""
    tokens = marked.split(" ")
    positions = [i for i, token in enumerate(tokens) if token == marker]
    if len(positions) != 2:
        raise CorpusFormatError(
            f"expected exactly 2 marker tokens, found {len(positions)}"
        )
    first, second = positions
    if second == first + 1:
        raise CorpusFormatError("markers enclose an empty span")
    rest = [t for i, t in enumerate(tokens) if i not in positions]
    sentence = " ".join(rest)
    offsets = token_offsets(sentence)
    start = offsets[first][0]
    end = offsets[second - 2][1]
    span = Span(start, end)
    check_sentence(sentence)
    check_span(sentence, span)
    return sentence, span


def with_system_comments(corpus: Corpus, comments: list[str | None]) -> Corpus:
    """Return a copy of the corpus with system comments filled elementwise."""
    if len(comments) != len(corpus.samples):
        raise ValueError(
            f"{len(comments)} comments for {len(corpus.samples)} samples"
        )
    samples = tuple(
        replace(sample, system_comment=comment)
        for sample, comment in zip(corpus.samples, comments)
    )
    return Corpus(samples=samples, split_name=corpus.split_name)
