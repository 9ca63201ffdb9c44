"""Ingestion of parallel GEC corpora: plain parallel TSV and the M2 format.

Both paths yield ParallelPair records.  M2 blocks are ``S <tokens>`` followed
by ``A start end|||type|||correction|||required|||comment|||annotator`` lines;
a blank line terminates a block.  Target sentences are reconstructed by
applying the block's edits to the source with cumulative offset adjustment,
and the type strings are carried verbatim on the resulting edits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .align import Edit


class GecFormatError(ValueError):
    """Malformed parallel TSV or M2 input."""


@dataclass(frozen=True)
class ParallelPair:
    """A source/corrected sentence pair, optionally with pre-typed edits."""

    source_tokens: tuple[str, ...]
    target_tokens: tuple[str, ...]
    given_edits: tuple[Edit, ...] | None = None
    origin: str = "<string>:0"


def _lines(text: str, source: str) -> list[str]:
    if text.startswith("﻿"):
        raise GecFormatError(f"{source}: byte order mark not allowed")
    if "\r" in text:
        raise GecFormatError(f"{source}: carriage returns not allowed (LF only)")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def parse_parallel_tsv(text: str, *, source: str = "<string>") -> list[ParallelPair]:
    """Parse ``source TAB corrected`` rows into pairs without pre-typed edits."""
    pairs = []
    for lineno, line in enumerate(_lines(text, source), start=1):
        fields = line.split("\t")
        if len(fields) != 2:
            raise GecFormatError(
                f"{source}:{lineno}: expected 2 tab-separated fields, got "
                f"{len(fields)}"
            )
        src, tgt = fields
        pairs.append(
            ParallelPair(
                source_tokens=tuple(src.split()),
                target_tokens=tuple(tgt.split()),
                origin=f"{source}:{lineno}",
            )
        )
    return pairs


def _parse_a_line(line: str, where: str) -> tuple[int, int, str, tuple[str, ...], int]:
    parts = line.split("|||")
    if len(parts) != 6:
        raise GecFormatError(
            f"{where}: expected 6 |||-separated fields in A line, got {len(parts)}"
        )
    head, edit_type, correction, _required, _comment, annotator = parts
    head_fields = head.split(" ")
    if len(head_fields) != 3 or head_fields[0] != "A":
        raise GecFormatError(f"{where}: malformed A line head {head!r}")
    try:
        start, end = int(head_fields[1]), int(head_fields[2])
    except ValueError:
        raise GecFormatError(f"{where}: non-integer range in A line") from None
    try:
        annotator_id = int(annotator)
    except ValueError:
        raise GecFormatError(f"{where}: non-integer annotator id {annotator!r}") from None
    replacement = () if correction == "-NONE-" else tuple(correction.split())
    return start, end, edit_type, replacement, annotator_id


def _build_pair(
    source_tokens: tuple[str, ...],
    raw_edits: list[tuple[int, int, str, tuple[str, ...]]],
    origin: str,
) -> ParallelPair:
    raw_edits.sort(key=lambda e: (e[0], e[1]))
    for (_, prev_end, _, _), (cur_start, _, _, _) in zip(raw_edits, raw_edits[1:]):
        if prev_end > cur_start:
            raise GecFormatError(f"{origin}: overlapping edits from one annotator")
    target: list[str] = list(source_tokens)
    edits: list[Edit] = []
    offset = 0
    for start, end, edit_type, replacement in raw_edits:
        if not (0 <= start <= end <= len(source_tokens)):
            raise GecFormatError(
                f"{origin}: edit range {start} {end} out of bounds for "
                f"{len(source_tokens)} source tokens"
            )
        target[start + offset : end + offset] = replacement
        edits.append(
            Edit(
                src_start=start,
                src_end=end,
                tgt_start=start + offset,
                tgt_end=start + offset + len(replacement),
                src_tokens=source_tokens[start:end],
                tgt_tokens=replacement,
                type=edit_type,
            )
        )
        offset += len(replacement) - (end - start)
    return ParallelPair(
        source_tokens=source_tokens,
        target_tokens=tuple(target),
        given_edits=tuple(edits),
        origin=origin,
    )


def parse_m2(
    text: str, *, annotator: int = 0, source: str = "<m2>"
) -> list[ParallelPair]:
    """Parse M2 blocks, keeping edits of one annotator id (default 0).

    Edits whose type contains "noop" are ignored.  Trailing blank lines are
    tolerated; an S line inside a block or an A line outside one is an error.
    """
    pairs = []
    source_tokens: tuple[str, ...] | None = None
    raw_edits: list[tuple[int, int, str, tuple[str, ...]]] = []
    block_no = 0
    block_where = source

    def flush() -> None:
        nonlocal source_tokens, raw_edits
        if source_tokens is not None:
            pairs.append(_build_pair(source_tokens, raw_edits, block_where))
            source_tokens, raw_edits = None, []

    for lineno, line in enumerate(_lines(text, source), start=1):
        where = f"{source}:{lineno}"
        if line == "":
            flush()
        elif line == "S" or line.startswith("S "):
            if source_tokens is not None:
                raise GecFormatError(f"{where}: S line inside an open block")
            source_tokens = tuple(line[2:].split()) if len(line) > 1 else ()
            block_no += 1
            block_where = f"{source}:block{block_no}"
        elif line.startswith("A "):
            if source_tokens is None:
                raise GecFormatError(f"{where}: A line outside a block")
            start, end, edit_type, replacement, annotator_id = _parse_a_line(
                line, where
            )
            if "noop" in edit_type:
                continue
            if annotator_id == annotator:
                raw_edits.append((start, end, edit_type, replacement))
        else:
            raise GecFormatError(f"{where}: unrecognized line {line!r}")
    flush()
    return pairs
