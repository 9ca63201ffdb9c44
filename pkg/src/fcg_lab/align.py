"""Minimal-cost token alignment between learner and corrected sentences.

Costs are unit insert/delete and substitution 0/1, where two tokens count as
equal when they match case-insensitively.  Case-only differences still emit a
(zero-cost) edit so that replaying the edits reconstructs the target exactly.
Adjacent non-matched operations merge into one Edit, a simplified analog of
rule-based GEC aligners' merge phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class Edit:
    """A contiguous difference between source and target token ranges.

    ``src_start == src_end`` marks an insertion point.  ``type`` carries a raw
    annotation type string when the edit came from an annotated corpus, and is
    None for alignment-derived edits.
    """

    src_start: int
    src_end: int
    tgt_start: int
    tgt_end: int
    src_tokens: tuple[str, ...]
    tgt_tokens: tuple[str, ...]
    type: str | None = None

    def __post_init__(self) -> None:
        if not (0 <= self.src_start <= self.src_end):
            raise ValueError(f"bad source range {self.src_start}..{self.src_end}")
        if not (0 <= self.tgt_start <= self.tgt_end):
            raise ValueError(f"bad target range {self.tgt_start}..{self.tgt_end}")
        if len(self.src_tokens) != self.src_end - self.src_start:
            raise ValueError("src_tokens does not match src range length")
        if len(self.tgt_tokens) != self.tgt_end - self.tgt_start:
            raise ValueError("tgt_tokens does not match tgt range length")
        if not self.src_tokens and not self.tgt_tokens:
            raise ValueError("edit with empty source and target")

    @property
    def is_insertion(self) -> bool:
        return self.src_start == self.src_end


def _sub_cost(a: str, b: str) -> int:
    return 0 if a.lower() == b.lower() else 1


def edit_cost(source_tokens: Sequence[str], target_tokens: Sequence[str]) -> int:
    """Token-level Levenshtein distance with case-insensitive matching."""
    src, tgt = list(source_tokens), list(target_tokens)
    previous = list(range(len(tgt) + 1))
    for i, a in enumerate(src, start=1):
        current = [i] + [0] * len(tgt)
        for j, b in enumerate(tgt, start=1):
            current[j] = min(
                previous[j - 1] + _sub_cost(a, b),
                previous[j] + 1,
                current[j - 1] + 1,
            )
        previous = current
    return previous[len(tgt)]


def align(source_tokens: Sequence[str], target_tokens: Sequence[str]) -> list[Edit]:
    """Extract merged edits from a minimal-cost alignment.

    Deterministic: the traceback prefers the diagonal (match/substitution)
    over delete over insert, which places edits leftmost among equal-cost
    alignments.
    """
    src, tgt = list(source_tokens), list(target_tokens)
    n, m = len(src), len(tgt)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dist[i][j] = min(
                dist[i - 1][j - 1] + _sub_cost(src[i - 1], tgt[j - 1]),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )

    # Traceback; ops are read back-to-front: M match, S substitution
    # (includes zero-cost case-only differences), D delete, I insert.
    ops: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + _sub_cost(
            src[i - 1], tgt[j - 1]
        ):
            ops.append("M" if src[i - 1] == tgt[j - 1] else "S")
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append("D")
            i -= 1
        else:
            ops.append("I")
            j -= 1
    ops.reverse()

    edits: list[Edit] = []
    i = j = 0
    run_start: tuple[int, int] | None = None
    for op in ops + ["M"]:
        if op == "M":
            if run_start is not None:
                si, sj = run_start
                edits.append(
                    Edit(
                        src_start=si,
                        src_end=i,
                        tgt_start=sj,
                        tgt_end=j,
                        src_tokens=tuple(src[si:i]),
                        tgt_tokens=tuple(tgt[sj:j]),
                    )
                )
                run_start = None
            i, j = i + 1, j + 1
        else:
            if run_start is None:
                run_start = (i, j)
            if op == "S":
                i, j = i + 1, j + 1
            elif op == "D":
                i += 1
            else:
                j += 1
    return edits


def apply_edits(source_tokens: Sequence[str], edits: Sequence[Edit]) -> list[str]:
    """Replay edits left-to-right on the source, producing the target tokens."""
    ordered = sorted(edits, key=lambda e: (e.src_start, e.src_end))
    for prev, cur in zip(ordered, ordered[1:]):
        if prev.src_end > cur.src_start:
            raise ValueError(
                f"overlapping edits at {prev.src_start}..{prev.src_end} and "
                f"{cur.src_start}..{cur.src_end}"
            )
    result: list[str] = []
    pos = 0
    for edit in ordered:
        if edit.src_end > len(source_tokens):
            raise ValueError(
                f"edit range {edit.src_start}..{edit.src_end} out of bounds for "
                f"{len(source_tokens)} tokens"
            )
        result.extend(source_tokens[pos : edit.src_start])
        result.extend(edit.tgt_tokens)
        pos = edit.src_end
    result.extend(source_tokens[pos:])
    return result
