"""Preposition-error typing and corpus filtering.

Edits are classified as preposition replacement / missing / unnecessary either
by trusting an annotated type string (R:PREP, M:PREP, U:PREP) or, for
alignment-derived edits, by membership of the edited tokens in a closed-class
preposition lexicon.  Multi-token preposition phrases ("in front of") fall
into Other; that is a documented limitation of the lexicon approach.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .align import Edit, align
from .gec_ingest import ParallelPair

# Closed-class single-token English prepositions.
DEFAULT_PREPOSITIONS = (
    "about", "above", "across", "after", "against", "along", "among",
    "around", "at", "before", "behind", "below", "beneath", "beside",
    "between", "beyond", "by", "despite", "down", "during", "except",
    "for", "from", "in", "inside", "into", "like", "near", "of", "off",
    "on", "onto", "out", "outside", "over", "past", "since", "through",
    "throughout", "till", "to", "toward", "towards", "under", "underneath",
    "until", "up", "upon", "with", "within", "without",
)

_TRUSTED_TYPES = {
    "R:PREP": "ReplacementPrep",
    "M:PREP": "MissingPrep",
    "U:PREP": "UnnecessaryPrep",
}


class LexiconError(ValueError):
    """Malformed or empty preposition lexicon."""


class ErrorType(enum.Enum):
    REPLACEMENT_PREP = "ReplacementPrep"
    MISSING_PREP = "MissingPrep"
    UNNECESSARY_PREP = "UnnecessaryPrep"
    OTHER = "Other"

    @property
    def is_preposition(self) -> bool:
        return self is not ErrorType.OTHER


@dataclass(frozen=True)
class PrepositionLexicon:
    """A set of lowercase single-token prepositions."""

    entries: frozenset[str]

    def __post_init__(self) -> None:
        if not self.entries:
            raise LexiconError("lexicon is empty")
        for entry in self.entries:
            if not entry or entry != entry.lower() or any(c.isspace() for c in entry):
                raise LexiconError(f"bad lexicon entry {entry!r}")

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.entries

    @classmethod
    def default(cls) -> "PrepositionLexicon":
        return cls(entries=frozenset(DEFAULT_PREPOSITIONS))


def load_lexicon(text: str, *, source: str = "<lexicon>") -> PrepositionLexicon:
    """Parse a lexicon file: one token per line, '#' starts a comment."""
    entries = set()
    for line in text.split("\n"):
        token = line.split("#", 1)[0].strip()
        if not token:
            continue
        if " " in token or "\t" in token:
            raise LexiconError(
                f"{source}: lexicon entries must be single tokens: {token!r}"
            )
        entries.add(token.lower())
    if not entries:
        raise LexiconError(f"{source}: lexicon file contains no entries")
    return PrepositionLexicon(entries=frozenset(entries))


def classify(edit: Edit, lexicon: PrepositionLexicon) -> ErrorType:
    """Type one edit; annotated type strings are trusted over token evidence."""
    if edit.type is not None:
        return ErrorType(_TRUSTED_TYPES.get(edit.type, "Other"))
    src, tgt = edit.src_tokens, edit.tgt_tokens
    if len(src) == 1 and len(tgt) == 1 and src[0] in lexicon and tgt[0] in lexicon:
        return ErrorType.REPLACEMENT_PREP
    if not src and len(tgt) == 1 and tgt[0] in lexicon:
        return ErrorType.MISSING_PREP
    if not tgt and len(src) == 1 and src[0] in lexicon:
        return ErrorType.UNNECESSARY_PREP
    return ErrorType.OTHER


def pair_edits(pair: ParallelPair) -> tuple[Edit, ...]:
    """The pair's annotated edits, or alignment-derived ones if unannotated."""
    if pair.given_edits is not None:
        return pair.given_edits
    return tuple(align(pair.source_tokens, pair.target_tokens))


def select_prep_sentences(
    pairs: Sequence[ParallelPair], lexicon: PrepositionLexicon
) -> list[tuple[ParallelPair, tuple[Edit, ...]]]:
    """Keep exactly the pairs carrying at least one preposition-typed edit.

    Each retained pair is returned with only its preposition edits, in their
    original order.
    """
    selected = []
    for pair in pairs:
        prep_edits = tuple(
            edit for edit in pair_edits(pair) if classify(edit, lexicon).is_preposition
        )
        if prep_edits:
            selected.append((pair, prep_edits))
    return selected
