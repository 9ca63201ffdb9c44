"""Pseudo feedback-comment data built by self-labeling preposition errors.

Selected error sentences are converted to (sentence, span) inputs: token
edit ranges become character spans, with missing-preposition insertion points
widened to a one-token window on each side.  A trained generator then labels
the marked sentences.  Abstentions are dropped; an optional cap keeps the
first N samples in input order (the balanced setting).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence

from .align import Edit
from .corpus import Corpus, Sample, Span, token_offsets
from .gec_ingest import ParallelPair
from .generator import GeneratorModel, generate

BALANCED_CAP = 5000


class AugmentError(ValueError):
    """Pseudo-data construction failure."""


@dataclass(frozen=True)
class Provenance:
    """Where a pseudo sample came from: corpus, edit, generator, regime."""

    source_id: str
    edit: Edit
    generator_id: str
    regime: str = "none"


@dataclass(frozen=True)
class PseudoSample:
    sample: Sample
    provenance: Provenance


def edits_to_spans(
    pair: ParallelPair, prep_edits: Sequence[Edit], *, window: int = 1
) -> list[tuple[str, Span]]:
    """Character spans on the learner sentence, one per preposition edit.

    Replacement and unnecessary edits span their own source tokens.  A
    missing-preposition edit is zero-width in the source, so its span covers
    ``window`` tokens on each side of the insertion point, clamped to the
    sentence.
    """
    sentence = " ".join(pair.source_tokens)
    offsets = token_offsets(sentence) if pair.source_tokens else []
    spans = []
    for edit in prep_edits:
        if edit.is_insertion:
            if not pair.source_tokens:
                raise AugmentError(
                    f"{pair.origin}: cannot window an insertion in an empty sentence"
                )
            if edit.src_start > len(offsets):
                raise AugmentError(
                    f"{pair.origin}: insertion point {edit.src_start} out of bounds"
                )
            first = max(0, edit.src_start - window)
            last = min(len(offsets) - 1, edit.src_start + window - 1)
        else:
            first = edit.src_start
            last = edit.src_end - 1
            if last >= len(offsets):
                raise AugmentError(
                    f"{pair.origin}: edit range {edit.src_start}..{edit.src_end} "
                    f"out of bounds"
                )
        spans.append((sentence, Span(offsets[first][0], offsets[last][1])))
    return spans


def build_pseudo(
    selected: Sequence[tuple[ParallelPair, Sequence[Edit]]],
    model: GeneratorModel,
    *,
    cap: int | None = None,
    window: int = 1,
    generator_id: str = "retrieval",
    regime: str = "none",
    id_prefix: str = "pseudo",
) -> list[PseudoSample]:
    """Self-label selected error sentences, in deterministic input order.

    The generated comment becomes the pseudo sample's reference comment.
    Abstentions are dropped; with ``cap`` set, only the first ``cap``
    non-abstained samples are kept.
    """
    pseudo: list[PseudoSample] = []
    candidate_no = 0
    for pair, prep_edits in selected:
        for edit, (sentence, span) in zip(
            prep_edits, edits_to_spans(pair, prep_edits, window=window)
        ):
            candidate_no += 1
            if cap is not None and len(pseudo) >= cap:
                return pseudo
            sample = Sample(
                sentence=sentence, span=span, id=f"{id_prefix}:{candidate_no}"
            )
            sample.validate()
            comment = generate(model, sample)
            if comment is None:
                continue
            pseudo.append(
                PseudoSample(
                    sample=replace(sample, reference_comment=comment),
                    provenance=Provenance(
                        source_id=pair.origin,
                        edit=edit,
                        generator_id=generator_id,
                        regime=regime,
                    ),
                )
            )
    return pseudo


def pseudo_corpus(pseudo: Sequence[PseudoSample]) -> Corpus:
    return Corpus(samples=tuple(p.sample for p in pseudo), split_name="pseudo")


@dataclass(frozen=True)
class RegimeSchedules:
    """The two training schedules derived from a pseudo/gold corpus pair."""

    combined: tuple[tuple[Corpus, int], ...]
    multistage: tuple[tuple[Corpus, int], ...]


def make_regimes(pseudo: Corpus, gold: Corpus) -> RegimeSchedules:
    """Build the combined (single pool) and multi-stage (pseudo then gold)
    training schedules; with no pseudo data both degenerate to gold-only."""
    if len(pseudo) == 0:
        gold_only = ((gold, 1),)
        return RegimeSchedules(combined=gold_only, multistage=gold_only)
    merged = Corpus(samples=pseudo.samples + gold.samples, split_name="train")
    return RegimeSchedules(
        combined=((merged, 1),),
        multistage=((pseudo, 0), (gold, 1)),
    )


def _edit_to_json(edit: Edit) -> dict:
    return {
        "src_start": edit.src_start,
        "src_end": edit.src_end,
        "tgt_start": edit.tgt_start,
        "tgt_end": edit.tgt_end,
        "src_tokens": list(edit.src_tokens),
        "tgt_tokens": list(edit.tgt_tokens),
        "type": edit.type,
    }


def _edit_from_json(obj: dict) -> Edit:
    return Edit(
        src_start=obj["src_start"],
        src_end=obj["src_end"],
        tgt_start=obj["tgt_start"],
        tgt_end=obj["tgt_end"],
        src_tokens=tuple(obj["src_tokens"]),
        tgt_tokens=tuple(obj["tgt_tokens"]),
        type=obj["type"],
    )


def write_selected(selected: Sequence[tuple[ParallelPair, Sequence[Edit]]]) -> str:
    """Serialize selected pairs + edits as JSON lines (annotate artifact)."""
    lines = []
    for pair, edits in selected:
        lines.append(
            json.dumps(
                {
                    "origin": pair.origin,
                    "source": list(pair.source_tokens),
                    "target": list(pair.target_tokens),
                    "edits": [_edit_to_json(e) for e in edits],
                },
                sort_keys=True,
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)


def read_selected(text: str) -> list[tuple[ParallelPair, tuple[Edit, ...]]]:
    selected = []
    for line in text.split("\n"):
        if not line:
            continue
        obj = json.loads(line)
        edits = tuple(_edit_from_json(e) for e in obj["edits"])
        pair = ParallelPair(
            source_tokens=tuple(obj["source"]),
            target_tokens=tuple(obj["target"]),
            given_edits=edits,
            origin=obj["origin"],
        )
        selected.append((pair, edits))
    return selected


def write_provenance(pseudo: Sequence[PseudoSample]) -> str:
    """Sidecar JSON lines mapping pseudo sample ids to their provenance."""
    lines = []
    for item in pseudo:
        lines.append(
            json.dumps(
                {
                    "id": item.sample.id,
                    "source": item.provenance.source_id,
                    "generator": item.provenance.generator_id,
                    "regime": item.provenance.regime,
                    "edit": _edit_to_json(item.provenance.edit),
                },
                sort_keys=True,
                ensure_ascii=False,
            )
        )
    return "".join(line + "\n" for line in lines)
