"""Scoring and analysis of generated feedback comments.

Implements a pinned BLEU variant (see BleuScore), the shared-task style
precision/recall/F1 over human correct/incorrect labels, BLEU-vs-label
agreement histograms, exact-match / seen-in-training statistics, and the
error-category tabulation.  Comments are scored case-sensitively on their
whitespace tokens, as distributed.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Sequence

from .corpus import Corpus

MAX_ORDER = 4

CORRECT = "correct"
INCORRECT = "incorrect"


class EvalError(ValueError):
    """Inconsistent evaluation inputs (missing labels, empty corpus, ...)."""


@dataclass(frozen=True)
class BleuScore:
    """Brevity penalty times the geometric mean of modified n-gram precisions.

    ``precisions`` holds orders 1..k for the included orders only: orders
    with zero hypothesis n-grams are excluded and the uniform weights
    renormalize over the rest.  Sentence scoring add-1 smooths orders >= 2;
    corpus scoring aggregates raw clipped counts with no smoothing.
    """

    value: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise EvalError(f"BLEU value out of range: {self.value}")
        if not 0.0 <= self.brevity_penalty <= 1.0:
            raise EvalError(f"brevity penalty out of range: {self.brevity_penalty}")


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def _brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len >= ref_len:
        return 1.0
    if hyp_len == 0:
        return 0.0
    return math.exp(1.0 - ref_len / hyp_len)


def _combine(
    precisions: Sequence[float], bp: float, hyp_len: int, ref_len: int
) -> BleuScore:
    if not precisions or any(p == 0.0 for p in precisions):
        value = 0.0
    else:
        value = bp * math.exp(
            sum(math.log(p) for p in precisions) / len(precisions)
        )
    return BleuScore(
        value=value,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_len=hyp_len,
        ref_len=ref_len,
    )


def sentence_bleu(
    hypothesis_tokens: Sequence[str], reference_tokens: Sequence[str]
) -> BleuScore:
    """Single-reference sentence BLEU with add-1 smoothing for orders >= 2."""
    hyp_len, ref_len = len(hypothesis_tokens), len(reference_tokens)
    bp = _brevity_penalty(hyp_len, ref_len)
    precisions = []
    for order in range(1, MAX_ORDER + 1):
        total = hyp_len - order + 1
        if total <= 0:
            break
        hyp_counts = _ngram_counts(hypothesis_tokens, order)
        ref_counts = _ngram_counts(reference_tokens, order)
        clipped = sum(min(count, ref_counts[g]) for g, count in hyp_counts.items())
        if order == 1:
            precisions.append(clipped / total)
        else:
            precisions.append((clipped + 1) / (total + 1))
    return _combine(precisions, bp, hyp_len, ref_len)


def corpus_bleu(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]]
) -> BleuScore:
    """Corpus BLEU over (hypothesis, reference) token pairs, unsmoothed."""
    if not pairs:
        raise EvalError("corpus_bleu needs at least one pair")
    hyp_len = ref_len = 0
    clipped_totals = [0] * MAX_ORDER
    ngram_totals = [0] * MAX_ORDER
    for hyp, ref in pairs:
        hyp_len += len(hyp)
        ref_len += len(ref)
        for order in range(1, MAX_ORDER + 1):
            total = len(hyp) - order + 1
            if total <= 0:
                continue
            hyp_counts = _ngram_counts(hyp, order)
            ref_counts = _ngram_counts(ref, order)
            clipped_totals[order - 1] += sum(
                min(count, ref_counts[g]) for g, count in hyp_counts.items()
            )
            ngram_totals[order - 1] += total
    precisions = []
    for clipped, total in zip(clipped_totals, ngram_totals):
        if total == 0:
            break
        precisions.append(clipped / total)
    return _combine(precisions, _brevity_penalty(hyp_len, ref_len), hyp_len, ref_len)


@dataclass(frozen=True)
class HumanLabel:
    """A human correct/incorrect judgment of one generated comment."""

    sample_id: str
    label: str

    def __post_init__(self) -> None:
        if self.label not in (CORRECT, INCORRECT):
            raise EvalError(f"label must be correct|incorrect, got {self.label!r}")


def parse_labels(text: str, *, source: str = "<labels>") -> list[HumanLabel]:
    """Parse a labels TSV: ``sample_id TAB correct|incorrect`` per line."""
    labels = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise EvalError(
                f"{source}:{lineno}: expected 2 tab-separated fields, got "
                f"{len(fields)}"
            )
        sample_id, label = fields
        if sample_id in seen:
            raise EvalError(f"{source}:{lineno}: duplicate label for {sample_id!r}")
        seen.add(sample_id)
        labels.append(HumanLabel(sample_id=sample_id, label=label))
    return labels


def _label_map(labels: Sequence[HumanLabel]) -> dict[str, str]:
    by_id: dict[str, str] = {}
    for label in labels:
        if label.sample_id in by_id:
            raise EvalError(f"duplicate label for sample {label.sample_id!r}")
        by_id[label.sample_id] = label.label
    return by_id


@dataclass(frozen=True)
class F1Block:
    precision: float
    recall: float
    f1: float
    n_generated: int
    n_correct: int
    n_total: int


def task_f1(outputs: Corpus, labels: Sequence[HumanLabel]) -> F1Block:
    """Precision/recall/F1 from correct/incorrect labels of generated outputs.

    Precision is correct/generated (0 when nothing was generated), recall is
    correct/total over the whole test corpus; abstained samples count against
    recall only.  Every generated output must carry a label and labels may
    only name generated outputs.
    """
    by_id = _label_map(labels)
    ids = {sample.id for sample in outputs}
    for sample_id in by_id:
        if sample_id not in ids:
            raise EvalError(f"label for unknown sample {sample_id!r}")
    n_generated = n_correct = 0
    for sample in outputs:
        if sample.system_comment is None:
            if sample.id in by_id:
                raise EvalError(
                    f"label for sample {sample.id!r} which has no generated output"
                )
            continue
        if sample.id not in by_id:
            raise EvalError(f"generated sample {sample.id!r} has no label")
        n_generated += 1
        if by_id[sample.id] == CORRECT:
            n_correct += 1
    n_total = len(outputs)
    precision = n_correct / n_generated if n_generated else 0.0
    recall = n_correct / n_total if n_total else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return F1Block(
        precision=precision,
        recall=recall,
        f1=f1,
        n_generated=n_generated,
        n_correct=n_correct,
        n_total=n_total,
    )


@dataclass(frozen=True)
class AgreementBin:
    lo: float
    hi: float
    n_correct: int
    n_incorrect: int


@dataclass(frozen=True)
class AgreementBins:
    """Histogram of human labels per BLEU bin, plus two headline statistics:
    correct samples scoring below 0.5, and the correct fraction above 0.6."""

    bins: tuple[AgreementBin, ...]
    n_labeled: int
    correct_below_half: int
    correct_below_half_fraction: float
    above_06_total: int
    above_06_correct_fraction: float


def agreement_bins(
    scored: Sequence[tuple[str, float]],
    labels: Sequence[HumanLabel],
    *,
    bin_width: float = 0.1,
) -> AgreementBins:
    """Bin per-sample BLEU scores by label into [k*w, (k+1)*w) buckets.

    The top bucket is closed so a score of exactly 1.0 lands in it.  Labels
    must cover exactly the scored samples.
    """
    if not 0.0 < bin_width <= 1.0:
        raise EvalError(f"bin width must be in (0, 1], got {bin_width}")
    by_id = _label_map(labels)
    scored_ids = {sample_id for sample_id, _ in scored}
    if len(scored_ids) != len(scored):
        raise EvalError("duplicate sample id in scored inputs")
    for sample_id in by_id:
        if sample_id not in scored_ids:
            raise EvalError(f"label for unscored sample {sample_id!r}")
    n_bins = math.ceil(round(1.0 / bin_width, 9))
    counts = [[0, 0] for _ in range(n_bins)]
    correct_below_half = 0
    above = above_correct = 0
    for sample_id, score in scored:
        if sample_id not in by_id:
            raise EvalError(f"scored sample {sample_id!r} has no label")
        if not 0.0 <= score <= 1.0:
            raise EvalError(f"score out of range for {sample_id!r}: {score}")
        correct = by_id[sample_id] == CORRECT
        # round before flooring so scores sitting on a bin edge (0.3 / 0.1
        # = 2.999...96 in floats) land in the right bucket
        k = min(n_bins - 1, int(round(score / bin_width, 9) // 1))
        counts[k][0 if correct else 1] += 1
        if correct and score < 0.5:
            correct_below_half += 1
        if score > 0.6:
            above += 1
            if correct:
                above_correct += 1
    bins = tuple(
        AgreementBin(
            lo=k * bin_width,
            hi=(k + 1) * bin_width,
            n_correct=n_correct,
            n_incorrect=n_incorrect,
        )
        for k, (n_correct, n_incorrect) in enumerate(counts)
    )
    n_labeled = len(scored)
    return AgreementBins(
        bins=bins,
        n_labeled=n_labeled,
        correct_below_half=correct_below_half,
        correct_below_half_fraction=(
            correct_below_half / n_labeled if n_labeled else 0.0
        ),
        above_06_total=above,
        above_06_correct_fraction=above_correct / above if above else 0.0,
    )


@dataclass(frozen=True)
class OverlapStats:
    """Exact-match and seen-in-training statistics over a test corpus."""

    exact_match_count: int
    exact_match_fraction: float
    n_refs_seen: int
    n_seen_and_correct: int | None


def overlap_stats(
    test: Corpus, train: Corpus, labels: Sequence[HumanLabel] | None = None
) -> OverlapStats:
    """Count verbatim system/reference matches and references seen in training.

    Comment comparison trims trailing whitespace only.  ``n_seen_and_correct``
    needs labels; it is None when they are not supplied.
    """
    train_comments = set()
    for sample in train:
        if sample.reference_comment is None:
            raise EvalError(f"training sample {sample.id} has no reference comment")
        train_comments.add(sample.reference_comment.rstrip())
    by_id = _label_map(labels) if labels is not None else None
    exact = seen = seen_correct = 0
    for sample in test:
        if sample.reference_comment is None:
            raise EvalError(f"test sample {sample.id} has no reference comment")
        reference = sample.reference_comment.rstrip()
        if (
            sample.system_comment is not None
            and sample.system_comment.rstrip() == reference
        ):
            exact += 1
        if reference in train_comments:
            seen += 1
            if by_id is not None and by_id.get(sample.id) == CORRECT:
                seen_correct += 1
    return OverlapStats(
        exact_match_count=exact,
        exact_match_fraction=exact / len(test) if len(test) else 0.0,
        n_refs_seen=seen,
        n_seen_and_correct=seen_correct if by_id is not None else None,
    )


@dataclass(frozen=True)
class CategoryRow:
    category: str
    count: int
    fraction: float


def category_table(assignments: Sequence[tuple[str, str]]) -> list[CategoryRow]:
    """Tabulate analyst-assigned error categories, most frequent first."""
    seen: set[str] = set()
    counts: Counter = Counter()
    for sample_id, category in assignments:
        if sample_id in seen:
            raise EvalError(f"duplicate category assignment for {sample_id!r}")
        seen.add(sample_id)
        counts[category] += 1
    total = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [
        CategoryRow(category=category, count=count, fraction=count / total)
        for category, count in ranked
    ]


def parse_categories(text: str, *, source: str = "<categories>") -> list[tuple[str, str]]:
    """Parse a category TSV: ``sample_id TAB category`` per line."""
    assignments = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise EvalError(
                f"{source}:{lineno}: expected 2 tab-separated fields, got "
                f"{len(fields)}"
            )
        assignments.append((fields[0], fields[1]))
    return assignments


@dataclass(frozen=True)
class EvalReport:
    """Everything the score/analyze stages compute for one output corpus."""

    corpus_bleu: BleuScore
    mean_sentence_bleu: float
    per_sample: tuple[tuple[str, float, str | None], ...]
    f1_block: F1Block | None = None
    agreement: AgreementBins | None = None
    overlap: OverlapStats | None = None
    categories: tuple[CategoryRow, ...] | None = None


def comment_tokens(comment: str | None) -> list[str]:
    """Whitespace tokens of a comment; an absent comment is empty."""
    return comment.split() if comment else []


def score_outputs(
    outputs: Corpus,
    references: Corpus,
    *,
    labels: Sequence[HumanLabel] | None = None,
    train: Corpus | None = None,
    categories: Sequence[tuple[str, str]] | None = None,
) -> EvalReport:
    """Assemble an EvalReport for system outputs against their references.

    ``outputs`` and ``references`` must describe the same samples in the same
    order.  Labels unlock the F1 block and the agreement histogram; a
    training corpus unlocks overlap statistics.
    """
    if len(outputs) != len(references):
        raise EvalError(
            f"{len(outputs)} outputs vs {len(references)} references"
        )
    pairs = []
    per_sample = []
    by_id = _label_map(labels) if labels is not None else {}
    merged = []
    for out, ref in zip(outputs, references):
        if (out.sentence, out.span) != (ref.sentence, ref.span):
            raise EvalError(
                f"output {out.id} does not line up with reference {ref.id}"
            )
        if ref.reference_comment is None:
            raise EvalError(f"reference sample {ref.id} has no comment")
        hyp = comment_tokens(out.system_comment)
        refc = comment_tokens(ref.reference_comment)
        pairs.append((hyp, refc))
        score = sentence_bleu(hyp, refc).value
        per_sample.append((ref.id, score, by_id.get(ref.id)))
        merged.append(replace(ref, system_comment=out.system_comment))
    merged_corpus = Corpus(samples=tuple(merged), split_name=references.split_name)
    overall = corpus_bleu(pairs)
    mean_bleu = (
        sum(score for _, score, _ in per_sample) / len(per_sample)
        if per_sample
        else 0.0
    )
    f1_block = task_f1(merged_corpus, labels) if labels is not None else None
    agreement = (
        agreement_bins(
            [
                (sample_id, score)
                for sample_id, score, _ in per_sample
                if sample_id in by_id
            ],
            labels,
        )
        if labels is not None
        else None
    )
    overlap = (
        overlap_stats(merged_corpus, train, labels) if train is not None else None
    )
    table = tuple(category_table(categories)) if categories is not None else None
    return EvalReport(
        corpus_bleu=overall,
        mean_sentence_bleu=mean_bleu,
        per_sample=tuple(per_sample),
        f1_block=f1_block,
        agreement=agreement,
        overlap=overlap,
        categories=table,
    )


def _bleu_to_json(score: BleuScore) -> dict:
    return {
        "value": score.value,
        "value_times_100": round(score.value * 100, 2),
        "precisions": list(score.precisions),
        "brevity_penalty": score.brevity_penalty,
        "hyp_len": score.hyp_len,
        "ref_len": score.ref_len,
    }


def report_to_json(report: EvalReport) -> str:
    """Deterministic JSON rendering of an EvalReport."""
    payload: dict = {
        "corpus_bleu": _bleu_to_json(report.corpus_bleu),
        "mean_sentence_bleu": report.mean_sentence_bleu,
        "per_sample": [
            {"id": sample_id, "bleu": score, "label": label}
            for sample_id, score, label in report.per_sample
        ],
        "f1": None,
        "agreement": None,
        "exact_match": None,
        "seen_in_training": None,
        "categories": None,
    }
    if report.f1_block is not None:
        block = report.f1_block
        payload["f1"] = {
            "precision": block.precision,
            "recall": block.recall,
            "f1": block.f1,
            "n_generated": block.n_generated,
            "n_correct": block.n_correct,
            "n_total": block.n_total,
        }
    if report.agreement is not None:
        agg = report.agreement
        payload["agreement"] = {
            "bins": [
                {
                    "lo": round(b.lo, 9),
                    "hi": round(b.hi, 9),
                    "correct": b.n_correct,
                    "incorrect": b.n_incorrect,
                }
                for b in agg.bins
            ],
            "n_labeled": agg.n_labeled,
            "correct_below_half": agg.correct_below_half,
            "correct_below_half_fraction": agg.correct_below_half_fraction,
            "above_06_total": agg.above_06_total,
            "above_06_correct_fraction": agg.above_06_correct_fraction,
        }
    if report.overlap is not None:
        payload["exact_match"] = {
            "count": report.overlap.exact_match_count,
            "fraction": report.overlap.exact_match_fraction,
        }
        payload["seen_in_training"] = {
            "n_refs_seen": report.overlap.n_refs_seen,
            "n_seen_and_correct": report.overlap.n_seen_and_correct,
        }
    if report.categories is not None:
        payload["categories"] = [
            {"category": row.category, "count": row.count, "fraction": row.fraction}
            for row in report.categories
        ]
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def report_to_text(report: EvalReport) -> str:
    """Human-readable summary table of an EvalReport."""
    lines = [
        f"corpus BLEU          {report.corpus_bleu.value * 100:.2f}",
        f"mean sentence BLEU   {report.mean_sentence_bleu * 100:.2f}",
        f"samples              {len(report.per_sample)}",
    ]
    if report.f1_block is not None:
        block = report.f1_block
        lines += [
            f"precision            {block.precision * 100:.2f}"
            f"  ({block.n_correct}/{block.n_generated})",
            f"recall               {block.recall * 100:.2f}"
            f"  ({block.n_correct}/{block.n_total})",
            f"F1                   {block.f1 * 100:.2f}",
        ]
    if report.agreement is not None:
        agg = report.agreement
        lines.append(
            f"correct below 0.5    {agg.correct_below_half} "
            f"({agg.correct_below_half_fraction * 100:.1f}% of labeled)"
        )
        lines.append(
            f"correct above 0.6    {agg.above_06_correct_fraction * 100:.1f}% "
            f"of {agg.above_06_total}"
        )
    if report.overlap is not None:
        lines.append(
            f"exact matches        {report.overlap.exact_match_count} "
            f"({report.overlap.exact_match_fraction * 100:.1f}%)"
        )
        seen_correct = report.overlap.n_seen_and_correct
        lines.append(
            f"references seen      {report.overlap.n_refs_seen}"
            + (f", correct {seen_correct}" if seen_correct is not None else "")
        )
    if report.categories is not None:
        for row in report.categories:
            lines.append(
                f"category {row.category:<24} {row.count:>4} "
                f"({row.fraction * 100:.1f}%)"
            )
    return "".join(line + "\n" for line in lines)


def bins_to_csv(agreement: AgreementBins) -> str:
    """Agreement histogram as CSV for plotting."""
    rows = ["bin_lo,bin_hi,correct,incorrect"]
    for b in agreement.bins:
        rows.append(f"{round(b.lo, 9)},{round(b.hi, 9)},{b.n_correct},{b.n_incorrect}")
    return "".join(row + "\n" for row in rows)
