"""Pluggable comment generators.

The retrieval generator is a deterministic desk-scale stand-in for a
fine-tuned encoder-decoder: it indexes marker-encoded training sentences
under unigram+bigram TF-IDF weights and answers a query with the comment of
the most cosine-similar entry.  Ties resolve to the higher-priority entry
(gold over pseudo), then to the earlier-inserted one.  The external kind
talks to a real generator process over a JSON-lines protocol.
"""

from __future__ import annotations

import json
import logging
import math
import shlex
import socket
import subprocess
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, DEFAULT_MARKER, Sample, mark_span, with_system_comments

log = logging.getLogger(__name__)

PROTOCOL_NAME = "fcg-extgen"
PROTOCOL_VERSION = 1

GOLD_PRIORITY = 1
PSEUDO_PRIORITY = 0


class GeneratorError(RuntimeError):
    """Training-data or generation failure."""


class ProtocolError(GeneratorError):
    """The external generator violated the line protocol."""


@dataclass(frozen=True)
class TrainEntry:
    """One indexed training pair: a marker-encoded sentence and its comment."""

    marked_tokens: tuple[str, ...]
    comment: str
    priority: int
    ordinal: int


def _features(tokens: Sequence[str]) -> Counter:
    """Unigram and bigram term counts; both are keyed as token tuples."""
    terms = Counter()
    for token in tokens:
        terms[(token,)] += 1
    for a, b in zip(tokens, tokens[1:]):
        terms[(a, b)] += 1
    return terms


class RetrievalModel:
    """Immutable TF-IDF retrieval index over marker-encoded sentences.

    IDF is smoothed as ln((N + 1) / (df + 1)) + 1, which keeps every weight
    strictly positive; a query identical to an indexed sentence therefore
    always reaches similarity 1.0 (asserted via an exact token comparison to
    sidestep float rounding).
    """

    kind = "retrieval"

    def __init__(
        self,
        entries: Sequence[TrainEntry],
        *,
        abstain_threshold: float = 0.0,
        marker: str = DEFAULT_MARKER,
    ) -> None:
        if not 0.0 <= abstain_threshold <= 1.0:
            raise GeneratorError(
                f"abstain_threshold must be in [0, 1], got {abstain_threshold}"
            )
        self.entries = tuple(entries)
        self.abstain_threshold = abstain_threshold
        self.marker = marker
        self._index()

    def _index(self) -> None:
        n_docs = len(self.entries)
        doc_freq: Counter = Counter()
        doc_terms = []
        for entry in self.entries:
            terms = _features(entry.marked_tokens)
            doc_terms.append(terms)
            doc_freq.update(terms.keys())
        self._idf = {
            term: math.log((n_docs + 1) / (df + 1)) + 1.0
            for term, df in doc_freq.items()
        }
        self._postings: dict[tuple, list[tuple[int, float]]] = {}
        self._norms = []
        self._exact: dict[tuple[str, ...], int] = {}
        for idx, (entry, terms) in enumerate(zip(self.entries, doc_terms)):
            norm_sq = 0.0
            for term, count in terms.items():
                weight = count * self._idf[term]
                norm_sq += weight * weight
                self._postings.setdefault(term, []).append((idx, weight))
            self._norms.append(math.sqrt(norm_sq))
            # first occurrence wins; duplicates resolve via similarity ties
            self._exact.setdefault(entry.marked_tokens, idx)

    def similarities(self, marked_tokens: Sequence[str]) -> list[float]:
        """Cosine similarity of the query against every index entry."""
        query = tuple(marked_tokens)
        terms = _features(query)
        dots = [0.0] * len(self.entries)
        query_norm_sq = 0.0
        for term, count in terms.items():
            idf = self._idf.get(term)
            if idf is None:
                continue
            weight = count * idf
            query_norm_sq += weight * weight
            for idx, doc_weight in self._postings[term]:
                dots[idx] += weight * doc_weight
        if query_norm_sq == 0.0:
            return dots
        query_norm = math.sqrt(query_norm_sq)
        sims = [
            min(dot / (query_norm * self._norms[idx]), 1.0)
            for idx, dot in enumerate(dots)
        ]
        if query in self._exact:
            for idx, entry in enumerate(self.entries):
                if entry.marked_tokens == query:
                    sims[idx] = 1.0
        return sims

    def generate(self, sample: Sample) -> str | None:
        """Retrieve the best-matching comment, or None below the threshold."""
        if not self.entries:
            raise GeneratorError("retrieval index is empty")
        marked = tuple(mark_span(sample, self.marker).split(" "))
        sims = self.similarities(marked)
        best = None
        for idx, sim in enumerate(sims):
            entry = self.entries[idx]
            key = (sim, entry.priority, -entry.ordinal)
            if best is None or key > best[0]:
                best = (key, entry)
        best_sim, _, _ = best[0]
        if best_sim < self.abstain_threshold:
            return None
        return best[1].comment

    def to_manifest(self) -> str:
        """Serialize the index to a deterministic JSON manifest."""
        payload = {
            "kind": self.kind,
            "marker": self.marker,
            "abstain_threshold": self.abstain_threshold,
            "entries": [
                {
                    "marked": " ".join(entry.marked_tokens),
                    "comment": entry.comment,
                    "priority": entry.priority,
                    "ordinal": entry.ordinal,
                }
                for entry in self.entries
            ],
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_manifest(cls, text: str) -> "RetrievalModel":
        payload = json.loads(text)
        if payload.get("kind") != cls.kind:
            raise GeneratorError(f"not a retrieval manifest: kind={payload.get('kind')!r}")
        entries = [
            TrainEntry(
                marked_tokens=tuple(item["marked"].split(" ")),
                comment=item["comment"],
                priority=item["priority"],
                ordinal=item["ordinal"],
            )
            for item in payload["entries"]
        ]
        return cls(
            entries,
            abstain_threshold=payload["abstain_threshold"],
            marker=payload["marker"],
        )


def train_retrieval(
    datasets: Sequence[tuple[Corpus, int]],
    *,
    abstain_threshold: float = 0.0,
    marker: str = DEFAULT_MARKER,
) -> RetrievalModel:
    """Index one or more corpora, each with a priority (gold 1, pseudo 0).

    The combined regime passes all datasets at equal priority 1; the
    multi-stage regime passes pseudo data at priority 0 and gold at 1 so that
    gold comments dominate retrieval ties.
    """
    entries = []
    ordinal = 0
    for corpus, priority in datasets:
        for sample in corpus:
            if not sample.reference_comment:
                raise GeneratorError(
                    f"sample {sample.id} has no reference comment; cannot train"
                )
            entries.append(
                TrainEntry(
                    marked_tokens=tuple(mark_span(sample, marker).split(" ")),
                    comment=sample.reference_comment,
                    priority=priority,
                    ordinal=ordinal,
                )
            )
            ordinal += 1
    log.info("indexed %d training entries from %d datasets", len(entries), len(datasets))
    return RetrievalModel(entries, abstain_threshold=abstain_threshold, marker=marker)


class ExternalClient:
    """Client for an external generator speaking the JSON-lines protocol.

    Requests are serialized per connection: one in-flight request at a time.
    The server's first line must be the handshake
    ``{"protocol": "fcg-extgen", "version": 1}``.
    """

    kind = "external"

    def __init__(self, endpoint: str, *, marker: str = DEFAULT_MARKER) -> None:
        self.endpoint = endpoint
        self.marker = marker
        self._proc: subprocess.Popen | None = None
        self._sock: socket.socket | None = None
        self._reader = None
        self._writer = None

    @staticmethod
    def is_tcp_endpoint(endpoint: str) -> bool:
        host, sep, port = endpoint.rpartition(":")
        return bool(sep) and port.isdigit() and bool(host) and " " not in host

    def connect(self) -> None:
        if self._reader is not None:
            return
        if self.is_tcp_endpoint(self.endpoint):
            host, _, port = self.endpoint.rpartition(":")
            self._sock = socket.create_connection((host, int(port)))
            self._reader = self._sock.makefile("r", encoding="utf-8", newline="\n")
            self._writer = self._sock.makefile("w", encoding="utf-8", newline="\n")
        else:
            self._proc = subprocess.Popen(
                shlex.split(self.endpoint),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                encoding="utf-8",
            )
            self._reader = self._proc.stdout
            self._writer = self._proc.stdin
        self._handshake()

    def _handshake(self) -> None:
        line = self._reader.readline()
        if not line:
            raise ProtocolError(f"{self.endpoint}: no handshake line")
        try:
            head = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(f"{self.endpoint}: handshake is not JSON: {line!r}") from None
        if head.get("protocol") != PROTOCOL_NAME or head.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(f"{self.endpoint}: unsupported handshake {head!r}")

    def close(self) -> None:
        for stream in (self._writer, self._reader):
            if stream is not None:
                try:
                    stream.close()
                except OSError:
                    pass
        if self._sock is not None:
            self._sock.close()
            self._sock = None
        if self._proc is not None:
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None
        self._reader = self._writer = None

    def __enter__(self) -> "ExternalClient":
        self.connect()
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def request(self, request_id: str, marked: str) -> str | None:
        """Send one request line; return the comment or None on abstain."""
        self.connect()
        payload = json.dumps({"id": request_id, "marked": marked}, ensure_ascii=False)
        try:
            self._writer.write(payload + "\n")
            self._writer.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"{self.endpoint}: write failed: {exc}") from exc
        line = self._reader.readline()
        if not line:
            raise ProtocolError(f"{self.endpoint}: connection closed mid-request")
        try:
            response = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(
                f"{self.endpoint}: response is not JSON: {line!r}"
            ) from None
        if "error" in response:
            raise ProtocolError(f"{self.endpoint}: server error: {response['error']}")
        if response.get("id") != request_id:
            raise ProtocolError(
                f"{self.endpoint}: response id {response.get('id')!r} does not match "
                f"request id {request_id!r}"
            )
        if response.get("abstain") is True:
            return None
        comment = response.get("comment")
        if not isinstance(comment, str):
            raise ProtocolError(f"{self.endpoint}: response carries no comment: {line!r}")
        return comment

    def generate(self, sample: Sample) -> str | None:
        return self.request(sample.id, mark_span(sample, self.marker))


GeneratorModel = RetrievalModel | ExternalClient


def generate(model: GeneratorModel, sample: Sample) -> str | None:
    """Generate a comment for one sample; None means the model abstained."""
    return model.generate(sample)


def generate_batch(model: GeneratorModel, corpus: Corpus) -> Corpus:
    """Elementwise generation over a corpus, preserving order.

    Failures are re-raised with the offending sample id attached.
    """
    comments: list[str | None] = []
    for sample in corpus:
        try:
            comments.append(model.generate(sample))
        except (GeneratorError, ValueError) as exc:
            raise type(exc)(f"sample {sample.id}: {exc}") from exc
    return with_system_comments(corpus, comments)
