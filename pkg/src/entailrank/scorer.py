"""Dense relevance scoring behind a uniform interface.

Two signals share one contract: a semantic-similarity scorer ("sts") and a
question-entailment scorer ("is"), each returning a relevance score in
[0, 1] for a (query, passage) pair. Three backends satisfy it:

* ``proxy`` — deterministic token-overlap scorers, no network, used by the
  test suite and demos;
* ``cache`` — replay from a JSONL score cache, no computation;
* ``remote`` — batched HTTP calls to the scorer service.

Every score is quantized to six decimal places at this boundary, so a value
that went through the cache file is bit-identical to the one scored fresh.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import requests

from .corpus import QuestionRecord
from .fusion import Ranking
from .sparse import tokenize

logger = logging.getLogger(__name__)

SIGNALS = ("sts", "is")
ENDPOINT_ENV = "ENTAILRANK_SCORER_ENDPOINT"
CHECKPOINT_HEADER = "X-Checkpoint"


class TransportError(Exception):
    """Remote backend unreachable or persistently unavailable; retryable."""


class ContractViolationError(Exception):
    """A backend returned a score outside [0, 1] or the wrong count."""


class IncompleteTableError(Exception):
    """A fusion-facing consumer asked for scores that were never committed."""


def quantize(score: float) -> float:
    """Fix a score to its 6-decimal serialized form."""
    return float(f"{score:.6f}")


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _tokens(text: str) -> frozenset:
    # content tokens only: function-word overlap is noise for both signals
    return frozenset(tokenize(text, stopwords=True))


# Question-word -> answer-type markers. The entailment proxy expands both
# sides through this table, so "what nationality ..." overlaps a sentence
# saying "... is an American folksinger" without sharing a single token.
ANSWER_TYPE_LEXICON: dict[str, frozenset] = {
    key: frozenset(values.split())
    for key, values in {
        "nationality": "american british english french german italian irish scottish welsh canadian australian russian japanese chinese dutch swedish",
        "citizenship": "american british french german citizen",
        "where": "city town village country state county capital located situated region island north south east west",
        "location": "city town country state located situated region",
        "when": "january february march april may june july august september october november december year century decade founded established born died",
        "year": "year founded established born died",
        "who": "actor actress singer songwriter writer author director musician politician founder president scientist artist player leader",
        "wife": "married wife husband spouse widow",
        "husband": "married wife husband spouse widow",
        "spouse": "married wife husband spouse",
        "married": "married wife husband spouse",
        "born": "born birth native",
        "profession": "actor singer writer engineer teacher lawyer musician director politician",
        "occupation": "actor singer writer engineer teacher lawyer musician director politician",
        "team": "team club league football basketball baseball",
        "band": "band album guitarist drummer vocalist bassist",
        "capital": "capital city",
        "genre": "genre rock jazz folk pop drama comedy thriller documentary",
        "author": "novel book wrote author published",
        "wrote": "novel book wrote author published",
        "directed": "directed film movie director",
        "director": "directed film movie director",
    }.items()
}


def _expand(tokens: frozenset) -> frozenset:
    extra: set = set()
    for t in tokens:
        markers = ANSWER_TYPE_LEXICON.get(t)
        if markers:
            extra |= markers
    return tokens | frozenset(extra)


class Backend(Protocol):
    kind: str

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


class ProxyScorer:
    """Deterministic, model-free stand-in for the cross-encoder signals.

    The "sts" flavour is plain token-overlap Jaccard. The "is" flavour
    expands both sides through the answer-type lexicon first, which makes
    it reward sentences that *answer* the question type rather than echo
    its words. Self-match saturates at 1.0 for both.
    """

    kind = "proxy"

    def __init__(self, signal: str):
        if signal not in SIGNALS:
            raise ValueError(f"unknown signal {signal!r}")
        self.signal = signal
        self.calls = 0

    def score_one(self, query: str, passage: str) -> float:
        q, p = _tokens(query), _tokens(passage)
        if self.signal == "is":
            q, p = _expand(q), _expand(p)
        return _jaccard(q, p)

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        self.calls += 1
        return [self.score_one(q, p) for q, p in pairs]


class RemoteScorer:
    """Client for the batch scoring service (POST /score).

    Retries on 503 (model loading) with exponential backoff; records the
    checkpoint identifier the service reports in its response headers.
    """

    kind = "remote"

    def __init__(self, signal: str, endpoint: str | None = None,
                 max_retries: int = 5, backoff: float = 0.5,
                 session: requests.Session | None = None):
        if signal not in SIGNALS:
            raise ValueError(f"unknown signal {signal!r}")
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise TransportError(
                f"no scorer endpoint configured (flag or {ENDPOINT_ENV})")
        self.signal = signal
        self.endpoint = endpoint.rstrip("/")
        self.max_retries = max_retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.checkpoint_id: str | None = None
        self.calls = 0

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        self.calls += 1
        payload = {"model": self.signal, "pairs": [[q, p] for q, p in pairs]}
        delay = self.backoff
        for attempt in range(self.max_retries + 1):
            try:
                resp = self.session.post(f"{self.endpoint}/score", json=payload, timeout=60)
            except requests.RequestException as exc:
                raise TransportError(f"scorer service unreachable: {exc}") from exc
            if resp.status_code == 503:
                if attempt == self.max_retries:
                    break
                retry_after = resp.headers.get("Retry-After")
                wait = float(retry_after) if retry_after else delay
                logger.info("scorer service loading; retrying in %.1fs", wait)
                time.sleep(wait)
                delay *= 2
                continue
            if resp.status_code != 200:
                raise TransportError(
                    f"scorer service returned {resp.status_code}: {resp.text[:200]}")
            self.checkpoint_id = resp.headers.get(CHECKPOINT_HEADER, self.checkpoint_id)
            scores = resp.json().get("scores")
            if not isinstance(scores, list) or len(scores) != len(pairs):
                raise ContractViolationError(
                    f"expected {len(pairs)} scores, got {scores!r}")
            return [float(s) for s in scores]
        raise TransportError("scorer service still loading after retries")


class CacheOnlyBackend:
    """Backend that must never be called: every score must come from cache."""

    kind = "cache"

    def __init__(self, signal: str):
        self.signal = signal
        self.calls = 0

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        raise TransportError(
            f"score cache is missing entries for the {self.signal!r} scorer "
            "and the cache backend cannot compute new ones")


class ScoreCache:
    """JSONL score cache: one ``{question_id, candidate_id, scorer, score}``
    record per line, scores at six decimals. Single writer, many readers."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._entries: dict[tuple[str, str, str], float] = {}
        self._write_lock = threading.Lock()
        if self.path and self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (rec["question_id"], rec["candidate_id"], rec["scorer"])
                self._entries[key] = quantize(float(rec["score"]))

    def get(self, question_id: str, candidate_id: str, scorer: str) -> float | None:
        return self._entries.get((question_id, candidate_id, scorer))

    def __len__(self) -> int:
        return len(self._entries)

    def put_many(self, records: Iterable[tuple[str, str, str, float]]) -> None:
        """Append records (question_id, candidate_id, scorer, score); scores
        are quantized on the way in. Writes are serialized on one lock so
        concurrent per-question workers cannot interleave lines."""
        records = [(qid, cid, sc, quantize(s)) for qid, cid, sc, s in records]
        with self._write_lock:
            if self.path:
                with self.path.open("a", encoding="utf-8") as fh:
                    for qid, cid, sc, s in records:
                        fh.write(json.dumps(
                            {"question_id": qid, "candidate_id": cid,
                             "scorer": sc, "score": s},
                            sort_keys=True) + "\n")
            for qid, cid, sc, s in records:
                self._entries[(qid, cid, sc)] = s


@dataclass
class ScoreTable:
    """Per-question (candidate x scorer) score matrix with provenance."""

    question_id: str
    entries: dict[tuple[str, str], float] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)  # scorer -> remote|cache|proxy

    def get(self, candidate_id: str, scorer: str) -> float:
        return self.entries[(candidate_id, scorer)]

    def complete_for(self, record: QuestionRecord, scorer: str) -> bool:
        return all((cid, scorer) in self.entries for cid in record.pool_order())

    def merge(self, other: "ScoreTable") -> None:
        if other.question_id != self.question_id:
            raise ValueError("cannot merge tables for different questions")
        self.entries.update(other.entries)
        self.provenance.update(other.provenance)


class BoundScorer:
    """One signal bound to exactly one backend for the run, with an optional
    write-through cache in front of it."""

    def __init__(self, signal: str, backend: Backend, cache: ScoreCache | None = None,
                 question_id: str | None = None):
        if signal not in SIGNALS:
            raise ValueError(f"unknown signal {signal!r}")
        self.signal = signal
        self.backend = backend
        self.cache = cache
        # pair/augmented-query scores are cached under this id when set
        self.question_id = question_id

    @property
    def backend_tag(self) -> str:
        return self.backend.kind

    def for_question(self, question_id: str) -> "BoundScorer":
        """A per-question view sharing this scorer's backend and cache;
        safe to hand to concurrent workers."""
        return BoundScorer(self.signal, self.backend, self.cache, question_id)

    def score(self, query: str, passage: str) -> float:
        return self.score_batch([(query, passage)])[0]

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        """Score (query, passage) pairs, serving from cache where possible.

        Free-form pairs (pair concatenations, augmented queries) are cached
        under a key derived from the text itself.
        """
        results: list[float | None] = [None] * len(pairs)
        missing: list[int] = []
        for i, (q, p) in enumerate(pairs):
            if self.cache is not None and self.question_id is not None:
                hit = self.cache.get(self.question_id, _text_key(q, p), self.signal)
                if hit is not None:
                    results[i] = hit
                    continue
            missing.append(i)
        if missing:
            fresh = validate_scores(
                self.backend.score_batch([pairs[i] for i in missing]), len(missing))
            if self.cache is not None and self.question_id is not None:
                self.cache.put_many(
                    (self.question_id, _text_key(*pairs[i]), self.signal, s)
                    for i, s in zip(missing, fresh))
            for i, s in zip(missing, fresh):
                results[i] = s
        return results  # type: ignore[return-value]


def validate_scores(scores: Sequence[float], n: int) -> list[float]:
    """Enforce the backend contract: n scores, each in [0, 1], quantized."""
    if len(scores) != n:
        raise ContractViolationError(f"expected {n} scores, got {len(scores)}")
    for s in scores:
        if not (0.0 <= s <= 1.0):
            raise ContractViolationError(f"score {s!r} outside [0, 1]")
    return [quantize(s) for s in scores]


def _text_key(query: str, passage: str) -> str:
    h = hashlib.sha256()
    h.update(query.encode("utf-8"))
    h.update(b"\x00")
    h.update(passage.encode("utf-8"))
    return "text:" + h.hexdigest()[:24]


def make_backend(signal: str, backend: str, endpoint: str | None = None) -> Backend:
    if backend == "proxy":
        return ProxyScorer(signal)
    if backend == "remote":
        return RemoteScorer(signal, endpoint=endpoint)
    if backend == "cache":
        return CacheOnlyBackend(signal)
    raise ValueError(f"unknown scorer backend {backend!r}")


def score_pool(scorer: BoundScorer, record: QuestionRecord,
               cache: ScoreCache | None = None) -> ScoreTable:
    """Score every candidate of a question with one scorer.

    All-or-nothing: if any backend call fails, neither the cache nor the
    returned table sees a partial fragment.
    """
    cache = cache if cache is not None else scorer.cache
    pool = record.candidates
    found: dict[str, float] = {}
    missing = []
    for cand in pool:
        hit = cache.get(record.question_id, cand.candidate_id, scorer.signal) if cache else None
        if hit is not None:
            found[cand.candidate_id] = hit
        else:
            missing.append(cand)

    fresh: dict[str, float] = {}
    if missing:
        pairs = [(record.question_text, c.text) for c in missing]
        scores = validate_scores(scorer.backend.score_batch(pairs), len(pairs))
        fresh = {c.candidate_id: s for c, s in zip(missing, scores)}
        if cache is not None:
            cache.put_many(
                (record.question_id, cid, scorer.signal, s) for cid, s in fresh.items())

    provenance = "cache" if not missing else scorer.backend_tag
    table = ScoreTable(question_id=record.question_id)
    table.provenance[scorer.signal] = provenance
    for cand in pool:
        score = found.get(cand.candidate_id, fresh.get(cand.candidate_id))
        table.entries[(cand.candidate_id, scorer.signal)] = score
    return table


def rank_dense(scorer_name: str, record: QuestionRecord, table: ScoreTable) -> Ranking:
    """Full-pool ranking by one dense signal; ties keep source order."""
    if not table.complete_for(record, scorer_name):
        raise IncompleteTableError(
            f"table for {record.question_id} is missing {scorer_name!r} scores")
    pool = record.pool_order()
    scored = [(cid, table.get(cid, scorer_name)) for cid in pool]
    order = sorted(range(len(pool)), key=lambda i: (-scored[i][1], i))
    return Ranking(
        question_id=record.question_id,
        items=tuple(scored[i] for i in order),
        strategy=scorer_name,
    )
