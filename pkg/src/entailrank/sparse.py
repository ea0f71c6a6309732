"""Okapi BM25 over a single question's candidate pool.

The index is per-question (the distractor setting supplies ~10 paragraphs
per question), never global. IDF uses the ``ln((M - df + 0.5)/(df + 0.5) + 1)``
form, which is strictly positive, so scores are never negative and the
"BM25 > 0" branch used by the score-combination strategy is well-defined.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .corpus import CandidateSentence
from .fusion import Ranking

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Fixed small English stopword list; configurable off via BM25Config.
# Interrogatives (what/where/who/...) stay in: they carry the question's
# answer-type signal and sentence pools rarely contain them anyway.
STOPWORDS = frozenset(
    """a an and are as at be by for from had has have he her his in is it its
    of on or she that the their to was were will with this s t
    """.split()
)


@dataclass(frozen=True)
class BM25Config:
    k1: float = 1.5
    b: float = 0.75
    stopwords: bool = True


def tokenize(text: str, stopwords: bool = True) -> list[str]:
    """Lowercase, split on non-alphanumeric boundaries, drop stopwords.

    No stemming. Underscores split too ("non-alphanumeric" is literal).
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    return tokens


@dataclass(frozen=True)
class SparseIndex:
    """Per-pool term statistics sufficient to score any query."""

    candidate_ids: tuple[str, ...]
    term_freqs: tuple[dict, ...]  # one Counter per candidate, pool order
    doc_freq: dict
    lengths: tuple[int, ...]
    avg_length: float
    config: BM25Config = field(default_factory=BM25Config)

    @property
    def size(self) -> int:
        return len(self.candidate_ids)

    def idf(self, term: str) -> float:
        df = self.doc_freq.get(term, 0)
        if df == 0:
            return 0.0
        m = self.size
        return max(0.0, math.log((m - df + 0.5) / (df + 0.5) + 1.0))


def build_index(pool: list[CandidateSentence] | tuple[CandidateSentence, ...],
                config: BM25Config = BM25Config()) -> SparseIndex:
    """Build term statistics for one question's candidate pool."""
    if not pool:
        raise ValueError("cannot index an empty candidate pool")
    term_freqs = []
    doc_freq: Counter = Counter()
    lengths = []
    for cand in pool:
        tokens = tokenize(cand.text, stopwords=config.stopwords)
        tf = Counter(tokens)
        term_freqs.append(dict(tf))
        doc_freq.update(tf.keys())
        lengths.append(len(tokens))
    return SparseIndex(
        candidate_ids=tuple(c.candidate_id for c in pool),
        term_freqs=tuple(term_freqs),
        doc_freq=dict(doc_freq),
        lengths=tuple(lengths),
        avg_length=sum(lengths) / len(lengths),
        config=config,
    )


def bm25_score(index: SparseIndex, query: str, candidate_id: str) -> float:
    """Okapi BM25 of the query against one pool member; always >= 0."""
    try:
        pos = index.candidate_ids.index(candidate_id)
    except ValueError:
        raise KeyError(f"unknown candidate {candidate_id!r}") from None
    return _score_at(index, tokenize(query, stopwords=index.config.stopwords), pos)


def _score_at(index: SparseIndex, query_tokens: list[str], pos: int) -> float:
    tf = index.term_freqs[pos]
    k1, b = index.config.k1, index.config.b
    norm = k1 * (1.0 - b + b * index.lengths[pos] / index.avg_length) if index.avg_length > 0 else k1
    score = 0.0
    for term in query_tokens:
        f = tf.get(term, 0)
        if f == 0:
            continue
        score += index.idf(term) * f * (k1 + 1.0) / (f + norm)
    return score


def score_pool(index: SparseIndex, query: str) -> list[float]:
    """BM25 scores for every pool member, in pool (source) order."""
    tokens = tokenize(query, stopwords=index.config.stopwords)
    return [_score_at(index, tokens, i) for i in range(index.size)]


def rank_sparse(index: SparseIndex, query: str, question_id: str = "") -> Ranking:
    """Full-pool ranking by descending BM25; ties keep source order."""
    scores = score_pool(index, query)
    order = sorted(range(index.size), key=lambda i: (-scores[i], i))
    return Ranking(
        question_id=question_id,
        items=tuple((index.candidate_ids[i], scores[i]) for i in order),
        strategy="bm25",
    )
