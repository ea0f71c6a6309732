"""Ensemble ranking strategies: average ranking, score combination, and
entailment-aware pair re-ranking.

All strategies emit a ``Ranking`` that is a strict total order over the
question's full candidate pool. Ties anywhere are broken by source
(paragraph-then-sentence) order so reruns are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

from .corpus import CandidateSentence, QuestionRecord

if TYPE_CHECKING:
    from .scorer import BoundScorer, ScoreTable


class FusionError(Exception):
    """Raised when inputs to a strategy are inconsistent or incomplete."""


@dataclass(frozen=True)
class Ranking:
    """A strict ordering of a question's candidates: the output of every strategy."""

    question_id: str
    items: tuple[tuple[str, float], ...]  # (candidate_id, score), best first
    strategy: str

    def ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.items)

    def top(self, k: int) -> tuple[str, ...]:
        return self.ids()[:k]

    def ranks(self) -> dict[str, int]:
        """candidate_id -> 1-based rank."""
        return {cid: i + 1 for i, (cid, _) in enumerate(self.items)}

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "strategy": self.strategy,
            "ranked": [{"candidate_id": cid, "score": score} for cid, score in self.items],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Ranking":
        return cls(
            question_id=d["question_id"],
            strategy=d["strategy"],
            items=tuple((e["candidate_id"], float(e["score"])) for e in d["ranked"]),
        )


@dataclass(frozen=True)
class FusionConfig:
    """Knobs shared by the ensemble strategies; embedded verbatim in reports."""

    alpha: float = 3.0
    beta: float = 1.0
    k: int = 3
    nest_enabled: bool = True
    initial_ranker: str = "sts"

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.initial_ranker not in ("sts", "is"):
            raise ValueError(f"unknown initial ranker {self.initial_ranker!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FusionConfig":
        return cls(
            alpha=float(d.get("alpha", 3.0)),
            beta=float(d.get("beta", 1.0)),
            k=int(d.get("k", 3)),
            nest_enabled=bool(d.get("nest_enabled", True)),
            initial_ranker=str(d.get("initial_ranker", "sts")),
        )


@dataclass(frozen=True)
class PairCandidate:
    a: str
    b: str
    pair_score: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("pair members must differ")


def _source_index(pool_order: Sequence[str]) -> dict[str, int]:
    return {cid: i for i, cid in enumerate(pool_order)}


def _sorted_ranking(question_id: str, scored: list[tuple[str, float]],
                    source_idx: dict[str, int], strategy: str) -> Ranking:
    order = sorted(scored, key=lambda it: (-it[1], source_idx[it[0]]))
    return Ranking(question_id=question_id, items=tuple(order), strategy=strategy)


def average_rank(rankings: Sequence[Ranking], pool_order: Sequence[str] | None = None) -> Ranking:
    """Order-based fusion: ascending sum of 1-based ranks across the inputs.

    Ties break by the best single-model rank, then source order. The output
    score is the negated rank-sum so higher still means better.
    """
    if not rankings:
        raise FusionError("average_rank needs at least one ranking")
    pools = [frozenset(r.ids()) for r in rankings]
    if any(p != pools[0] for p in pools[1:]):
        raise FusionError("input rankings cover different candidate pools")
    if pool_order is None:
        pool_order = rankings[0].ids()
    source_idx = _source_index(pool_order)

    per_model = [r.ranks() for r in rankings]
    rank_sum = {cid: sum(rm[cid] for rm in per_model) for cid in pools[0]}
    best = {cid: min(rm[cid] for rm in per_model) for cid in pools[0]}
    order = sorted(pools[0], key=lambda cid: (rank_sum[cid], best[cid], source_idx[cid]))
    return Ranking(
        question_id=rankings[0].question_id,
        items=tuple((cid, -float(rank_sum[cid])) for cid in order),
        strategy="ar",
    )


def normalize_scores(scores: Sequence[float]) -> np.ndarray:
    """Scale a question's per-candidate score vector to unit L2 norm.

    An all-zero vector has no direction and passes through unchanged.
    """
    vec = np.asarray(scores, dtype=float)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return vec.copy()
    return vec / norm


def qer_scores(sparse_scores: Sequence[float], sts_scores: Sequence[float],
               is_scores: Sequence[float], alpha: float, beta: float) -> np.ndarray:
    """Per-candidate combined relevance. Two branches: candidates with any
    lexical match average all three normalized signals; the rest average
    only the two dense signals."""
    bm = np.asarray(sparse_scores, dtype=float)
    n_bm = normalize_scores(bm)
    n_sts = normalize_scores(sts_scores)
    n_is = normalize_scores(is_scores)
    with_lex = (n_bm + alpha * n_sts + beta * n_is) / 3.0
    without_lex = (alpha * n_sts + beta * n_is) / 2.0
    return np.where(bm > 0, with_lex, without_lex)


def simcom(record: QuestionRecord, table: "ScoreTable", sparse_scores: Sequence[float],
           cfg: FusionConfig) -> Ranking:
    """Score-combination strategy over the normalized sparse and dense signals."""
    pool = record.pool_order()
    if len(sparse_scores) != len(pool):
        raise FusionError("sparse score vector does not match the candidate pool")
    try:
        sts = [table.get(cid, "sts") for cid in pool]
        is_ = [table.get(cid, "is") for cid in pool]
    except KeyError as exc:
        raise FusionError(f"score table incomplete: {exc}") from exc
    combined = qer_scores(sparse_scores, sts, is_, cfg.alpha, cfg.beta)
    source_idx = _source_index(pool)
    return _sorted_ranking(record.question_id, list(zip(pool, combined.tolist())),
                           source_idx, "simcom")


def build_pair_sets(rank_bm25: Ranking, rank_sts: Ranking, rank_is: Ranking,
                    cfg: FusionConfig, pool_order: Sequence[str] | None = None,
                    is_ranking_override: Ranking | None = None) -> tuple[list[str], list[str]]:
    """Construct the two pair sets from the base rankings.

    A is the deduplicated union of the lexical and semantic top-K, ordered by
    the best rank either contributor gave, then source order. B is the
    entailment top-K verbatim. ``is_ranking_override`` swaps the ranking that
    feeds B (used by the scorer-substitution ablation).
    """
    pools = {frozenset(rank_bm25.ids()), frozenset(rank_sts.ids()), frozenset(rank_is.ids())}
    if len(pools) != 1:
        raise FusionError("base rankings cover different candidate pools")
    k = min(cfg.k, len(rank_bm25.items))
    if pool_order is None:
        pool_order = rank_bm25.ids()
    source_idx = _source_index(pool_order)

    top_bm = rank_bm25.top(k)
    top_sts = rank_sts.top(k)
    best_rank: dict[str, int] = {}
    for pos, cid in enumerate(top_bm, start=1):
        best_rank[cid] = min(best_rank.get(cid, pos), pos)
    for pos, cid in enumerate(top_sts, start=1):
        best_rank[cid] = min(best_rank.get(cid, pos), pos)
    a_set = sorted(best_rank, key=lambda cid: (best_rank[cid], source_idx[cid]))

    b_source = is_ranking_override if is_ranking_override is not None else rank_is
    b_set = list(b_source.top(k))
    return a_set, b_set


def enumerate_pairs(a_set: Sequence[str], b_set: Sequence[str]) -> list[tuple[str, str]]:
    """Cartesian product minus self-pairs, in (A-order, B-order)."""
    return [(a, b) for a in a_set for b in b_set if a != b]


def ear_rank(record: QuestionRecord, a_set: Sequence[str], b_set: Sequence[str],
             cfg: FusionConfig, scorer: "BoundScorer",
             pair_score_fn: Callable[[CandidateSentence, CandidateSentence], float] | None = None,
             strategy: str = "ear") -> Ranking:
    """Pair re-ranking: find the best cross-signal sentence pair, put it at
    ranks 1-2, then rank everything else against the pair-augmented question.

    ``pair_score_fn`` overrides step-1 pair scoring (the entity-boosted
    variant plugs in here); steps 2 and 3 always use raw scorer calls.
    """
    by_id = {c.candidate_id: c for c in record.candidates}
    pool = record.pool_order()
    source_idx = _source_index(pool)
    q = record.question_text

    pairs = enumerate_pairs(a_set, b_set)
    if not pairs:
        # degenerate A = B = {single sentence}: no cross pair exists
        scored = [(cid, scorer.score(q, by_id[cid].text)) for cid in pool]
        return _sorted_ranking(record.question_id, scored, source_idx, strategy)

    if pair_score_fn is None:
        def pair_score_fn(a: CandidateSentence, b: CandidateSentence) -> float:
            return scorer.score(q, f"{a.text} {b.text}")

    scored_pairs = [
        PairCandidate(a=a, b=b, pair_score=pair_score_fn(by_id[a], by_id[b]))
        for a, b in pairs
    ]
    best = min(scored_pairs,
               key=lambda p: (-p.pair_score, source_idx[p.a], source_idx[p.b]))

    ind_a = scorer.score(q, by_id[best.a].text)
    ind_b = scorer.score(q, by_id[best.b].text)
    first, second = (best.a, best.b)
    s_first, s_second = ind_a, ind_b
    if (ind_b, -source_idx[best.b]) > (ind_a, -source_idx[best.a]):
        first, second = best.b, best.a
        s_first, s_second = ind_b, ind_a

    augmented = f"{q} {by_id[best.a].text} {by_id[best.b].text}"
    rest = [cid for cid in pool if cid not in (best.a, best.b)]
    rest_scored = [(cid, scorer.score(augmented, by_id[cid].text)) for cid in rest]
    rest_scored.sort(key=lambda it: (-it[1], source_idx[it[0]]))

    # synthetic top-2 scores keep the non-increasing invariant (rest is in [0,1])
    items = [(first, 2.0 + s_first), (second, 1.0 + s_second)] + rest_scored
    return Ranking(question_id=record.question_id, items=tuple(items), strategy=strategy)


def earnest_pair_score(question: str, a: CandidateSentence, b: CandidateSentence,
                       scorer: "BoundScorer",
                       share_entity: Callable[[CandidateSentence, CandidateSentence], bool]) -> float:
    """Pair relevance with the shared-entity promotion: doubles the pair's
    similarity when the two sentences mention a common named entity."""
    sim = scorer.score(question, f"{a.text} {b.text}")
    nest = 1.0 if share_entity(a, b) else 0.0
    return (1.0 + nest) * sim


def earnest_rank(record: QuestionRecord, a_set: Sequence[str], b_set: Sequence[str],
                 cfg: FusionConfig, scorer: "BoundScorer",
                 share_entity: Callable[[CandidateSentence, CandidateSentence], bool]) -> Ranking:
    """EAR with entity-aware pair scoring; promotion applies only in step 1."""
    predicate = share_entity if cfg.nest_enabled else (lambda a, b: False)

    def pair_fn(a: CandidateSentence, b: CandidateSentence) -> float:
        return earnest_pair_score(record.question_text, a, b, scorer, predicate)

    return ear_rank(record, a_set, b_set, cfg, scorer,
                    pair_score_fn=pair_fn, strategy="earnest")
