"""Orchestration: wire the base models and fusion strategies per question.

Each question's scoring is independent; ``rank_dataset`` fans out over a
bounded thread pool and collects results back in dataset order so outputs
stay byte-identical regardless of worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .corpus import Dataset, QuestionRecord
from .entities import EntityMatcher
from .fusion import (FusionConfig, Ranking, average_rank, build_pair_sets,
                     ear_rank, earnest_rank, simcom)
from .scorer import (BoundScorer, ScoreCache, ScoreTable, make_backend,
                     rank_dense, score_pool)
from .sparse import BM25Config, build_index, rank_sparse
from .sparse import score_pool as bm25_score_pool

METHODS = ("bm25", "sts", "is", "ar", "simcom", "ear", "earnest")

# internal method id for the scorer-substitution ablation (not a CLI method)
EARNEST_SUB = "earnest_sub"


@dataclass
class EngineConfig:
    fusion: FusionConfig = field(default_factory=FusionConfig)
    bm25: BM25Config = field(default_factory=BM25Config)
    backend: str = "proxy"  # proxy | cache | remote
    endpoint: str | None = None
    fuzzy_threshold: float = 0.85
    ner_provider: str = "rules"  # "remote" reserved for an external recognizer

    def to_dict(self) -> dict:
        return {
            "fusion": self.fusion.to_dict(),
            "bm25": {"k1": self.bm25.k1, "b": self.bm25.b, "stopwords": self.bm25.stopwords},
            "backend": self.backend,
            "endpoint": self.endpoint,
            "fuzzy_threshold": self.fuzzy_threshold,
            "ner_provider": self.ner_provider,
        }


class Engine:
    """Holds the bound scorers, score cache, and entity matcher for a run."""

    def __init__(self, config: EngineConfig | None = None,
                 cache: ScoreCache | None = None,
                 scorers: Mapping[str, BoundScorer] | None = None,
                 matcher: EntityMatcher | None = None):
        self.config = config or EngineConfig()
        self.cache = cache if cache is not None else ScoreCache()
        if scorers is None:
            scorers = {
                signal: BoundScorer(
                    signal,
                    make_backend(signal, self.config.backend, self.config.endpoint),
                    cache=self.cache)
                for signal in ("sts", "is")
            }
        self.scorers = dict(scorers)
        if matcher is None:
            if self.config.ner_provider != "rules":
                raise ValueError(
                    f"ner_provider {self.config.ner_provider!r} has no adapter in "
                    "this deployment; pass a custom EntityMatcher(provider=...) "
                    "or use 'rules'")
            matcher = EntityMatcher(self.config.fuzzy_threshold)
        self.matcher = matcher

    def provenance(self) -> dict[str, str]:
        prov = {signal: sc.backend_tag for signal, sc in self.scorers.items()}
        for signal, sc in self.scorers.items():
            checkpoint = getattr(sc.backend, "checkpoint_id", None)
            if checkpoint:
                prov[f"{signal}_checkpoint"] = checkpoint
        return prov

    # -- per-question building blocks --

    def sparse_parts(self, record: QuestionRecord) -> tuple[Ranking, list[float]]:
        index = build_index(record.candidates, self.config.bm25)
        scores = bm25_score_pool(index, record.question_text)
        ranking = rank_sparse(index, record.question_text, record.question_id)
        return ranking, scores

    def dense_table(self, record: QuestionRecord, signals: tuple[str, ...] = ("sts", "is")) -> ScoreTable:
        table = ScoreTable(question_id=record.question_id)
        for signal in signals:
            scorer = self.scorers[signal].for_question(record.question_id)
            table.merge(score_pool(scorer, record, self.cache))
        return table

    def base_rankings(self, record: QuestionRecord) -> dict[str, Ranking]:
        rank_bm25, _ = self.sparse_parts(record)
        table = self.dense_table(record)
        return {
            "bm25": rank_bm25,
            "sts": rank_dense("sts", record, table),
            "is": rank_dense("is", record, table),
        }

    def rank_question(self, record: QuestionRecord, method: str) -> Ranking:
        """Produce one strategy's ranking for one question."""
        if method == "bm25":
            return self.sparse_parts(record)[0]
        if method in ("sts", "is"):
            table = self.dense_table(record, signals=(method,))
            return rank_dense(method, record, table)

        rank_bm25, sparse_scores = self.sparse_parts(record)
        table = self.dense_table(record)
        rank_sts = rank_dense("sts", record, table)
        rank_is = rank_dense("is", record, table)
        cfg = self.config.fusion
        pool_order = record.pool_order()

        if method == "ar":
            return average_rank([rank_bm25, rank_sts, rank_is], pool_order)
        if method == "simcom":
            return simcom(record, table, sparse_scores, cfg)

        initial = self.scorers[cfg.initial_ranker].for_question(record.question_id)
        if method == "ear":
            a_set, b_set = build_pair_sets(rank_bm25, rank_sts, rank_is, cfg, pool_order)
            return ear_rank(record, a_set, b_set, cfg, initial)
        if method == "earnest":
            a_set, b_set = build_pair_sets(rank_bm25, rank_sts, rank_is, cfg, pool_order)
            return earnest_rank(record, a_set, b_set, cfg, initial,
                                self.matcher.share_entity)
        if method == EARNEST_SUB:
            # ablation: the entailment scorer is replaced by the semantic
            # scorer everywhere it appears, i.e. set B construction
            a_set, b_set = build_pair_sets(rank_bm25, rank_sts, rank_is, cfg,
                                           pool_order, is_ranking_override=rank_sts)
            ranking = earnest_rank(record, a_set, b_set, cfg, initial,
                                   self.matcher.share_entity)
            return Ranking(question_id=ranking.question_id, items=ranking.items,
                           strategy=EARNEST_SUB)
        raise ValueError(f"unknown method {method!r}")

    # -- dataset-level driving --

    def rank_dataset(self, dataset: Dataset, method: str,
                     workers: int = 1) -> dict[str, Ranking]:
        """Rank every question; results keyed by question_id, computed in
        dataset order (the single ordered writer lives in the CLI)."""
        def run(record: QuestionRecord) -> Ranking:
            return self.rank_question(record, method)

        if workers <= 1:
            rankings = [run(q) for q in dataset.questions]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rankings = list(pool.map(run, dataset.questions))
        return {r.question_id: r for r in rankings}

    def base_rankings_dataset(self, dataset: Dataset,
                              workers: int = 1) -> dict[str, dict[str, Ranking]]:
        """All three base model rankings per question, for the
        complementarity analysis and pair statistics."""
        def run(record: QuestionRecord) -> dict[str, Ranking]:
            return self.base_rankings(record)

        if workers <= 1:
            all_ranks = [run(q) for q in dataset.questions]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                all_ranks = list(pool.map(run, dataset.questions))
        out: dict[str, dict[str, Ranking]] = {m: {} for m in ("bm25", "sts", "is")}
        for record, ranks in zip(dataset.questions, all_ranks):
            for model, ranking in ranks.items():
                out[model][record.question_id] = ranking
        return out
