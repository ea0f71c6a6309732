"""Ensemble evidence retrieval for multi-hop question answering.

Combines a lexical ranker, a semantic-similarity scorer, and a
question-entailment scorer, then fuses them with average ranking, weighted
score combination, or entailment-aware pair re-ranking (with an optional
shared-named-entity promotion).
"""

from .corpus import (CandidateSentence, Dataset, QuestionRecord,
                     candidate_pool, filter_bridge, ingest_hotpot,
                     load_dataset, make_candidate_id)
from .entities import EntityMatcher, extract_entities, fuzzy_match, normalize_entity, share_entity
from .fusion import (FusionConfig, Ranking, average_rank, build_pair_sets,
                     ear_rank, earnest_pair_score, earnest_rank,
                     enumerate_pairs, normalize_scores, qer_scores, simcom)
from .metrics import (ComplementarityReport, MetricsReport, average_precision,
                      complementarity, evaluate_rankings, pair_count_stats,
                      precision_at_k, recall_at_k)
from .pipeline import Engine, EngineConfig, METHODS
from .scorer import (BoundScorer, ProxyScorer, RemoteScorer, ScoreCache,
                     ScoreTable, make_backend, rank_dense, score_pool)
from .sparse import BM25Config, SparseIndex, bm25_score, build_index, rank_sparse, tokenize

__version__ = "0.1.0"
