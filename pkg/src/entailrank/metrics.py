"""Retrieval metrics, aggregate reports, the base-model complementarity
analysis, and pair-count statistics.

All aggregates are macro-averaged: every question weighs 1. Questions whose
gold facts were rejected at ingest (or are empty) are excluded from the
averages and surfaced in the report header instead of silently deflating
the numbers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import Dataset, QuestionRecord
from .fusion import FusionConfig, Ranking, build_pair_sets, enumerate_pairs

DEFAULT_PRECISION_KS = (3, 5)
DEFAULT_RECALL_KS = (3, 5, 10)

BASE_MODELS = ("bm25", "sts", "is")

# Rows of the complementarity analysis: True = gold found in top-k by that
# model, False = missed by it, None = unconstrained. Order: (bm25, sts, is).
COMPLEMENTARITY_PATTERNS: tuple[tuple, ...] = (
    (True, False, False),
    (False, False, True),
    (False, True, False),
    (False, True, None),
    (False, None, True),
    (None, True, False),
    (None, False, True),
    (False, False, False),
)


def precision_at_k(ranking: Ranking, gold: frozenset[str] | set[str], k: int) -> float:
    """|top-k ∩ gold| / k. The denominator is k even when the pool is smaller,
    so a perfect system scores below 1 whenever k exceeds |gold|."""
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(1 for cid in ranking.top(k) if cid in gold)
    return hits / k


def recall_at_k(ranking: Ranking, gold: frozenset[str] | set[str], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not gold:
        raise ValueError("recall is undefined for an empty gold set")
    hits = sum(1 for cid in ranking.top(k) if cid in gold)
    return hits / len(gold)


def average_precision(ranking: Ranking, gold: frozenset[str] | set[str]) -> float:
    """Mean over gold items of the precision at each gold item's rank,
    computed over the full ranking (no depth cut)."""
    if not gold:
        raise ValueError("average precision is undefined for an empty gold set")
    hits = 0
    total = 0.0
    for pos, cid in enumerate(ranking.ids(), start=1):
        if cid in gold:
            hits += 1
            total += hits / pos
    return total / len(gold)


@dataclass(frozen=True)
class StrategyMetrics:
    p_at: dict[int, float]
    r_at: dict[int, float]
    map: float

    def as_row(self, p_ks: Sequence[int], r_ks: Sequence[int]) -> list[float]:
        return [self.p_at[k] for k in p_ks] + [self.map] + [self.r_at[k] for k in r_ks]


@dataclass(frozen=True)
class MetricsReport:
    strategies: dict[str, StrategyMetrics]
    question_count: int
    excluded_count: int
    config: dict
    provenance: dict
    precision_ks: tuple[int, ...] = DEFAULT_PRECISION_KS
    recall_ks: tuple[int, ...] = DEFAULT_RECALL_KS

    def _columns(self) -> list[str]:
        return ([f"P@{k}" for k in self.precision_ks] + ["MAP"]
                + [f"R@{k}" for k in self.recall_ks])

    def render_table(self) -> str:
        """Aligned text table, two decimals; full precision lives in the JSON."""
        cols = self._columns()
        width = max(len("Model"), *(len(name) for name in self.strategies)) + 2
        lines = [
            f"questions={self.question_count} excluded={self.excluded_count} "
            f"config={json.dumps(self.config, sort_keys=True)} "
            f"provenance={json.dumps(self.provenance, sort_keys=True)}",
            "Model".ljust(width) + "".join(c.rjust(7) for c in cols),
        ]
        for name, sm in self.strategies.items():
            row = sm.as_row(self.precision_ks, self.recall_ks)
            lines.append(name.ljust(width) + "".join(f"{v:7.2f}" for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "question_count": self.question_count,
            "excluded_count": self.excluded_count,
            "config": self.config,
            "provenance": self.provenance,
            "strategies": {
                name: {
                    "p_at": {str(k): v for k, v in sm.p_at.items()},
                    "r_at": {str(k): v for k, v in sm.r_at.items()},
                    "map": sm.map,
                }
                for name, sm in self.strategies.items()
            },
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        # leading comment row keeps the config and provenance attached
        buf.write(f"# config={json.dumps(self.config, sort_keys=True)} "
                  f"provenance={json.dumps(self.provenance, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model"] + self._columns())
        for name, sm in self.strategies.items():
            writer.writerow([name] + [repr(v) for v in sm.as_row(self.precision_ks, self.recall_ks)])
        return buf.getvalue()


def _eligible(dataset: Dataset) -> tuple[list[QuestionRecord], int]:
    eligible = [q for q in dataset.questions if q.gold_facts]
    return eligible, len(dataset.questions) - len(eligible) + len(dataset.rejections)


def evaluate_rankings(dataset: Dataset,
                      rankings_by_strategy: Mapping[str, Mapping[str, Ranking]],
                      config: FusionConfig | None = None,
                      provenance: Mapping[str, str] | None = None,
                      precision_ks: Sequence[int] = DEFAULT_PRECISION_KS,
                      recall_ks: Sequence[int] = DEFAULT_RECALL_KS) -> MetricsReport:
    """Macro-averaged P@k, MAP, R@k for each strategy over the dataset."""
    eligible, excluded = _eligible(dataset)
    if not eligible:
        raise ValueError("no questions with gold facts to evaluate")

    strategies: dict[str, StrategyMetrics] = {}
    for name, per_question in rankings_by_strategy.items():
        missing = [q.question_id for q in eligible if q.question_id not in per_question]
        if missing:
            raise ValueError(
                f"rankings for strategy {name!r} missing question ids: {missing[:5]}"
                + ("..." if len(missing) > 5 else ""))
        p_sums = {k: 0.0 for k in precision_ks}
        r_sums = {k: 0.0 for k in recall_ks}
        ap_sum = 0.0
        for q in eligible:
            ranking = per_question[q.question_id]
            gold = q.gold_ids()
            for k in precision_ks:
                p_sums[k] += precision_at_k(ranking, gold, k)
            for k in recall_ks:
                r_sums[k] += recall_at_k(ranking, gold, k)
            ap_sum += average_precision(ranking, gold)
        n = len(eligible)
        strategies[name] = StrategyMetrics(
            p_at={k: v / n for k, v in p_sums.items()},
            r_at={k: v / n for k, v in r_sums.items()},
            map=ap_sum / n,
        )
    return MetricsReport(
        strategies=strategies,
        question_count=len(eligible),
        excluded_count=excluded,
        config=config.to_dict() if config else {},
        provenance=dict(provenance or {}),
        precision_ks=tuple(precision_ks),
        recall_ks=tuple(recall_ks),
    )


@dataclass(frozen=True)
class ComplementarityReport:
    """Percentage of questions, per (in-set, out-set) pattern over the base
    models, with at least one gold evidence inside top-k for every True
    model and outside top-k for every False model."""

    rows: tuple[tuple[tuple, dict[int, float]], ...]
    question_count: int
    models: tuple[str, ...] = BASE_MODELS

    def render_table(self) -> str:
        ks = sorted(next(iter(self.rows))[1].keys()) if self.rows else []
        header = " ".join(f"{m:>8}" for m in self.models) + "".join(
            f"  %q(k={k})" for k in ks)
        lines = [header]
        marks = {True: "yes", False: "no", None: "-"}
        for pattern, pcts in self.rows:
            cells = " ".join(f"{marks[p]:>8}" for p in pattern)
            lines.append(cells + "".join(f"{pcts[k]:9.1f}" for k in ks))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "models": list(self.models),
            "question_count": self.question_count,
            "rows": [
                {
                    "pattern": ["yes" if p is True else "no" if p is False else "any"
                                for p in pattern],
                    "percent": {str(k): v for k, v in pcts.items()},
                }
                for pattern, pcts in self.rows
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _pattern_holds(pattern: tuple, ranks: Sequence[dict[str, int]],
                   gold: Iterable[str], k: int) -> bool:
    for cid in gold:
        ok = True
        for want, model_ranks in zip(pattern, ranks):
            if want is None:
                continue
            within = model_ranks[cid] <= k
            if within != want:
                ok = False
                break
        if ok:
            return True
    return False


def complementarity(base_rankings: Mapping[str, Mapping[str, Ranking]],
                    dataset: Dataset,
                    ks: Sequence[int] = (3, 5),
                    patterns: Sequence[tuple] = COMPLEMENTARITY_PATTERNS) -> ComplementarityReport:
    """How often each base model finds evidence the others miss.

    ``base_rankings`` maps model name (bm25/sts/is) to per-question rankings.
    Only argsort positions matter, never score magnitudes.
    """
    eligible, _ = _eligible(dataset)
    if not eligible:
        raise ValueError("no questions with gold facts")
    rows = []
    for pattern in patterns:
        pcts: dict[int, float] = {}
        for k in ks:
            count = 0
            for q in eligible:
                ranks = [base_rankings[m][q.question_id].ranks() for m in BASE_MODELS]
                if _pattern_holds(pattern, ranks, q.gold_ids(), k):
                    count += 1
            pcts[k] = 100.0 * count / len(eligible)
        rows.append((pattern, pcts))
    return ComplementarityReport(rows=tuple(rows), question_count=len(eligible))


def pair_count_stats(dataset: Dataset,
                     base_rankings: Mapping[str, Mapping[str, Ranking]],
                     k_values: Sequence[int],
                     cfg: FusionConfig | None = None) -> list[tuple[int, float]]:
    """Mean number of scored (a, b) pairs per question for each top-K cut."""
    cfg = cfg or FusionConfig()
    eligible, _ = _eligible(dataset)
    results = []
    for k in k_values:
        k_cfg = FusionConfig(alpha=cfg.alpha, beta=cfg.beta, k=k,
                             nest_enabled=cfg.nest_enabled,
                             initial_ranker=cfg.initial_ranker)
        total = 0
        for q in eligible:
            a_set, b_set = build_pair_sets(
                base_rankings["bm25"][q.question_id],
                base_rankings["sts"][q.question_id],
                base_rankings["is"][q.question_id],
                k_cfg, pool_order=q.pool_order())
            total += len(enumerate_pairs(a_set, b_set))
        results.append((k, total / len(eligible)))
    return results
