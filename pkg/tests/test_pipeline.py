"""Engine-level wiring: base rankings, analyses, and worker-pool behavior."""

import dataclasses

import pytest

from entailrank.fusion import FusionConfig
from entailrank.metrics import complementarity, pair_count_stats
from entailrank.pipeline import Engine, EngineConfig
from entailrank.synthetic import generate_dataset


@pytest.fixture(scope="module")
def corpus():
    return generate_dataset(n_questions=60, seed=21)


@pytest.fixture(scope="module")
def engine():
    return Engine(EngineConfig())


def test_base_models_capture_complementary_signals(corpus, engine):
    """The entailment model finds evidence both lexical-side models miss on
    a meaningful share of questions, and vice versa."""
    base = engine.base_rankings_dataset(corpus)
    report = complementarity(base, corpus, ks=(3, 5))
    rows = {pattern: pcts for pattern, pcts in report.rows}
    only_is = rows[(False, False, True)]
    assert only_is[3] > 20.0
    sts_not_is = rows[(None, True, False)]
    assert sts_not_is[3] > 20.0
    for pcts in rows.values():
        assert all(0.0 <= v <= 100.0 for v in pcts.values())


def test_pair_counts_grow_with_k(corpus, engine):
    base = engine.base_rankings_dataset(corpus)
    stats = dict(pair_count_stats(corpus, base, [1, 2, 3, 5]))
    assert stats[1] <= stats[2] <= stats[3] <= stats[5]
    assert stats[3] >= 6.0  # |A| >= 3, |B| = 3 on a 10-sentence pool


def test_worker_pool_matches_serial(corpus, engine):
    serial = engine.rank_dataset(corpus, "earnest", workers=1)
    pooled = engine.rank_dataset(corpus, "earnest", workers=4)
    assert {q: r.items for q, r in serial.items()} == \
        {q: r.items for q, r in pooled.items()}


def test_nest_disabled_engine_matches_ear(corpus):
    plain = Engine(EngineConfig())
    disabled = Engine(EngineConfig(fusion=FusionConfig(nest_enabled=False)))
    sample = corpus.questions[:8]
    for record in sample:
        ear = plain.rank_question(record, "ear")
        earnest_off = disabled.rank_question(record, "earnest")
        assert ear.ids() == earnest_off.ids()


def test_provenance_reports_backend(engine, corpus):
    engine.rank_question(corpus.questions[0], "simcom")
    prov = engine.provenance()
    assert prov == {"sts": "proxy", "is": "proxy"}


def test_every_strategy_outputs_pool_permutation(corpus, engine):
    record = corpus.questions[0]
    expected = sorted(record.pool_order())
    for method in ("bm25", "sts", "is", "ar", "simcom", "ear", "earnest"):
        ranking = engine.rank_question(record, method)
        assert sorted(ranking.ids()) == expected
        scores = [s for _, s in ranking.items]
        assert scores == sorted(scores, reverse=True)


def test_unknown_method_rejected(engine, corpus):
    with pytest.raises(ValueError):
        engine.rank_question(corpus.questions[0], "mystery")
