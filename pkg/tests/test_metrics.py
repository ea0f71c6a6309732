"""Retrieval metrics vs a brute-force reference, plus report machinery."""

import csv
import io
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entailrank.corpus import Dataset
from entailrank.fusion import FusionConfig, Ranking
from entailrank.metrics import (COMPLEMENTARITY_PATTERNS, average_precision,
                                complementarity, evaluate_rankings,
                                pair_count_stats, precision_at_k, recall_at_k)

from conftest import make_record


def ranking_of(ids, question_id="q1", strategy="x"):
    return Ranking(question_id=question_id,
                   items=tuple((cid, float(len(ids) - i)) for i, cid in enumerate(ids)),
                   strategy=strategy)


# --- independent brute-force reference ---

def ref_precision_at_k(ranked_ids, gold, k):
    return sum(1 for cid in ranked_ids[:k] if cid in gold) / k


def ref_recall_at_k(ranked_ids, gold, k):
    return sum(1 for cid in ranked_ids[:k] if cid in gold) / len(gold)


def ref_average_precision(ranked_ids, gold):
    total, hits = 0.0, 0
    for i, cid in enumerate(ranked_ids, start=1):
        if cid in gold:
            hits += 1
            total += hits / i
    return total / len(gold)


class TestPrecision:
    def test_two_gold_in_top_three(self):
        r = ranking_of(["a", "b", "c", "d"])
        assert precision_at_k(r, {"a", "c"}, 3) == pytest.approx(2 / 3)

    def test_empty_gold_is_zero(self):
        r = ranking_of(["a", "b"])
        assert precision_at_k(r, set(), 3) == 0.0

    def test_perfect_system_capped_by_k(self):
        # 2 gold, perfect ranking, k=5 -> 2/5 (denominator is k, not pool)
        r = ranking_of(["g1", "g2", "x", "y", "z", "w"])
        assert precision_at_k(r, {"g1", "g2"}, 5) == pytest.approx(2 / 5)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            precision_at_k(ranking_of(["a"]), {"a"}, 0)


class TestRecall:
    def test_all_gold_inside(self):
        r = ranking_of(["a", "b", "c"])
        assert recall_at_k(r, {"a", "b"}, 2) == 1.0

    def test_none_inside(self):
        r = ranking_of(["a", "b", "c"])
        assert recall_at_k(r, {"c"}, 2) == 0.0

    def test_half(self):
        r = ranking_of(["a", "b", "c", "d"])
        assert recall_at_k(r, {"a", "d"}, 3) == 0.5

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            recall_at_k(ranking_of(["a"]), set(), 3)


class TestAveragePrecision:
    def test_gold_at_one_and_three(self):
        r = ranking_of(["g1", "x", "g2", "y"])
        assert average_precision(r, {"g1", "g2"}) == pytest.approx((1 + 2 / 3) / 2)

    def test_all_gold_on_top(self):
        r = ranking_of(["g1", "g2", "x"])
        assert average_precision(r, {"g1", "g2"}) == 1.0

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            average_precision(ranking_of(["a"]), set())

    def test_ap_one_iff_gold_on_top(self):
        r = ranking_of(["x", "g1", "g2"])
        assert average_precision(r, {"g1", "g2"}) < 1.0


def random_instance(rng):
    pool = [f"c{i}" for i in range(rng.randint(1, 20))]
    rng.shuffle(pool)
    n_gold = rng.randint(1, min(4, len(pool)))
    gold = set(rng.sample(pool, n_gold))
    return pool, gold


def test_oracle_equivalence_1000_instances():
    rng = random.Random(20240809)
    for _ in range(1000):
        pool, gold = random_instance(rng)
        r = ranking_of(pool)
        for k in (1, 3, 5, 10):
            assert abs(precision_at_k(r, gold, k) - ref_precision_at_k(pool, gold, k)) < 1e-9
            assert abs(recall_at_k(r, gold, k) - ref_recall_at_k(pool, gold, k)) < 1e-9
        assert abs(average_precision(r, gold) - ref_average_precision(pool, gold)) < 1e-9


@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_property_metric_identities(data):
    n = data.draw(st.integers(min_value=1, max_value=15))
    pool = [f"c{i}" for i in range(n)]
    gold = set(data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=4,
                                  unique=True)))
    r = ranking_of(pool)
    prev = 0.0
    for k in range(1, n + 2):
        rec = recall_at_k(r, gold, k)
        assert rec >= prev - 1e-12  # non-decreasing in k
        prev = rec
        p = precision_at_k(r, gold, k)
        assert abs(p * k - round(p * k)) < 1e-9
        assert abs(rec * len(gold) - round(rec * len(gold))) < 1e-9
    # AP = 1 iff gold occupies the top-|gold| positions
    ap = average_precision(r, gold)
    tops = set(pool[:len(gold)])
    assert (abs(ap - 1.0) < 1e-12) == (tops == gold)


def two_question_dataset():
    q1 = make_record("q1", "one?", ["a", "b", "c", "d"], gold_positions=[0, 2])
    q2 = make_record("q2", "two?", ["e", "f", "g"], gold_positions=[1])
    return Dataset(questions=(q1, q2), source_path="fixture"), q1, q2


class TestEvaluate:
    def test_macro_average(self):
        ds, q1, q2 = two_question_dataset()
        perfect1 = ranking_of([q1.pool_order()[i] for i in (0, 2, 1, 3)], "q1")
        worst2 = ranking_of([q2.pool_order()[i] for i in (0, 2, 1)], "q2")
        report = evaluate_rankings(ds, {"m": {"q1": perfect1, "q2": worst2}},
                                   config=FusionConfig())
        sm = report.strategies["m"]
        # q1: AP=1; q2: gold at rank 3 -> AP=1/3
        assert sm.map == pytest.approx((1.0 + 1 / 3) / 2)
        assert sm.r_at[3] == pytest.approx((1.0 + 1.0) / 2)
        assert report.question_count == 2

    def test_missing_question_ids_listed(self):
        ds, q1, _ = two_question_dataset()
        with pytest.raises(ValueError, match="q2"):
            evaluate_rankings(ds, {"m": {"q1": ranking_of(q1.pool_order(), "q1")}})

    def test_empty_gold_questions_excluded_and_counted(self):
        q1 = make_record("q1", "one?", ["a", "b"], gold_positions=[0])
        q2 = make_record("q2", "two?", ["c", "d"], gold_positions=[])
        ds = Dataset(questions=(q1, q2), source_path="x")
        report = evaluate_rankings(
            ds, {"m": {"q1": ranking_of(q1.pool_order(), "q1")}})
        assert report.question_count == 1
        assert report.excluded_count == 1

    def test_report_formats(self):
        ds, q1, q2 = two_question_dataset()
        rankings = {"m": {"q1": ranking_of(q1.pool_order(), "q1"),
                          "q2": ranking_of(q2.pool_order(), "q2")}}
        report = evaluate_rankings(ds, rankings, config=FusionConfig(),
                                   provenance={"sts": "proxy"})
        table = report.render_table()
        assert "P@3" in table and "MAP" in table and "R@10" in table
        # two decimals in the table
        assert any(cell.count(".") == 1 and len(cell.split(".")[1]) == 2
                   for cell in table.split())
        payload = json.loads(report.to_json())
        assert payload["strategies"]["m"]["map"] == report.strategies["m"].map
        csv_text = report.to_csv()
        assert csv_text.startswith("# config=")  # snapshot travels with the CSV
        rows = list(csv.reader(io.StringIO(csv_text.split("\n", 1)[1])))
        assert rows[0][0] == "model" and rows[1][0] == "m"
        assert float(rows[1][3]) == report.strategies["m"].map


def base_rankings_for(records, orders):
    """orders: {model: {qid: list of positions}}"""
    out = {}
    for model, per_q in orders.items():
        out[model] = {}
        for record in records:
            pool = record.pool_order()
            out[model][record.question_id] = ranking_of(
                [pool[i] for i in per_q[record.question_id]],
                record.question_id, model)
    return out


class TestComplementarity:
    def test_single_question_hand_enumeration(self):
        record = make_record("q1", "?", ["a", "b", "c", "d", "e"], gold_positions=[0, 4])
        ds = Dataset(questions=(record,), source_path="x")
        # gold 0: top-3 for bm25 and sts, not is; gold 4: top-3 only for is
        orders = {
            "bm25": {"q1": [0, 1, 2, 3, 4]},
            "sts": {"q1": [1, 0, 2, 3, 4]},
            "is": {"q1": [4, 1, 2, 3, 0]},
        }
        report = complementarity(base_rankings_for([record], orders), ds, ks=(3,))
        rows = {pattern: pcts for pattern, pcts in report.rows}
        assert rows[(False, False, True)][3] == 100.0   # gold 4 pattern
        assert rows[(True, False, False)][3] == 0.0     # no bm25-only evidence
        assert rows[(None, False, True)][3] == 100.0
        assert rows[(False, False, False)][3] == 0.0

    def test_all_models_find_everything(self):
        record = make_record("q1", "?", ["a", "b", "c"], gold_positions=[0])
        ds = Dataset(questions=(record,), source_path="x")
        orders = {m: {"q1": [0, 1, 2]} for m in ("bm25", "sts", "is")}
        report = complementarity(base_rankings_for([record], orders), ds, ks=(3,))
        for pattern, pcts in report.rows:
            if False in pattern:
                assert pcts[3] == 0.0

    def test_patterns_cover_table_rows(self):
        assert len(COMPLEMENTARITY_PATTERNS) == 8
        assert (False, False, False) in COMPLEMENTARITY_PATTERNS

    def test_score_scale_independent(self):
        """Rows depend on argsort positions only, never score magnitudes."""
        record = make_record("q1", "?", ["a", "b", "c", "d"], gold_positions=[1])
        ds = Dataset(questions=(record,), source_path="x")
        orders = {
            "bm25": {"q1": [1, 0, 2, 3]},
            "sts": {"q1": [0, 2, 1, 3]},
            "is": {"q1": [3, 1, 0, 2]},
        }
        base = base_rankings_for([record], orders)
        rescaled = {
            model: {qid: Ranking(r.question_id,
                                 tuple((c, s * 0.001 + 5.0) for c, s in r.items),
                                 r.strategy)
                    for qid, r in per_q.items()}
            for model, per_q in base.items()
        }
        assert complementarity(base, ds).rows == complementarity(rescaled, ds).rows


class TestPairCountStats:
    def test_overlap_two_and_disjoint(self):
        record = make_record("q1", "?", [f"s{i}" for i in range(9)], gold_positions=[0])
        ds = Dataset(questions=(record,), source_path="x")
        orders_overlap = {
            "bm25": {"q1": [0, 1, 2, 3, 4, 5, 6, 7, 8]},
            "sts": {"q1": [1, 2, 6, 0, 3, 4, 5, 7, 8]},
            "is": {"q1": [7, 5, 3, 0, 1, 2, 4, 6, 8]},
        }
        stats = pair_count_stats(ds, base_rankings_for([record], orders_overlap), [3])
        assert stats == [(3, 12.0)]
        orders_disjoint = {
            "bm25": {"q1": [0, 1, 2, 3, 4, 5, 6, 7, 8]},
            "sts": {"q1": [3, 4, 5, 0, 1, 2, 6, 7, 8]},
            "is": {"q1": [6, 7, 8, 0, 1, 2, 3, 4, 5]},
        }
        stats = pair_count_stats(ds, base_rankings_for([record], orders_disjoint), [1, 3])
        assert stats == [(1, 2.0), (3, 18.0)]

    def test_mean_matches_brute_force(self):
        rng = random.Random(7)
        records, orders = [], {"bm25": {}, "sts": {}, "is": {}}
        for qi in range(12):
            n = rng.randint(4, 10)
            record = make_record(f"q{qi}", "?", [f"s{i}" for i in range(n)],
                                 gold_positions=[0])
            records.append(record)
            for model in orders:
                perm = list(range(n))
                rng.shuffle(perm)
                orders[model][f"q{qi}"] = perm
        ds = Dataset(questions=tuple(records), source_path="x")
        base = base_rankings_for(records, orders)
        for k in (1, 2, 3):
            (got_k, got_mean), = pair_count_stats(ds, base, [k])
            counts = []
            for record in records:
                qid = record.question_id
                top_a = set(base["bm25"][qid].top(k)) | set(base["sts"][qid].top(k))
                top_b = list(base["is"][qid].top(k))
                counts.append(sum(1 for a in top_a for b in top_b if a != b))
            assert got_mean == pytest.approx(sum(counts) / len(counts))
