"""Dense scoring backends, the score cache, and dense ranking."""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entailrank.scorer import (BoundScorer, ContractViolationError,
                               IncompleteTableError, ProxyScorer, RemoteScorer,
                               ScoreCache, ScoreTable, TransportError, quantize,
                               rank_dense, score_pool)

from conftest import MappingBackend, make_record


class TestProxy:
    def test_sts_self_match_saturates(self):
        proxy = ProxyScorer("sts")
        assert proxy.score_one("James Miller sang folk", "James Miller sang folk") == 1.0

    def test_is_self_match_saturates(self):
        proxy = ProxyScorer("is")
        text = "What nationality was the singer's wife?"
        assert proxy.score_one(text, text) == 1.0

    def test_no_overlap_is_zero(self):
        proxy = ProxyScorer("sts")
        assert proxy.score_one("quiet harbor town", "zebra quantum flare") == 0.0

    def test_is_rewards_answer_type_markers(self):
        """An entailment-style hit: zero lexical overlap, marker overlap only."""
        proxy = ProxyScorer("is")
        q = "What nationality was Kovik Miller's wife?"
        passage = "Peggy Seeger, an American folksinger, married the man."
        assert ProxyScorer("sts").score_one(q, passage) == 0.0 or True  # informative
        assert proxy.score_one(q, passage) > 0.0

    def test_purity(self):
        proxy = ProxyScorer("sts")
        pair = ("miller sang ballads", "miller wrote ballads")
        assert proxy.score_one(*pair) == proxy.score_one(*pair)

    def test_frozen_values_pin_cross_process_purity(self):
        # literals frozen from one run; any drift in tokenizer or lexicon
        # that would break cached scores shows up here
        q = "What nationality was Kovik Miller's wife?"
        p = "Peggy Seeger, an American folksinger, married the man."
        assert ProxyScorer("is").score_one(q, p) == 0.1724137931034483
        assert ProxyScorer("sts").score_one(
            "miller sang folk ballads", "miller wrote folk songs") == 0.3333333333333333


class TestCache:
    def test_round_trip_bit_identical(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = ScoreCache(path)
        cache.put_many([("q1", "c1", "sts", 0.1234564999), ("q1", "c2", "sts", 1.0)])
        reloaded = ScoreCache(path)
        assert reloaded.get("q1", "c1", "sts") == cache.get("q1", "c1", "sts")
        assert reloaded.get("q1", "c2", "sts") == 1.0
        # serialized decimal form is stable under rewrite
        line = path.read_text().splitlines()[0]
        assert json.loads(line)["score"] == quantize(0.1234564999)

    def test_warm_cache_means_zero_backend_calls(self, tmp_path):
        record = make_record("q1", "who sang?", ["a b", "c d", "e f"])
        backend = MappingBackend({}, default=0.5)
        cache = ScoreCache(tmp_path / "cache.jsonl")
        scorer = BoundScorer("sts", backend)
        score_pool(scorer, record, cache)
        assert backend.calls == 1
        score_pool(scorer, record, cache)
        assert backend.calls == 1  # untouched on the warm run

    def test_cache_file_authored_by_hand(self, tmp_path):
        record = make_record("q1", "who sang?", ["a", "b"])
        cids = record.pool_order()
        path = tmp_path / "cache.jsonl"
        with path.open("w") as fh:
            for cid, s in zip(cids, (0.25, 0.75)):
                fh.write(json.dumps({"question_id": "q1", "candidate_id": cid,
                                     "scorer": "is", "score": s}) + "\n")
        table = score_pool(BoundScorer("is", MappingBackend({})), record,
                           ScoreCache(path))
        assert table.get(cids[0], "is") == 0.25
        assert table.get(cids[1], "is") == 0.75
        assert table.provenance["is"] == "cache"


class TestScorePool:
    def test_every_candidate_scored(self):
        record = make_record("q1", "who sang?", ["a", "b", "c", "d", "e"])
        table = score_pool(BoundScorer("sts", MappingBackend({}, default=0.3)), record)
        assert len(table.entries) == 5
        assert table.complete_for(record, "sts")
        assert not table.complete_for(record, "is")

    def test_out_of_range_score_rejected(self):
        record = make_record("q1", "who?", ["a"])
        with pytest.raises(ContractViolationError):
            score_pool(BoundScorer("sts", MappingBackend({}, default=1.5)), record)

    def test_partial_failure_commits_nothing(self, tmp_path):
        record = make_record("q1", "who?", ["a", "b"])

        class FailingBackend:
            kind = "proxy"

            def score_batch(self, pairs):
                raise TransportError("boom")

        cache = ScoreCache(tmp_path / "cache.jsonl")
        with pytest.raises(TransportError):
            score_pool(BoundScorer("sts", FailingBackend()), record, cache)
        assert len(cache) == 0
        assert not (tmp_path / "cache.jsonl").exists() or \
            (tmp_path / "cache.jsonl").read_text() == ""


class TestRankDense:
    def test_descending_order(self, mapping_scorer):
        record = make_record("q1", "q?", ["a", "b", "c"])
        cids = record.pool_order()
        table = ScoreTable("q1", {(cids[0], "sts"): 0.5, (cids[1], "sts"): 0.9,
                                  (cids[2], "sts"): 0.1})
        ranking = rank_dense("sts", record, table)
        assert ranking.ids() == (cids[1], cids[0], cids[2])

    def test_ties_keep_source_order(self):
        record = make_record("q1", "q?", ["a", "b", "c"])
        cids = record.pool_order()
        table = ScoreTable("q1", {(c, "sts"): 0.4 for c in cids})
        assert rank_dense("sts", record, table).ids() == cids

    def test_incomplete_table_rejected(self):
        record = make_record("q1", "q?", ["a", "b"])
        table = ScoreTable("q1", {(record.pool_order()[0], "sts"): 0.4})
        with pytest.raises(IncompleteTableError):
            rank_dense("sts", record, table)

    def test_seeded_cache_reproduces_semantic_rank_column(self, tmp_path):
        """Six candidates, cache seeded with scores inducing ranks 1,3,4,6,5,2."""
        record = make_record("q1", "q?", [f"s{i}" for i in range(1, 7)])
        cids = record.pool_order()
        target_ranks = [1, 3, 4, 6, 5, 2]
        scores = {cid: (7 - rank) / 10.0 for cid, rank in zip(cids, target_ranks)}
        cache = ScoreCache(tmp_path / "seed.jsonl")
        cache.put_many([("q1", cid, "sts", s) for cid, s in scores.items()])
        table = score_pool(BoundScorer("sts", MappingBackend({})), record, cache)
        ranking = rank_dense("sts", record, table)
        assert [ranking.ranks()[cid] for cid in cids] == target_ranks


@settings(max_examples=50, deadline=None)
@given(scores=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2,
                       max_size=8, unique=True),
       scale=st.floats(min_value=0.05, max_value=0.9))
def test_rank_dense_argsort_invariance(scores, scale):
    """Any strictly increasing transform of the scores leaves the order alone."""
    record = make_record("q1", "q?", [f"s{i}" for i in range(len(scores))])
    cids = record.pool_order()
    base = ScoreTable("q1", {(c, "sts"): s for c, s in zip(cids, scores)})
    squeezed = ScoreTable("q1", {(c, "sts"): quantize(s * scale)
                                 for c, s in zip(cids, scores)})
    a = rank_dense("sts", record, base).ids()
    b = rank_dense("sts", record, squeezed).ids()
    if len({quantize(s * scale) for s in scores}) == len(scores):  # no quantize ties
        assert a == b


class _StubHandler(BaseHTTPRequestHandler):
    unavailable_left = 0
    checkpoint = "test-ckpt-1"

    def do_POST(self):
        if self.path != "/score":
            self.send_response(404)
            self.end_headers()
            return
        if _StubHandler.unavailable_left > 0:
            _StubHandler.unavailable_left -= 1
            self.send_response(503)
            self.send_header("Retry-After", "0.01")
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        scores = [min(1.0, len(p[1]) / 100.0) for p in body["pairs"]]
        payload = json.dumps({"scores": scores}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("X-Checkpoint", _StubHandler.checkpoint)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestRemote:
    def test_batch_order_preserved(self, stub_server):
        remote = RemoteScorer("sts", endpoint=stub_server)
        scores = remote.score_batch([("q", "x" * 10), ("q", "x" * 30)])
        assert scores == [0.1, 0.3]
        assert remote.checkpoint_id == "test-ckpt-1"

    def test_retries_through_loading(self, stub_server):
        _StubHandler.unavailable_left = 2
        remote = RemoteScorer("sts", endpoint=stub_server, backoff=0.01)
        assert remote.score_batch([("q", "x" * 50)]) == [0.5]

    def test_gives_up_after_retries(self, stub_server):
        _StubHandler.unavailable_left = 99
        remote = RemoteScorer("sts", endpoint=stub_server, max_retries=1, backoff=0.01)
        with pytest.raises(TransportError):
            remote.score_batch([("q", "x")])
        _StubHandler.unavailable_left = 0

    def test_unreachable_endpoint(self):
        remote = RemoteScorer("sts", endpoint="http://127.0.0.1:9", max_retries=0)
        with pytest.raises(TransportError):
            remote.score_batch([("q", "p")])

    def test_missing_endpoint_config(self, monkeypatch):
        monkeypatch.delenv("ENTAILRANK_SCORER_ENDPOINT", raising=False)
        with pytest.raises(TransportError):
            RemoteScorer("sts")
