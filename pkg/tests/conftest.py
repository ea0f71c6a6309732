"""Shared fixtures: tiny hand-built pools and deterministic stub scorers."""

from __future__ import annotations

import pytest

from entailrank.corpus import CandidateSentence, QuestionRecord, make_candidate_id
from entailrank.scorer import BoundScorer


def make_pool(question_id: str, texts: list[str], titles: list[str] | None = None):
    """Candidates in source order; one sentence per title unless titles repeat."""
    sentences = []
    counters: dict[str, int] = {}
    for i, text in enumerate(texts):
        title = titles[i] if titles else f"Doc {i}"
        idx = counters.get(title, 0)
        counters[title] = idx + 1
        sentences.append(CandidateSentence(
            doc_title=title, sent_idx=idx, text=text,
            candidate_id=make_candidate_id(question_id, title, idx)))
    return tuple(sentences)


def make_record(question_id: str, question: str, texts: list[str],
                gold_positions: list[int] = (), titles: list[str] | None = None,
                question_type: str = "bridge") -> QuestionRecord:
    candidates = make_pool(question_id, texts, titles)
    gold = frozenset((candidates[i].doc_title, candidates[i].sent_idx)
                     for i in gold_positions)
    return QuestionRecord(question_id=question_id, question_text=question,
                          question_type=question_type, candidates=candidates,
                          gold_facts=gold)


class MappingBackend:
    """Backend that scores (query, passage) pairs from an explicit mapping.

    Unmapped pairs fall back to a default; every batch call is counted.
    """

    kind = "proxy"

    def __init__(self, mapping: dict[tuple[str, str], float], default: float = 0.0):
        self.mapping = dict(mapping)
        self.default = default
        self.calls = 0
        self.pairs_seen: list[tuple[str, str]] = []

    def score_batch(self, pairs):
        self.calls += 1
        self.pairs_seen.extend(pairs)
        return [self.mapping.get((q, p), self.default) for q, p in pairs]


@pytest.fixture
def mapping_scorer():
    def build(mapping: dict[tuple[str, str], float], default: float = 0.0,
              signal: str = "sts") -> BoundScorer:
        return BoundScorer(signal, MappingBackend(mapping, default))
    return build
