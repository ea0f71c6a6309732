"""The four fusion strategies, on worked micro-examples.

1. Average ranking sums each sentence's ranks across the three base models.
2. The score combination normalizes each model's score vector to unit
   length and mixes them with weights (alpha for semantic, beta for
   entailment), averaging over three signals where the sentence has any
   lexical match and over two where it has none.
3. Pair re-ranking scores concatenated sentence pairs drawn from the
   lexical/semantic top-K (set A) and the entailment top-K (set B) - the
   best pair becomes ranks 1-2 and re-ranks everything else as part of an
   augmented query.
4. The entity-aware variant doubles a pair's score when its two sentences
   mention a common name, which rescues pairs that read less fluently but
   are actually connected.
"""

from entailrank import (FusionConfig, Ranking, average_rank, earnest_pair_score,
                        normalize_scores, qer_scores)
from entailrank.corpus import CandidateSentence, make_candidate_id
from entailrank.scorer import BoundScorer, ProxyScorer


def ranking_from_ranks(ids, ranks, strategy):
    order = [cid for _, cid in sorted(zip(ranks, ids))]
    return Ranking("demo", tuple((cid, float(len(ids) - i))
                                 for i, cid in enumerate(order)), strategy)


# --- 1. average ranking ---
ids = [f"S{i}" for i in range(1, 7)]
base = [
    ranking_from_ranks(ids, [1, 4, 3, 5, 6, 2], "bm25"),
    ranking_from_ranks(ids, [1, 3, 4, 6, 5, 2], "sts"),
    ranking_from_ranks(ids, [5, 2, 6, 3, 1, 4], "is"),
]
fused = average_rank(base, pool_order=ids)
print("average ranking: rank columns -> rank sums -> fused order")
for cid, score in fused.items:
    cols = [r.ranks()[cid] for r in base]
    print(f"  {cid}: ranks {cols} sum {-score:.0f}")
print("  fused order:", " > ".join(fused.ids()), "\n")

# --- 2. score combination ---
bm25_raw = [2.0, 0.0, 1.0]
sts_raw = [0.5, 0.3, 0.1]
is_raw = [0.2, 0.6, 0.4]
print("score combination (alpha=3, beta=1):")
print("  unit-normalized semantic vector:", normalize_scores(sts_raw).round(3).tolist())
for i, q in enumerate(qer_scores(bm25_raw, sts_raw, is_raw, 3.0, 1.0)):
    branch = "3-signal" if bm25_raw[i] > 0 else "2-signal"
    print(f"  candidate {i}: combined {q:.4f} ({branch} branch)")
print()

# --- 3 & 4. pair scoring with and without the entity promotion ---
question = "What nationality was James Henry Miller's wife?"
gold_a = CandidateSentence(
    "Ewan MacColl", 0,
    "James Henry Miller, better known by the stage name Ewan MacColl, "
    "performed folk ballads.", make_candidate_id("demo", "Ewan MacColl", 0))
gold_b = CandidateSentence(
    "Peggy Seeger", 0,
    "Margaret Seeger is an American folksinger married to Ewan MacColl.",
    make_candidate_id("demo", "Peggy Seeger", 0))
trap = CandidateSentence(
    "Harbor Notes", 0,
    "A Danish widow always asked what the James Street painters earned.",
    make_candidate_id("demo", "Harbor Notes", 0))

scorer = BoundScorer("sts", ProxyScorer("sts"))
from entailrank import share_entity  # noqa: E402

print("pair scoring:")
for left, right, label in [(gold_a, gold_b, "gold pair"),
                           (gold_a, trap, "trap pair")]:
    raw = scorer.score(question, f"{left.text} {right.text}")
    shared = share_entity(left, right)
    boosted = earnest_pair_score(question, left, right, scorer, share_entity)
    print(f"  {label}: raw {raw:.4f}, shares entity: {shared}, "
          f"entity-aware {boosted:.4f}")
print("\nThe trap echoes question words, so raw pair similarity prefers it;")
print("the shared 'Ewan MacColl' mention doubles the gold pair past it.")
