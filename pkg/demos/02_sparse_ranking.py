"""Lexical ranking with per-question BM25.

The index lives entirely inside one question's candidate pool: document
frequencies, lengths, and the average length all come from those ten or so
sentences. That is exactly the statistic the distractor setting calls for,
and it keeps every question's scores independent of every other's.
"""

from entailrank import build_index, bm25_score, rank_sparse, tokenize
from entailrank.corpus import CandidateSentence, make_candidate_id

question = "What nationality was James Henry Miller's wife?"
texts = [
    ("Ewan MacColl", "James Henry Miller, better known by his stage name "
                     "Ewan MacColl, was an English folk singer."),
    ("Peggy Seeger", "Margaret Seeger is an American folksinger."),
    ("Peggy Seeger", "She was married to the singer Ewan MacColl until 1989."),
    ("Red Herring Lane", "The Miller Bridge crosses a shallow river."),
    ("Red Herring Lane", "Its cobblestones date from the nineteenth century."),
]

pool = []
seen = {}
for title, text in texts:
    idx = seen.get(title, 0)
    seen[title] = idx + 1
    pool.append(CandidateSentence(title, idx, text,
                                  make_candidate_id("demo", title, idx)))

print("query tokens:", tokenize(question))
index = build_index(pool)
print(f"pool size M = {index.size}, average length = {index.avg_length:.2f}")
print("df('miller') =", index.doc_freq["miller"],
      " idf =", round(index.idf("miller"), 4))
print("df('nationality') =", index.doc_freq.get("nationality", 0),
      "(absent terms contribute nothing)\n")

ranking = rank_sparse(index, question, "demo")
print("BM25 ranking (score, sentence):")
for cid, score in ranking.items:
    cand = next(c for c in pool if c.candidate_id == cid)
    print(f"  {score:6.3f}  [{cand.doc_title}:{cand.sent_idx}] {cand.text[:60]}")

print("\nNote the second gold sentence about the marriage ranks on its")
print("'Ewan MacColl' overlap, while the purely lexical 'Miller Bridge'")
print("decoy also scores - exact matching alone cannot tell them apart:")
for cid in (pool[3].candidate_id, pool[2].candidate_id):
    print(f"  {bm25_score(index, question, cid):6.3f}  {cid}")
