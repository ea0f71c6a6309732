"""Two complementary dense relevance signals.

The semantic-similarity scorer asks "do the question and the sentence talk
about the same thing?". The entailment scorer asks "could the sentence
answer this kind of question?". A second-hop evidence sentence usually
shares nothing with the question lexically - the wife's nationality lives
in a sentence that never mentions the husband named by the question - yet
it is exactly what the entailment signal rewards.

The proxy backends shown here are the deterministic, model-free stand-ins
the test suite uses; the remote backend swaps in real cross-encoders
without touching any of this code.
"""

from entailrank import ProxyScorer

question = "What nationality was James Henry Miller's wife?"
sentences = [
    ("first hop (lexical overlap)",
     "James Henry Miller, better known by his stage name Ewan MacColl, "
     "was an English folk singer."),
    ("second hop (entailment only)",
     "Margaret Seeger is an American folksinger married to Ewan MacColl."),
    ("decoy (marker words, wrong entities)",
     "A Danish painter married a sculptor from the coast."),
    ("unrelated filler",
     "Seasonal rainfall shaped the valley economy for generations."),
]

sts = ProxyScorer("sts")
is_ = ProxyScorer("is")

print(f"Q: {question}\n")
print(f"{'semantic':>9} {'entailment':>11}   sentence")
for label, text in sentences:
    print(f"{sts.score_one(question, text):9.3f} "
          f"{is_.score_one(question, text):11.3f}   {label}")

print("\nThe second hop scores 0 on token overlap but clearly nonzero on")
print("the entailment proxy ('American' answers 'what nationality', and")
print("'married' answers 'wife'). The decoy shows why entailment alone")
print("is not enough either: it has the right vocabulary but the wrong")
print("entities, which is what the ensemble strategies sort out.")
