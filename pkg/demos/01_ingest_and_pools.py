"""Loading distractor-style data into candidate pools.

Each question arrives with a handful of titled paragraphs; the engine
flattens them into one ordered pool of candidate sentences, keyed by
(document title, sentence index), and validates that every gold supporting
fact points at a real sentence.
"""

import json
import tempfile
from pathlib import Path

from entailrank import candidate_pool, filter_bridge, ingest_hotpot

records = [
    {
        "_id": "5a8b57f25542995d1e6f1371",
        "question": "What nationality was James Henry Miller's wife?",
        "answer": "American",
        "type": "bridge",
        "context": [
            ["Ewan MacColl", [
                "James Henry Miller (25 January 1915 - 22 October 1989), better "
                "known by his stage name Ewan MacColl, was an English folk singer "
                "and songwriter.",
                "He is remembered for the songs he wrote for radio ballads.",
            ]],
            ["Peggy Seeger", [
                "Margaret \"Peggy\" Seeger (born June 17, 1935) is an American "
                "folksinger.",
                "She is also well known in Britain, where she has lived for more "
                "than 30 years, and was married to the singer and songwriter "
                "Ewan MacColl until his death in 1989.",
            ]],
            ["Red Herring Lane", [
                "Red Herring Lane is a short street with a fish market.",
                "Its cobblestones date from the nineteenth century.",
            ]],
        ],
        "supporting_facts": [["Ewan MacColl", 0], ["Peggy Seeger", 0],
                             ["Peggy Seeger", 1]],
    },
    {   # a comparison-type question, filtered out below
        "_id": "cmp-1", "question": "Which street is longer, A or B?",
        "type": "comparison",
        "context": [["A", ["A is long."]], ["B", ["B is longer."]]],
        "supporting_facts": [["A", 0], ["B", 0]],
    },
    {   # broken record: its gold fact points at a sentence that does not exist
        "_id": "broken-1", "question": "Who?", "type": "bridge",
        "context": [["Doc", ["Only one sentence."]]],
        "supporting_facts": [["Doc", 7]],
    },
]

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "mini.json"
    path.write_text(json.dumps(records), encoding="utf-8")
    dataset = ingest_hotpot(path)

print(f"loaded {len(dataset.questions)} questions, "
      f"rejected {len(dataset.rejections)}")
for rejection in dataset.rejections:
    print(f"  rejected {rejection.question_id}: {rejection.reason}")

bridge_only = filter_bridge(dataset)
print(f"bridge-type only: {len(bridge_only.questions)} question(s)\n")

record = bridge_only.questions[0]
print("Q:", record.question_text)
print(f"pool of {len(record.candidates)} candidate sentences "
      f"(gold marked with *):")
gold = record.gold_facts
for cand in candidate_pool(record):
    mark = "*" if (cand.doc_title, cand.sent_idx) in gold else " "
    print(f" {mark} [{cand.doc_title}:{cand.sent_idx}] {cand.text[:72]}")
