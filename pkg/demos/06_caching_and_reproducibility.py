"""Score caching and byte-identical reruns.

Dense scores are expensive when a real model serves them, so every score
is written through to a JSONL cache keyed by question, candidate, and
scorer. A warm cache answers without touching the backend at all, and a
run can later be replayed in full with the cache as the only backend -
which is also how ranking runs stay byte-for-byte reproducible.
"""

import json
import tempfile
from pathlib import Path

from entailrank.cli import main as cli
from entailrank.synthetic import generate_raw_corpus

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    data = tmp / "corpus.json"
    data.write_text(json.dumps(generate_raw_corpus(10, seed=2)), encoding="utf-8")
    cache = tmp / "scores.jsonl"

    print("first run: proxy backend computes scores and fills the cache")
    cli(["rank", "--data", str(data), "--method", "earnest",
         "--backend", "proxy", "--cache", str(cache),
         "--out", str(tmp / "run1.jsonl")])
    print(f"  cache now holds {sum(1 for _ in cache.open())} score records")
    sample = json.loads(cache.read_text().splitlines()[0])
    print(f"  sample cache line: {json.dumps(sample, sort_keys=True)}")

    print("\nsecond run: cache backend, no scorer needed at all")
    cli(["rank", "--data", str(data), "--method", "earnest",
         "--backend", "cache", "--cache", str(cache),
         "--out", str(tmp / "run2.jsonl")])

    identical = (tmp / "run1.jsonl").read_bytes() == (tmp / "run2.jsonl").read_bytes()
    print(f"\nrankings byte-identical across backends: {identical}")

    manifest = json.loads((tmp / "run2.jsonl.manifest.json").read_text())
    print("manifest records the provenance:",
          json.dumps(manifest["scorer_provenance"], sort_keys=True))
