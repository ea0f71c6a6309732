"""Command-line entry point: ingest, rank, evaluate, grid-search, ablate.

Every command writes exactly one run manifest (JSON with timestamps,
config snapshot, input/output paths, and scorer provenance). Primary
outputs are byte-identical across reruns with the proxy or cache backends;
the manifest is the only file carrying wall-clock data.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

from .corpus import Dataset, IngestError, dump_normalized, filter_bridge, load_dataset
from .fusion import FusionConfig, Ranking
from .metrics import evaluate_rankings
from .pipeline import EARNEST_SUB, Engine, EngineConfig, METHODS
from .scorer import ENDPOINT_ENV, ScoreCache, TransportError
from .sparse import BM25Config


def _fail(message: str, code: int = 1) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def load_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``section.key = value`` config file; '#' starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip().strip('"')
    return values


_TRUE = ("1", "true", "yes", "on")


def build_engine_config(args) -> EngineConfig:
    """Defaults, overridden by --config file entries, overridden by flags."""
    cfg = {}
    if getattr(args, "config", None):
        cfg = load_config_file(args.config)

    def pick(flag_value, key, default, convert):
        if flag_value is not None:
            return flag_value
        if key in cfg:
            return convert(cfg[key])
        return default

    fusion = FusionConfig(
        alpha=pick(getattr(args, "alpha", None), "fusion.alpha", 3.0, float),
        beta=pick(getattr(args, "beta", None), "fusion.beta", 1.0, float),
        k=pick(getattr(args, "k", None), "fusion.k", 3, int),
        nest_enabled=pick(getattr(args, "nest", None), "fusion.nest_enabled", True,
                          lambda v: v.lower() in _TRUE),
        initial_ranker=pick(getattr(args, "initial_ranker", None),
                            "fusion.initial_ranker", "sts", str),
    )
    bm25 = BM25Config(
        k1=pick(getattr(args, "k1", None), "bm25.k1", 1.5, float),
        b=pick(getattr(args, "b", None), "bm25.b", 0.75, float),
        stopwords=pick(getattr(args, "stopwords", None), "bm25.stopwords", True,
                       lambda v: v.lower() in _TRUE),
    )
    endpoint = pick(getattr(args, "endpoint", None), "scorer.endpoint",
                    os.environ.get(ENDPOINT_ENV), str)
    return EngineConfig(
        fusion=fusion,
        bm25=bm25,
        backend=pick(getattr(args, "backend", None), "scorer.backend", "proxy", str),
        endpoint=endpoint,
        fuzzy_threshold=pick(getattr(args, "fuzzy_threshold", None),
                             "entities.fuzzy_threshold", 0.85, float),
        ner_provider=pick(None, "entities.ner_provider", "rules", str),
    )


def make_engine(args) -> Engine:
    config = build_engine_config(args)
    cache_path = getattr(args, "cache", None)
    if config.backend == "cache" and not cache_path:
        raise TransportError("backend 'cache' needs --cache pointing at a score cache file")
    cache = ScoreCache(cache_path) if cache_path else ScoreCache()
    return Engine(config, cache=cache)


def write_manifest(path: Path, command: str, started: float, *,
                   config: dict | None = None, inputs: list[str] | None = None,
                   outputs: list[str] | None = None, provenance: dict | None = None,
                   extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "started_unix": started,
        "finished_unix": time.time(),
        "config": config or {},
        "inputs": inputs or [],
        "outputs": outputs or [],
        "scorer_provenance": provenance or {},
    }
    manifest.update(extra or {})
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _load_data(path: str) -> Dataset:
    if not Path(path).exists():
        raise FileNotFoundError(path)
    return load_dataset(path)


def _write_rankings(path: Path, dataset: Dataset, rankings: dict[str, Ranking]) -> None:
    # single ordered writer: dataset order, canonical JSON
    with path.open("w", encoding="utf-8") as fh:
        for record in dataset.questions:
            fh.write(json.dumps(rankings[record.question_id].to_dict(),
                                sort_keys=True) + "\n")


def _read_rankings(path: Path) -> dict[str, Ranking]:
    out: dict[str, Ranking] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                ranking = Ranking.from_dict(json.loads(line))
                out[ranking.question_id] = ranking
    return out


# --- commands ---

def cmd_ingest(args) -> int:
    started = time.time()
    try:
        dataset = _load_data(args.input)
    except FileNotFoundError as exc:
        return _fail(f"input file not found: {exc}", 2)
    except IngestError as exc:
        return _fail(str(exc), 2)
    if args.bridge_only:
        dataset = filter_bridge(dataset)
    out = Path(args.out)
    dump_normalized(dataset, out)
    rejects_path = Path(args.rejects) if args.rejects else out.with_suffix(".rejects.jsonl")
    if dataset.rejections:
        with rejects_path.open("w", encoding="utf-8") as fh:
            for rej in dataset.rejections:
                fh.write(json.dumps({"question_id": rej.question_id,
                                     "reason": rej.reason}, sort_keys=True) + "\n")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"), "ingest", started,
        inputs=[args.input],
        outputs=[str(out)] + ([str(rejects_path)] if dataset.rejections else []),
        extra={"records": len(dataset.questions),
               "rejections": len(dataset.rejections),
               "filter_applied": dataset.filter_applied},
    )
    print(f"ingested {len(dataset.questions)} records "
          f"({len(dataset.rejections)} rejected) -> {out}")
    return 0


def cmd_rank(args) -> int:
    started = time.time()
    try:
        dataset = _load_data(args.data)
        engine = make_engine(args)
        rankings = engine.rank_dataset(dataset, args.method, workers=args.workers)
    except FileNotFoundError as exc:
        return _fail(f"input file not found: {exc}", 2)
    except (TransportError, ValueError) as exc:
        return _fail(str(exc))
    out = Path(args.out)
    _write_rankings(out, dataset, rankings)
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"), "rank", started,
        config=engine.config.to_dict(),
        inputs=[args.data], outputs=[str(out)],
        provenance=engine.provenance(),
        extra={"method": args.method, "questions": len(dataset.questions)},
    )
    print(f"ranked {len(dataset.questions)} questions with {args.method} -> {out}")
    return 0


def _sibling_manifest(path: Path) -> dict:
    manifest = path.with_suffix(path.suffix + ".manifest.json")
    if manifest.exists():
        try:
            return json.loads(manifest.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return {}
    return {}


def cmd_evaluate(args) -> int:
    started = time.time()
    try:
        dataset = _load_data(args.data)
    except FileNotFoundError as exc:
        return _fail(f"input file not found: {exc}", 2)

    by_strategy: dict[str, dict[str, Ranking]] = {}
    config_snapshot: dict = {}
    provenance: dict = {}
    for rank_file in args.rankings:
        path = Path(rank_file)
        if not path.exists():
            return _fail(f"input file not found: {path}", 2)
        rankings = _read_rankings(path)
        strategy = next(iter(rankings.values())).strategy if rankings else path.stem
        name = strategy if strategy not in by_strategy else f"{strategy}:{path.stem}"
        by_strategy[name] = rankings
        sibling = _sibling_manifest(path)
        if sibling:
            config_snapshot[name] = sibling.get("config", {})
            provenance.update(sibling.get("scorer_provenance", {}))

    try:
        report = evaluate_rankings(dataset, by_strategy, provenance=provenance)
    except ValueError as exc:
        return _fail(str(exc))
    report = dataclasses.replace(report, config=config_snapshot)

    prefix = Path(args.out_prefix)
    table_path = prefix.with_suffix(".txt")
    json_path = prefix.with_suffix(".json")
    csv_path = prefix.with_suffix(".csv")
    table_path.write_text(report.render_table(), encoding="utf-8")
    json_path.write_text(report.to_json(), encoding="utf-8")
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    write_manifest(
        prefix.with_suffix(".manifest.json"), "evaluate", started,
        config=config_snapshot,
        inputs=[args.data] + list(args.rankings),
        outputs=[str(table_path), str(json_path), str(csv_path)],
        provenance=provenance,
        extra={"questions": report.question_count,
               "excluded": report.excluded_count},
    )
    print(report.render_table())
    return 0


def cmd_grid_search(args) -> int:
    started = time.time()
    if not (0.0 < args.fraction <= 1.0):
        return _fail("--fraction must be in (0, 1]")
    try:
        dataset = _load_data(args.data)
        engine = make_engine(args)
    except FileNotFoundError as exc:
        return _fail(f"input file not found: {exc}", 2)
    except (TransportError, ValueError) as exc:
        return _fail(str(exc))

    # deterministic subsample: sort by question_id, take every ceil(1/f)-th
    # starting at seed mod step (no RNG, reproducible across languages)
    ordered = sorted(dataset.questions, key=lambda q: q.question_id)
    step = math.ceil(1.0 / args.fraction)
    offset = args.seed % step
    sample = tuple(ordered[offset::step]) or tuple(ordered[:1])
    subset = Dataset(questions=sample, source_path=dataset.source_path,
                     filter_applied=dataset.filter_applied)

    alphas = [float(v) for v in args.alphas.split(",")]
    betas = [float(v) for v in args.betas.split(",")]
    surface = []
    for alpha in alphas:
        for beta in betas:
            cell_engine = Engine(
                EngineConfig(
                    fusion=FusionConfig(alpha=alpha, beta=beta,
                                        k=engine.config.fusion.k,
                                        nest_enabled=engine.config.fusion.nest_enabled,
                                        initial_ranker=engine.config.fusion.initial_ranker),
                    bm25=engine.config.bm25,
                    backend=engine.config.backend,
                    endpoint=engine.config.endpoint),
                cache=engine.cache)
            rankings = cell_engine.rank_dataset(subset, "simcom", workers=args.workers)
            report = evaluate_rankings(subset, {"simcom": rankings})
            surface.append({"alpha": alpha, "beta": beta,
                            "map": report.strategies["simcom"].map})
    best = min(surface, key=lambda cell: (-cell["map"], cell["alpha"], cell["beta"]))

    out = Path(args.out)
    out.write_text(json.dumps({"best": best, "grid": surface,
                               "sample_size": len(sample),
                               "fraction": args.fraction, "seed": args.seed},
                              sort_keys=True, indent=2) + "\n", encoding="utf-8")
    write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"), "grid-search", started,
        config=engine.config.to_dict(),
        inputs=[args.data], outputs=[str(out)],
        provenance=engine.provenance(),
        extra={"sample_size": len(sample), "seed": args.seed,
               "fraction": args.fraction, "sampling": "sorted-by-id strided"},
    )
    print(f"best alpha={best['alpha']} beta={best['beta']} map={best['map']:.4f} "
          f"(sample of {len(sample)})")
    return 0


def cmd_ablate(args) -> int:
    started = time.time()
    try:
        dataset = _load_data(args.data)
        engine = make_engine(args)
        methods = ["bm25", "sts", "is", "earnest", EARNEST_SUB]
        rankings = {m: engine.rank_dataset(dataset, m, workers=args.workers)
                    for m in methods}
    except FileNotFoundError as exc:
        return _fail(f"input file not found: {exc}", 2)
    except (TransportError, ValueError) as exc:
        return _fail(str(exc))

    report = evaluate_rankings(dataset, rankings, config=engine.config.fusion,
                               provenance=engine.provenance())
    prefix = Path(args.out_prefix)
    table_path = prefix.with_suffix(".txt")
    json_path = prefix.with_suffix(".json")
    table_path.write_text(report.render_table(), encoding="utf-8")
    json_path.write_text(report.to_json(), encoding="utf-8")
    write_manifest(
        prefix.with_suffix(".manifest.json"), "ablate", started,
        config=engine.config.to_dict(),
        inputs=[args.data], outputs=[str(table_path), str(json_path)],
        provenance=engine.provenance(),
        extra={"questions": report.question_count},
    )
    print(report.render_table())
    full = report.strategies["earnest"].map
    ablated = report.strategies[EARNEST_SUB].map
    print(f"MAP drop from substituting the entailment scorer: "
          f"{full:.4f} -> {ablated:.4f} ({full - ablated:+.4f})")
    return 0


# --- parser wiring ---

def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["proxy", "cache", "remote"], default=None,
                   help="dense scorer backend (default proxy)")
    p.add_argument("--cache", default=None, help="score cache JSONL path")
    p.add_argument("--endpoint", default=None,
                   help=f"scorer service URL (or ${ENDPOINT_ENV})")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--k", type=int, default=None, help="top-K cut for pair sets")
    p.add_argument("--nest", dest="nest", action="store_true", default=None)
    p.add_argument("--no-nest", dest="nest", action="store_false")
    p.add_argument("--initial-ranker", choices=["sts", "is"], default=None)
    p.add_argument("--k1", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--fuzzy-threshold", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entailrank",
        description="Ensemble evidence retrieval for multi-hop questions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a HotpotQA-style file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bridge-only", action="store_true")
    p.add_argument("--rejects", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rank", help="rank every question with one strategy")
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=list(METHODS), required=True)
    p.add_argument("--out", required=True)
    _add_engine_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="score rankings against gold facts")
    p.add_argument("--data", required=True)
    p.add_argument("--rankings", nargs="+", required=True,
                   help="one or more rankings files (multiple -> comparison table)")
    p.add_argument("--compare", action="store_true",
                   help="accepted for clarity; comparison is implied by "
                        "passing multiple rankings files")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid-search", help="alpha/beta grid search on a subsample")
    p.add_argument("--data", required=True)
    p.add_argument("--alphas", default="1,2,3,4")
    p.add_argument("--betas", default="0.5,1,2")
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=17)
    p.add_argument("--out", required=True)
    _add_engine_flags(p)
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("ablate", help="EARnest vs the entailment-scorer substitution")
    p.add_argument("--data", required=True)
    p.add_argument("--out-prefix", required=True)
    _add_engine_flags(p)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
