"""HotpotQA-distractor ingestion and the candidate-sentence data model.

Loads raw HotpotQA-style JSON (array or JSONL), flattens each question's
context paragraphs into an ordered pool of candidate sentences, validates
gold supporting facts against the pool, and exposes the immutable records
the ranking strategies consume. Sentence splits are taken verbatim from
the source file so gold (title, sent_idx) pairs stay valid.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)


class IngestError(Exception):
    """Raised when an input file cannot be ingested at all."""


def _escape(part: str) -> str:
    # '#' delimits candidate_id fields; keep titles reversible.
    return part.replace("%", "%25").replace("#", "%23")


def make_candidate_id(question_id: str, doc_title: str, sent_idx: int) -> str:
    """Stable, human-readable identifier: ``qid#title#idx``."""
    return f"{_escape(question_id)}#{_escape(doc_title)}#{sent_idx}"


@dataclass(frozen=True)
class CandidateSentence:
    """One unit of indexing: a single context sentence with stable identity."""

    doc_title: str
    sent_idx: int
    text: str
    candidate_id: str


@dataclass(frozen=True)
class QuestionRecord:
    """A question, its ordered candidate pool, and gold supporting facts."""

    question_id: str
    question_text: str
    question_type: str  # "bridge" or "comparison"
    candidates: tuple[CandidateSentence, ...]
    gold_facts: frozenset[tuple[str, int]]

    def gold_ids(self) -> frozenset[str]:
        """Gold supporting facts as candidate ids."""
        return frozenset(
            make_candidate_id(self.question_id, title, idx)
            for title, idx in self.gold_facts
        )

    def pool_order(self) -> tuple[str, ...]:
        """Candidate ids in source (paragraph-then-sentence) order."""
        return tuple(c.candidate_id for c in self.candidates)


@dataclass(frozen=True)
class Rejection:
    """Diagnostic for a record dropped at ingest."""

    question_id: str
    reason: str


@dataclass(frozen=True)
class Dataset:
    questions: tuple[QuestionRecord, ...]
    source_path: str
    filter_applied: str = "none"  # "none" or "bridge_only"
    rejections: tuple[Rejection, ...] = field(default_factory=tuple)


def candidate_pool(record: QuestionRecord) -> tuple[CandidateSentence, ...]:
    """The candidates in stable source order; pure accessor."""
    return record.candidates


def _iter_raw_records(path: Path) -> Iterator[dict]:
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        data = json.loads(text)
        if not isinstance(data, list):
            raise IngestError(f"{path}: top-level JSON is not an array")
        yield from data
    else:
        # one-JSON-object-per-line variant
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON line: {exc}") from exc


def _parse_record(raw: dict) -> QuestionRecord:
    """Convert one raw HotpotQA record; raises ValueError on any defect."""
    if not isinstance(raw, dict):
        raise ValueError("record is not an object")
    qid = raw.get("_id") or raw.get("id")
    if not qid:
        raise ValueError("missing _id")
    qid = str(qid)
    question = raw.get("question")
    if not isinstance(question, str) or not question.strip():
        raise ValueError("missing question text")
    qtype = raw.get("type")
    if qtype not in ("bridge", "comparison"):
        if qtype is None:
            logger.info("question %s has no type tag; treating as bridge", qid)
            qtype = "bridge"
        else:
            raise ValueError(f"unknown question type {qtype!r}")

    context = raw.get("context")
    if not isinstance(context, list):
        raise ValueError("missing context")
    candidates: list[CandidateSentence] = []
    seen: set[tuple[str, int]] = set()
    for para in context:
        if not (isinstance(para, (list, tuple)) and len(para) == 2):
            raise ValueError("malformed context paragraph")
        title, sentences = para
        if not isinstance(title, str) or not isinstance(sentences, list):
            raise ValueError("malformed context paragraph")
        for idx, sent in enumerate(sentences):
            if not isinstance(sent, str):
                raise ValueError(f"non-string sentence in {title!r}")
            if not sent.strip():
                continue  # blank sentences cannot be evidence; index is preserved for the rest
            key = (title, idx)
            if key in seen:
                raise ValueError(f"duplicate (title, sent_idx) {key}")
            seen.add(key)
            candidates.append(
                CandidateSentence(
                    doc_title=title,
                    sent_idx=idx,
                    text=sent,
                    candidate_id=make_candidate_id(qid, title, idx),
                )
            )

    gold: set[tuple[str, int]] = set()
    for fact in raw.get("supporting_facts", []):
        if not (isinstance(fact, (list, tuple)) and len(fact) == 2):
            raise ValueError("malformed supporting fact")
        title, idx = fact
        try:
            idx = int(idx)
        except (TypeError, ValueError):
            raise ValueError(f"non-integer supporting-fact index {idx!r}") from None
        if (title, idx) not in seen:
            raise ValueError(f"supporting fact ({title!r}, {idx}) not in candidate pool")
        gold.add((title, idx))

    return QuestionRecord(
        question_id=qid,
        question_text=question,
        question_type=qtype,
        candidates=tuple(candidates),
        gold_facts=frozenset(gold),
    )


def ingest_hotpot(path: str | Path) -> Dataset:
    """Load a HotpotQA-distractor-style file into a Dataset.

    Malformed records (including records whose supporting facts point at a
    nonexistent sentence) are skipped and reported in ``Dataset.rejections``.
    """
    path = Path(path)
    try:
        raw_records = list(_iter_raw_records(path))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc

    questions: list[QuestionRecord] = []
    rejections: list[Rejection] = []
    seen_ids: set[str] = set()
    for raw in raw_records:
        raw_id = str(raw.get("_id") or raw.get("id") or "<unknown>") if isinstance(raw, dict) else "<unknown>"
        try:
            record = _parse_record(raw)
            if record.question_id in seen_ids:
                raise ValueError("duplicate question_id")
        except ValueError as exc:
            logger.warning("rejected record %s: %s", raw_id, exc)
            rejections.append(Rejection(question_id=raw_id, reason=str(exc)))
            continue
        seen_ids.add(record.question_id)
        questions.append(record)

    if not questions:
        raise IngestError(f"{path}: no valid records")
    return Dataset(
        questions=tuple(questions),
        source_path=str(path),
        filter_applied="none",
        rejections=tuple(rejections),
    )


def filter_bridge(dataset: Dataset) -> Dataset:
    """Keep only bridge-type questions."""
    kept = tuple(q for q in dataset.questions if q.question_type == "bridge")
    return replace(dataset, questions=kept, filter_applied="bridge_only")


# --- normalized JSONL dump/load (CLI interchange format) ---

def record_to_dict(record: QuestionRecord) -> dict:
    return {
        "question_id": record.question_id,
        "question": record.question_text,
        "type": record.question_type,
        "candidates": [
            {"doc_title": c.doc_title, "sent_idx": c.sent_idx, "text": c.text}
            for c in record.candidates
        ],
        "gold_facts": sorted([t, i] for t, i in record.gold_facts),
    }


def record_from_dict(d: dict) -> QuestionRecord:
    qid = str(d["question_id"])
    candidates = tuple(
        CandidateSentence(
            doc_title=c["doc_title"],
            sent_idx=int(c["sent_idx"]),
            text=c["text"],
            candidate_id=make_candidate_id(qid, c["doc_title"], int(c["sent_idx"])),
        )
        for c in d["candidates"]
    )
    return QuestionRecord(
        question_id=qid,
        question_text=d["question"],
        question_type=d.get("type", "bridge"),
        candidates=candidates,
        gold_facts=frozenset((t, int(i)) for t, i in d.get("gold_facts", [])),
    )


def dump_normalized(dataset: Dataset, path: str | Path) -> None:
    """Write one QuestionRecord per line; key order is fixed for reproducibility."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for record in dataset.questions:
            fh.write(json.dumps(record_to_dict(record), sort_keys=True) + "\n")


def load_normalized(path: str | Path) -> Dataset:
    path = Path(path)
    questions = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                questions.append(record_from_dict(json.loads(line)))
    if not questions:
        raise IngestError(f"{path}: no records")
    return Dataset(questions=tuple(questions), source_path=str(path))


def load_dataset(path: str | Path) -> Dataset:
    """Load either raw HotpotQA JSON/JSONL or the normalized JSONL dump."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        head = fh.read(4096).lstrip()
    if head.startswith("["):
        return ingest_hotpot(path)
    first = json.loads(head.splitlines()[0]) if head else {}
    if isinstance(first, dict) and "candidates" in first:
        return load_normalized(path)
    return ingest_hotpot(path)
