"""Seeded synthetic multi-hop corpus with controllable relevance signals.

Each question follows the two-hop shape: the question names a three-token
anchor entity plus an answer type; the first gold sentence ties the anchor
to a bridge entity lexically; the second gold sentence states the answer
about the bridge entity in answer-type vocabulary and shares no content
token with the question. Both gold sentences mention the bridge entity, so
they share a named entity; no distractor pair does.

The distractor inventory per question is fixed by construction:

* a lexical decoy sharing one anchor token (sparse/semantic bait),
* a marker decoy ("noise") whose entailment-proxy score sits strictly
  between the two gold sentences' scores, dragging the lexical gold down
  the entailment ranking,
* a trap sentence that, for a configurable fraction of questions, also
  echoes one non-expanding question word, which makes the (gold1, trap)
  concatenation outscore (gold1, gold2) on raw pair similarity - the case
  only the shared-entity promotion recovers,
* neutral fillers that pin the zero-score tail order.

Document order is fixed so rank ties resolve identically across runs; all
names are token-unique within a question and never collide with stopwords,
lexicon triggers, or markers. Everything derives from one RNG seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Dataset, _parse_record

_SYL_A = ("ba", "be", "bo", "da", "de", "do", "ga", "ka", "ke", "ko",
          "la", "le", "lo", "ma", "me", "mo", "na", "ne", "no", "pa",
          "ra", "re", "ro", "sa", "se", "so", "ta", "te", "to", "va")
_SYL_B = ("lin", "mar", "nor", "rek", "den", "vik", "son", "ler", "gan",
          "dor", "ven", "tas", "rim", "bel", "mon", "ser", "lan", "tor")

_NATIONALITIES = ("British", "French", "German", "Canadian", "Russian", "Swedish")


@dataclass(frozen=True)
class Variant:
    """Surface vocabulary for one answer-type family.

    Placeholders: {anchor} {link} {subj2} {answer} {answer2} {answer3}
    {t1} {t2} {hook}. gold2's subject ({subj2}) equals its document title so
    the sentence-initial name survives entity extraction.
    """

    question: str
    gold1: str
    gold2: str
    doc1_title: str        # "anchor" | "link"
    doc2_title: str        # "subj" | "link"
    trap_plain: str
    trap_hot: str
    noise: str
    lex_decoy: str
    needs_place_answer: bool  # answer is a generated place name, else from answers
    answers: tuple[str, ...]


VARIANTS: tuple[Variant, ...] = (
    Variant(
        question="What nationality was {anchor}'s wife?",
        gold1="{anchor}, better known by the stage name {link}, performed folk ballads for decades.",
        gold2="{subj2} is a {answer} folksinger married to {link}.",
        doc1_title="link",
        doc2_title="subj",
        trap_plain="{t1} {t2} is a {answer2} widow of {answer3} descent and paints village fairs.",
        trap_hot="{t1} {t2} is a {answer2} widow of {answer3} descent and asks what painters earn.",
        noise="One spouse of the harbor keeper paints rowing boats each spring.",
        lex_decoy="The {hook} Bridge crosses a shallow river beside an abandoned grain mill downstream.",
        needs_place_answer=False,
        answers=_NATIONALITIES,
    ),
    Variant(
        question="Where was the founder of {anchor} raised?",
        gold1="{anchor} was started by {link} after many careful years of quiet planning.",
        gold2="{subj2} grew to adulthood in {answer}, a town in the far north region of the west county.",
        doc1_title="anchor",
        doc2_title="link",
        trap_plain="{t1} {t2} photographed a remote village near the state line and its county market.",
        trap_hot="{t1} {t2} photographed the village square where the county sheep were raised.",
        noise="Harvest fairs in the capital city draw crowds from the west.",
        lex_decoy="The {hook} Pavilion hosts long winter lectures on soil drainage and seed storage.",
        needs_place_answer=True,
        answers=(),
    ),
    Variant(
        question="Who was the author of the novel {anchor}?",
        gold1="{anchor} appeared in print under the pen name {link} before gaining wide notice.",
        gold2="{subj2} wrote dozens of stories as {link}.",
        doc1_title="anchor",
        doc2_title="subj",
        trap_plain="{t1} {t2} published almanac tables that a coastal book writer admired.",
        trap_hot="{t1} {t2} published a novel the old court writer admired.",
        noise="An unsigned book published by a local writer circulated among pilots.",
        lex_decoy="The {hook} Prize recognizes careful achievements in regional cartography and surveys.",
        needs_place_answer=False,
        answers=(),
    ),
)

_ZERO_FILLERS = (
    "Tiles from the nearby quarry decorate the station platform.",
    "Lantern stalls open along the towpath during festival evenings.",
)
_RIDGE_DOC = (
    "Seasonal rainfall shaped the valley economy for generations.",
    "Travelling merchants carried salt and cloth along the ridge path.",
)


class _NamePool:
    """Hands out names whose lowercase tokens are unique within a question
    and never collide with stopwords, lexicon triggers, or markers."""

    def __init__(self, rng: random.Random):
        from .scorer import ANSWER_TYPE_LEXICON
        from .sparse import STOPWORDS
        self._rng = rng
        self._banned = set(STOPWORDS) | set(ANSWER_TYPE_LEXICON)
        for markers in ANSWER_TYPE_LEXICON.values():
            self._banned |= set(markers)

    def token(self, min_syl: int = 2, max_syl: int = 3) -> str:
        while True:
            n = self._rng.randint(min_syl, max_syl)
            word = self._rng.choice(_SYL_A).capitalize() + "".join(
                self._rng.choice(_SYL_B) for _ in range(n - 1))
            low = word.lower()
            if low not in self._banned and len(word) >= 4:
                self._banned.add(low)
                return word

    def name(self, parts: int) -> str:
        return " ".join(self.token() for _ in range(parts))


def generate_raw_question(rng: random.Random, index: int,
                          trap_fraction: float = 0.3) -> dict:
    """One raw HotpotQA-shaped record with engineered signal placement."""
    variant = VARIANTS[index % len(VARIANTS)]
    pool = _NamePool(rng)
    anchor = pool.name(3)
    link = pool.name(2)
    subj = pool.name(2)
    trap_person = pool.name(2)
    t1, t2 = trap_person.split(" ", 1)
    lex_title = pool.token()
    hook = anchor.split()[-1]
    trapped = rng.random() < trap_fraction

    if variant.needs_place_answer:
        answer = pool.token()
    else:
        answer = rng.choice(variant.answers) if variant.answers else ""
    nat2, nat3 = rng.sample(_NATIONALITIES, 2)

    titles = {"anchor": anchor, "link": link, "subj": subj}
    doc1_title = titles[variant.doc1_title]
    doc2_title = titles[variant.doc2_title]
    subj2 = doc2_title
    if not answer:
        answer = subj2  # the bridge subject is itself the answer (author family)

    fields = dict(anchor=anchor, link=link, subj2=subj2, answer=answer,
                  answer2=nat2, answer3=nat3, t1=t1, t2=t2, hook=hook)
    question = variant.question.format(**fields)
    gold1 = variant.gold1.format(**fields)
    gold2 = variant.gold2.format(**fields)
    trap = (variant.trap_hot if trapped else variant.trap_plain).format(**fields)
    lex_decoy = variant.lex_decoy.format(**fields)

    gold2_idx = rng.choice((0, 1))
    doc2_sentences = [gold2, f"{subj2} toured small venues for several seasons."]
    if gold2_idx == 1:
        doc2_sentences.reverse()

    # fixed order: ties in every zero-score tail resolve the same way each run
    context = [
        [doc1_title, [gold1, _ZERO_FILLERS[0]]],
        [lex_title, [lex_decoy, _ZERO_FILLERS[1]]],
        ["Ridge Path", list(_RIDGE_DOC)],
        [doc2_title, doc2_sentences],
        [trap_person, [trap, variant.noise]],
    ]

    return {
        "_id": f"synth-{index:04d}",
        "question": question,
        "answer": answer,
        "type": "bridge",
        "context": context,
        "supporting_facts": [[doc1_title, 0], [doc2_title, gold2_idx]],
    }


def generate_raw_corpus(n_questions: int = 200, seed: int = 13,
                        trap_fraction: float = 0.3) -> list[dict]:
    rng = random.Random(seed)
    return [generate_raw_question(rng, i, trap_fraction) for i in range(n_questions)]


def generate_dataset(n_questions: int = 200, seed: int = 13,
                     trap_fraction: float = 0.3) -> Dataset:
    """Parsed, validated synthetic corpus ready for the engine."""
    raw = generate_raw_corpus(n_questions, seed, trap_fraction)
    questions = tuple(_parse_record(rec) for rec in raw)
    return Dataset(questions=questions,
                   source_path=f"synthetic(seed={seed},n={n_questions})",
                   filter_applied="none",
                   rejections=tuple())
