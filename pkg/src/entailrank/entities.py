"""Named-entity extraction and fuzzy matching for the shared-entity switch.

Mentions come from three sources: a rule-based recognizer over capitalized
token runs, the sentence's document title, and phrases inside matched
single or double quotes. Everything is normalized (lowercase, leading
articles stripped, punctuation removed except internal hyphens) before
comparison, and two mentions match if one's token set contains the
other's or their Levenshtein similarity clears the threshold.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable

from .corpus import CandidateSentence

DEFAULT_FUZZY_THRESHOLD = 0.85

_ARTICLES = ("a", "an", "the")

_QUOTE_PATTERNS = (
    re.compile(r'"([^"]+)"'),
    re.compile(r"“([^”]+)”"),   # curly double quotes
    re.compile(r"(?<![\w])'([^']+)'(?![\w])"),  # straight single, not apostrophes
    re.compile(r"‘([^’]+)’"),   # curly single quotes
)

_WORD_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class EntityMention:
    surface: str
    normalized: str
    source: str  # "ner" | "doc_title" | "quoted_phrase"


def normalize_entity(surface: str) -> str:
    """Lowercase, strip leading articles, drop punctuation (internal hyphens
    survive), collapse whitespace. May return an empty string; callers
    discard those mentions."""
    text = surface.lower()
    chars = []
    for i, ch in enumerate(text):
        if ch.isalnum() or ch.isspace():
            chars.append(ch)
        elif ch == "-" and 0 < i < len(text) - 1 \
                and text[i - 1].isalnum() and text[i + 1].isalnum():
            chars.append(ch)
    tokens = "".join(chars).split()
    while tokens and tokens[0] in _ARTICLES:
        tokens = tokens[1:]
    return " ".join(tokens)


def _is_capitalized(token: str) -> bool:
    for ch in token:
        if ch.isalpha():
            return ch.isupper()
    return False


def _capitalized_runs(text: str) -> list[tuple[str, bool]]:
    """Maximal runs of capitalized tokens as (surface, sentence_initial)."""
    words = _WORD_RE.findall(text)
    runs: list[tuple[str, bool]] = []
    current: list[str] = []
    start_pos = 0
    for pos, word in enumerate(words):
        if _is_capitalized(word):
            if not current:
                start_pos = pos
            current.append(word)
        else:
            if current:
                runs.append((" ".join(current), start_pos == 0))
                current = []
    if current:
        runs.append((" ".join(current), start_pos == 0))
    return runs


def extract_entities(sentence: CandidateSentence) -> frozenset[EntityMention]:
    """All mentions of a sentence: capitalized runs, the doc title, and
    quoted phrases. A sentence-initial run is kept only when it recurs
    later in the sentence or overlaps the document title (ordinary
    sentence-initial words are not names)."""
    mentions: set[EntityMention] = set()

    title_norm = normalize_entity(sentence.doc_title)
    if title_norm:
        mentions.add(EntityMention(sentence.doc_title, title_norm, "doc_title"))
    title_tokens = set(title_norm.split())

    runs = _capitalized_runs(sentence.text)
    later_norms = {normalize_entity(surface) for surface, initial in runs if not initial}
    for surface, initial in runs:
        norm = normalize_entity(surface)
        if not norm:
            continue
        if initial:
            norm_tokens = set(norm.split())
            recurs = norm in later_norms or any(
                norm_tokens <= set(other.split()) for other in later_norms if other)
            matches_title = bool(title_tokens) and (
                norm_tokens <= title_tokens or title_tokens <= norm_tokens)
            if not (recurs or matches_title):
                continue
        mentions.add(EntityMention(surface, norm, "ner"))

    for pattern in _QUOTE_PATTERNS:
        for match in pattern.finditer(sentence.text):
            norm = normalize_entity(match.group(1))
            if norm:
                mentions.add(EntityMention(match.group(1), norm, "quoted_phrase"))

    return frozenset(mentions)


def levenshtein(s1: str, s2: str) -> int:
    """Classic edit distance; O(len(s1) * len(s2))."""
    if s1 == s2:
        return 0
    if not s1:
        return len(s2)
    if not s2:
        return len(s1)
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        curr = [i]
        for j, c2 in enumerate(s2, start=1):
            cost = 0 if c1 == c2 else 1
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def fuzzy_match(e1: str, e2: str, threshold: float = DEFAULT_FUZZY_THRESHOLD) -> bool:
    """True iff one normalized mention's token set contains the other's
    (inclusive match) or edit-distance similarity reaches the threshold."""
    if not e1 or not e2:
        return False
    if e1 == e2:
        return True
    t1, t2 = set(e1.split()), set(e2.split())
    if t1 <= t2 or t2 <= t1:
        return True
    sim = 1.0 - levenshtein(e1, e2) / max(len(e1), len(e2))
    return sim >= threshold


class EntityMatcher:
    """Memoizing wrapper around extraction plus the shared-entity predicate.

    ``provider`` may swap in a different extraction function (e.g. one that
    calls an external recognizer); the default is the rule-based extractor.
    """

    def __init__(self, fuzzy_threshold: float = DEFAULT_FUZZY_THRESHOLD,
                 provider: Callable[[CandidateSentence], Iterable[EntityMention]] = extract_entities):
        self.fuzzy_threshold = fuzzy_threshold
        self.provider = provider
        self._memo: dict[str, tuple[EntityMention, ...]] = {}

    def mentions(self, sentence: CandidateSentence) -> tuple[EntityMention, ...]:
        cached = self._memo.get(sentence.candidate_id)
        if cached is None:
            cached = tuple(sorted(self.provider(sentence),
                                  key=lambda m: (m.normalized, m.source)))
            self._memo[sentence.candidate_id] = cached
        return cached

    def share_entity(self, a: CandidateSentence, b: CandidateSentence) -> bool:
        """True iff some mention of one sentence fuzzy-matches a mention of
        the other; symmetric by construction."""
        mentions_a = self.mentions(a)
        mentions_b = self.mentions(b)
        for ma in mentions_a:
            for mb in mentions_b:
                if fuzzy_match(ma.normalized, mb.normalized, self.fuzzy_threshold):
                    return True
        return False


def share_entity(a: CandidateSentence, b: CandidateSentence,
                 fuzzy_threshold: float = DEFAULT_FUZZY_THRESHOLD) -> bool:
    """One-shot predicate without memoization."""
    return EntityMatcher(fuzzy_threshold).share_entity(a, b)
