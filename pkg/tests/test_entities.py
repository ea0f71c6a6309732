"""Entity extraction, normalization, and fuzzy matching."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entailrank.entities import (EntityMatcher, extract_entities, fuzzy_match,
                                 levenshtein, normalize_entity, share_entity)

from conftest import make_pool


def sentence(text, title="Some Doc"):
    return make_pool("q", [text], titles=[title])[0]


class TestNormalize:
    def test_leading_article(self):
        assert normalize_entity("The Beatles") == "beatles"

    def test_inner_quotes_removed(self):
        assert normalize_entity('Margaret "Peggy" Seeger') == "margaret peggy seeger"

    def test_acronym_dots_removed(self):
        assert normalize_entity("U.S.A.") == "usa"

    def test_internal_hyphen_kept(self):
        assert normalize_entity("Jean-Luc") == "jean-luc"
        assert normalize_entity("- dash -") == "dash"

    def test_whitespace_collapsed(self):
        assert normalize_entity("  An   Old\tHouse ") == "old house"

    @given(st.text(max_size=40))
    @settings(max_examples=80, deadline=None)
    def test_idempotent(self, surface):
        once = normalize_entity(surface)
        assert normalize_entity(once) == once


class TestLevenshtein:
    @pytest.mark.parametrize("a,b,d", [
        ("seeger", "seegar", 1),
        ("seegger", "seeger", 1),
        ("kitten", "sitting", 3),
        ("", "abc", 3),
        ("same", "same", 0),
    ])
    def test_known_distances(self, a, b, d):
        assert levenshtein(a, b) == d


class TestFuzzyMatch:
    def test_identity(self):
        assert fuzzy_match("ewan maccoll", "ewan maccoll")

    def test_token_subset_inclusive(self):
        assert fuzzy_match("james henry miller", "miller")
        assert fuzzy_match("miller", "james henry miller")

    def test_below_threshold(self):
        # distance 1 over length 6 -> 0.833 < 0.85
        assert not fuzzy_match("seeger", "seegar")

    def test_above_threshold(self):
        # distance 1 over length 7 -> 0.857 >= 0.85
        assert fuzzy_match("seegger", "seeger")

    def test_empty_never_matches(self):
        assert not fuzzy_match("", "anything")

    @given(st.text(alphabet="abcdefg ", min_size=1, max_size=20))
    @settings(max_examples=50, deadline=None)
    def test_reflexive_on_normalized(self, raw):
        norm = normalize_entity(raw)
        if norm:
            assert fuzzy_match(norm, norm)


class TestExtraction:
    def test_doc_title_and_midsentence_name(self):
        s = sentence("She was married to the singer Ewan MacColl until 1989.",
                     title="Peggy Seeger")
        norms = {m.normalized for m in extract_entities(s)}
        assert "peggy seeger" in norms
        assert "ewan maccoll" in norms

    def test_no_capitals_yields_title_only(self):
        s = sentence("nothing capitalized here at all.", title="x")
        mentions = extract_entities(s)
        assert {m.normalized for m in mentions} == {"x"}
        assert {m.source for m in mentions} == {"doc_title"}

    def test_quoted_phrase(self):
        s = sentence('He was known by the stage name "Ewan MacColl" abroad.')
        quoted = {m.normalized for m in extract_entities(s) if m.source == "quoted_phrase"}
        assert quoted == {"ewan maccoll"}

    def test_single_quotes_not_apostrophes(self):
        s = sentence("Miller's friends called the song 'Dirty Old Town' a classic.")
        quoted = {m.normalized for m in extract_entities(s) if m.source == "quoted_phrase"}
        assert quoted == {"dirty old town"}

    def test_sentence_initial_dropped_without_support(self):
        s = sentence("Seasonal rainfall shaped the valley economy.", title="Ridge Path")
        norms = {m.normalized for m in extract_entities(s) if m.source == "ner"}
        assert "seasonal" not in norms

    def test_sentence_initial_kept_when_it_recurs(self):
        s = sentence("James Henry Miller, better known by James Henry Miller stage "
                     "name Ewan MacColl, was a folk singer.", title="Ewan MacColl")
        norms = {m.normalized for m in extract_entities(s) if m.source == "ner"}
        assert "james henry miller" in norms

    def test_sentence_initial_kept_when_title_matches(self):
        s = sentence("Keden Tegan toured small venues.", title="Keden Tegan")
        norms = {m.normalized for m in extract_entities(s) if m.source == "ner"}
        assert "keden tegan" in norms

    def test_extraction_pure(self):
        s = sentence("Paris hosted the fair held in Paris.", title="Fairs")
        assert extract_entities(s) == extract_entities(s)


class TestShareEntity:
    def test_bridge_pair_shares(self):
        a = sentence("James Henry Miller, better known by the stage name "
                     "Ewan MacColl, was an English folk singer.", title="Ewan MacColl")
        b = sentence("She was married to the singer Ewan MacColl until his death.",
                     title="Peggy Seeger")
        assert share_entity(a, b)

    def test_disjoint_mentions(self):
        a = sentence("The Tovenlan Bridge crosses a river.", title="Rivers")
        b = sentence("Warm tides wash the Kodorsen shore.", title="Coasts")
        assert not share_entity(a, b)

    def test_doc_title_only_share(self):
        a = sentence("first plain sentence.", title="Shared Name")
        b = sentence("second plain sentence.", title="Shared Name")
        assert share_entity(a, b)

    def test_symmetric(self):
        texts = ["Keden Tegan sang with Ewan MacColl.",
                 "A song praised Ewan MacColl loudly.",
                 "nothing shared here."]
        pool = make_pool("q", texts, titles=["A", "B", "C"])
        matcher = EntityMatcher()
        for x in pool:
            for y in pool:
                assert matcher.share_entity(x, y) == matcher.share_entity(y, x)

    def test_memoization_consistent(self):
        matcher = EntityMatcher()
        s = sentence("Paris hosted artists from Paris quarters.", title="Paris")
        assert matcher.mentions(s) == matcher.mentions(s)
