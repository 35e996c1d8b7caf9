from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from hyperfeed.content import LexiconError, TopicLexicon, analyze, build_profile, similarity
from tests.conftest import make_item, make_profile


def test_analyze_empty_input_is_zero(lexicon):
    vec = analyze("", [], lexicon)
    assert vec.is_zero()


def test_analyze_single_topic_unit_weight(lexicon):
    vec = analyze("traffic jam on the road", [], lexicon)
    assert set(vec.weights) == {"traffic"}
    assert vec.weights["traffic"] == pytest.approx(1.0)


def test_analyze_hashtags_count_double(lexicon):
    # 2 body hits "traffic", 1 body hit "food", hashtag #food counts 2:
    # hand count gives traffic 2/5 and food 3/5
    vec = analyze("traffic jam near the pizza place", ["#food"], lexicon)
    assert vec.weights["traffic"] == pytest.approx(0.4)
    assert vec.weights["food"] == pytest.approx(0.6)


def test_build_profile_fallback_to_category(lexicon):
    profile = make_profile(lexicon, "n1", description="nothing matching here", category="events")
    assert profile.topic_vector.is_zero()
    assert profile.dominant_topic == "events"


def test_build_profile_dominant_peak(lexicon):
    profile = make_profile(lexicon, "n1", description="traffic traffic jam")
    assert profile.dominant_topic == "traffic"


def test_build_profile_tie_breaks_lexicographically(lexicon):
    # one hit each for food and traffic: "food" wins the tie
    profile = make_profile(lexicon, "n1", description="pizza near the highway")
    assert profile.topic_vector.weights["food"] == pytest.approx(0.5)
    assert profile.topic_vector.weights["traffic"] == pytest.approx(0.5)
    assert profile.dominant_topic == "food"


def test_similarity_identical_profiles_with_hashtags(lexicon):
    a = make_profile(lexicon, "n1", description="traffic jam", hashtags=["roadworks"])
    assert similarity(a, a) == pytest.approx(1.0)


def test_similarity_fully_disjoint_is_zero(lexicon):
    a = make_profile(lexicon, "a", description="traffic jam", category="traffic", hashtags=["x"])
    b = make_profile(lexicon, "b", description="sushi menu", category="food", hashtags=["y"])
    assert similarity(a, b) == pytest.approx(0.0)


def test_similarity_formula_blend(lexicon):
    # cosine 0.5 requires specific vectors; verify blend weights directly
    # with same category and Jaccard 0.5: 0.6*cos + 0.2 + 0.1
    a = make_profile(lexicon, "a", description="traffic", category="events", hashtags=["p", "q"])
    b = make_profile(
        lexicon, "b", description="traffic pizza", category="events", hashtags=["p", "r", "s"]
    )
    from hyperfeed.content import _cosine, _jaccard

    cos = _cosine(a.topic_vector, b.topic_vector)
    jac = _jaccard(a.hashtags, b.hashtags)
    assert similarity(a, b) == pytest.approx(0.6 * cos + 0.2 + 0.2 * jac, abs=1e-12)


def test_similarity_direct_formula_point():
    # cosine 0.5, same category, Jaccard 0.5 -> 0.6*0.5 + 0.2 + 0.1
    assert 0.6 * 0.5 + 0.2 * 1.0 + 0.2 * 0.5 == pytest.approx(0.6)


texts = st.text(alphabet=st.characters(codec="utf-8", categories=("L", "N", "P", "Z")), max_size=80)


@given(texts, st.lists(st.sampled_from(["food", "traffic", "zzz"]), max_size=3))
def test_analyze_normalized_or_zero(text, tags):
    lex = TopicLexicon.default()
    vec = analyze(text, tags, lex)
    if not vec.is_zero():
        assert sum(vec.weights.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(w >= 0 for w in vec.weights.values())


@given(st.sampled_from(["", "traffic jam", "pizza", "concert parade"]),
       st.sampled_from(["", "sushi", "police arrest", "traffic"]),
       st.booleans(), st.booleans())
def test_similarity_symmetric_and_bounded(d1, d2, tag1, tag2):
    lex = TopicLexicon.default()
    a = make_profile(lex, "a", description=d1, hashtags=["t"] if tag1 else [])
    b = make_profile(lex, "b", description=d2, hashtags=["t"] if tag2 else [])
    s_ab, s_ba = similarity(a, b), similarity(b, a)
    assert s_ab == pytest.approx(s_ba, abs=1e-12)
    assert 0.0 <= s_ab <= 1.0
    # for profiles with topical content, self-similarity is 1.0 with hashtags
    # and 0.8 without (empty-set Jaccard is 0)
    if not a.topic_vector.is_zero():
        assert similarity(a, a) == pytest.approx(1.0 if a.hashtags else 0.8)


def test_lexicon_loader_rejects_duplicates(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("food\tpizza\ntraffic\tjam\ncrime\tpizza\n", encoding="utf-8")
    with pytest.raises(LexiconError, match="3"):
        TopicLexicon.load(p)


def test_lexicon_first_topic_wins_in_memory():
    lex = TopicLexicon([("food", "pizza"), ("crime", "pizza")])
    assert lex.topic_of("pizza") == "food"


def test_default_lexicon_shape(lexicon):
    assert len(lexicon.topics) == 8
    per_topic = {t: 0 for t in lexicon.topics}
    for kw, topic in lexicon._keyword_topic.items():
        per_topic[topic] += 1
    assert all(n >= 10 for n in per_topic.values())
