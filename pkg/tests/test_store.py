from __future__ import annotations

import random
from datetime import timedelta

import pytest

from hyperfeed.change import DecayConfig
from hyperfeed.content import similarity
from hyperfeed.core import GeoPoint, SocialGraph, UsageEvent
from hyperfeed.learner import UserProfile
from hyperfeed.ranker import RankContext, RankWeights, score
from hyperfeed.store import (
    BaseScoreRow,
    CorruptRecord,
    JsonlLog,
    SimilarityRow,
    StoreLayout,
    build_news_similarity,
    build_user_news_base,
    merge_online,
    profile_from_record,
    profile_to_record,
    read_base_csv,
    write_base_csv,
    write_similarity_csv,
)
from tests.conftest import EPOCH, make_item, make_profile


def test_append_replay_round_trip(tmp_path):
    layout = StoreLayout(tmp_path)
    item = make_item("n1", description="traffic jam", hashtags=["road"])
    event = UsageEvent("u1", "n1", "read", EPOCH, GeoPoint(1.0, 2.0))
    layout.append_news(item)
    layout.append_event(event)
    assert list(layout.replay_news()) == [item]
    assert list(layout.replay_events()) == [event]


def test_append_offsets_strictly_increase(tmp_path):
    log = JsonlLog(tmp_path / "x.jsonl")
    o1 = log.append({"a": 1})
    o2 = log.append({"a": 2})
    assert o1 < o2


def test_replay_truncated_last_line(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text('{"a":1}\n{"a":2}\n{"a":', encoding="utf-8")
    log = JsonlLog(path)
    records = []
    with pytest.raises(CorruptRecord) as exc:
        for rec in log.replay():
            records.append(rec)
    assert records == [{"a": 1}, {"a": 2}]
    assert exc.value.line_number == 3


def test_profile_record_round_trip():
    profile = UserProfile(
        user_id="u1",
        short_term={"food": 1.5},
        long_term={"food": 0.5, "traffic": 0.25},
        read_set={"n1", "n2"},
        last_state="food",
        last_update_at=EPOCH,
    )
    profile.qtable.set("__START__", "food", 0.1)
    back = profile_from_record(profile_to_record(profile))
    assert back.user_id == profile.user_id
    assert back.qtable.entries() == profile.qtable.entries()
    assert back.read_set == profile.read_set
    assert back.last_state == profile.last_state
    assert back.last_update_at == profile.last_update_at


def test_similarity_single_item_empty(lexicon):
    assert build_news_similarity([make_profile(lexicon, "n1", description="traffic jam")]) == []


def test_similarity_identical_pair_mutual(lexicon):
    a = make_profile(lexicon, "a", description="traffic jam", hashtags=["road"])
    b = make_profile(lexicon, "b", description="traffic jam", hashtags=["road"])
    rows = build_news_similarity([a, b])
    assert rows == [
        SimilarityRow("a", "b", pytest.approx(1.0)),
        SimilarityRow("b", "a", pytest.approx(1.0)),
    ]


def _random_profiles(lexicon, n, rng):
    descriptions = [
        "traffic jam on the highway", "sushi menu tasting", "concert parade tonight",
        "police arrest downtown", "apartment rent spike", "football match", "mall sale",
        "library clinic services", "pizza and burger deal", "roadwork detour",
    ]
    cats = ["traffic", "food", "events", "crime"]
    out = []
    for i in range(n):
        out.append(
            make_profile(
                lexicon,
                f"n{i:03d}",
                description=rng.choice(descriptions),
                category=rng.choice(cats),
                hashtags=rng.sample(["a", "b", "c", "d"], k=rng.randint(0, 3)),
            )
        )
    return out


def test_similarity_matches_all_pairs_oracle(lexicon):
    profiles = _random_profiles(lexicon, 50, random.Random(3))
    rows = build_news_similarity(profiles, top_k=5)

    # brute-force oracle: all pairs, sorted, top 5 per item
    expected = []
    for p in sorted(profiles, key=lambda x: x.news_id):
        pairs = sorted(
            ((similarity(p, q), q.news_id) for q in profiles if q.news_id != p.news_id),
            key=lambda sv: (-sv[0], sv[1]),
        )[:5]
        expected.extend(SimilarityRow(p.news_id, nid, s) for s, nid in pairs)
    assert len(rows) == len(expected)
    for got, want in zip(rows, expected):
        assert got.news_id == want.news_id
        assert got.similar_news == want.similar_news
        assert got.similarity_score == pytest.approx(want.similarity_score, abs=1e-12)


def test_similarity_partition_invariance(lexicon, tmp_path):
    profiles = _random_profiles(lexicon, 40, random.Random(9))
    csvs = {}
    for workers in (1, 4):
        rows = build_news_similarity(profiles, top_k=5, workers=workers)
        path = tmp_path / f"w{workers}.csv"
        write_similarity_csv(rows, path)
        csvs[workers] = path.read_bytes()
    assert csvs[1] == csvs[4]


def _ctx(pool, now=EPOCH, window_reads=None, interactors=None):
    return RankContext(
        now=now,
        graph=SocialGraph(),
        interactors=interactors or {},
        window_reads=window_reads or {},
        pool=list(pool),
        author_of={},
        decay=DecayConfig(),
    )


def test_base_table_zero_users_empty(lexicon):
    items = [make_profile(lexicon, "n1", description="traffic jam")]
    assert build_user_news_base([], items, _ctx(["n1"]), RankWeights()) == []


def test_base_table_matches_hand_score(lexicon):
    item = make_profile(lexicon, "n1", description="sushi menu", created_at=EPOCH - timedelta(hours=6))
    user = UserProfile(user_id="u1", short_term={"food": 1.0}, long_term={"food": 1.0})
    weights = RankWeights()
    rows = build_user_news_base([user], [item], _ctx(["n1"]), weights)
    assert len(rows) == 1
    # P=1, So=0, R=0.5, T=0 -> 0.4 + 0.15
    assert rows[0].recommendation_score == pytest.approx(0.55, abs=1e-9)


def test_base_table_skips_read_items(lexicon):
    item = make_profile(lexicon, "n1", description="sushi menu")
    user = UserProfile(user_id="u1", read_set={"n1"})
    assert build_user_news_base([user], [item], _ctx(["n1"]), RankWeights()) == []


def test_merge_online_no_changes_recomputes_recency_only(lexicon):
    weights = RankWeights()
    item = make_profile(lexicon, "n1", description="sushi menu", created_at=EPOCH)
    user = UserProfile(user_id="u1", short_term={"food": 1.0}, long_term={"food": 1.0})
    batch_rows = build_user_news_base([user], [item], _ctx(["n1"]), weights)

    later = EPOCH + timedelta(hours=6)
    merged = merge_online(batch_rows, (), [], user, {"n1": item}, _ctx(["n1"], now=later), weights)
    assert len(merged) == 1
    c = merged[0].components
    batch_score = batch_rows[0].recommendation_score
    # only the recency term moved: base had R=1, merge has R=0.5
    assert merged[0].score == pytest.approx(batch_score - weights.w_recency * 0.5, abs=1e-9)
    assert c["pref"] == pytest.approx(1.0)
    assert c["trend"] == 0.0


def test_merge_online_excludes_items_read_since_batch(lexicon):
    item = make_profile(lexicon, "n1", description="sushi menu")
    user = UserProfile(user_id="u1")
    rows = [BaseScoreRow("u1", "n1", 0.5)]
    merged = merge_online(rows, ["n1"], [], user, {"n1": item}, _ctx(["n1"]), RankWeights())
    assert merged == []


def test_merge_online_adds_fresh_items(lexicon):
    fresh = make_profile(
        lexicon, "n2", description="sushi menu", created_at=EPOCH - timedelta(minutes=1)
    )
    user = UserProfile(user_id="u1")
    merged = merge_online([], (), [fresh], user, {"n2": fresh}, _ctx(["n2"]), RankWeights())
    assert [m.news_id for m in merged] == ["n2"]
    assert merged[0].components["recency"] == pytest.approx(1.0, abs=5e-3)


def test_csv_byte_determinism(tmp_path, lexicon):
    profiles = _random_profiles(lexicon, 20, random.Random(1))
    rows = build_news_similarity(profiles, top_k=3)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_similarity_csv(rows, p1)
    write_similarity_csv(build_news_similarity(profiles, top_k=3), p2)
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text(encoding="utf-8").splitlines()[0]
    assert header == "news_id,similar_news,similarity_score"


def test_base_csv_round_trip(tmp_path):
    rows = [BaseScoreRow("u1", "n1", 0.123456789), BaseScoreRow("u2", "n2", 1.0)]
    path = tmp_path / "base.csv"
    write_base_csv(rows, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "user_id,news_id,recommendation_score"
    back = read_base_csv(path)
    assert [r.user_id for r in back] == ["u1", "u2"]
    assert back[0].recommendation_score == pytest.approx(0.123457, abs=1e-9)
