import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphrec.errors import NodeNotFoundError, PreconditionError
from graphrec.graph import VisitCounter
from graphrec.kinds import InteractionKind as IK
from graphrec.kinds import NodeKind as NK
from graphrec.kinds import StructuralEdgeKind as SK
from graphrec.scoring import (
    Method,
    WidgetDivisor,
    rank_widgets,
    recommend_movies,
    score_unconsumed_movie,
    score_widget_for_movie,
    unconsumed_movies,
)

from oracles import oracle_movie_score, oracle_widget_score, random_graph


def test_single_liked_widget(liked):
    g, ids = liked
    ev = score_unconsumed_movie(g, ids["alice"], ids["m0"])
    # a=2 widgets, k=1 keyword -> divisor 4
    assert ev.total == 0.25
    assert [(t.source, t.rating, t.divisor) for t in ev.case1_terms] == [(ids["w0"], 1.0, 4)]
    assert ev.case2_terms == []


def test_widget_plus_movie_sharing_keyword(liked):
    g, ids = liked
    g.add_interaction(ids["alice"], ids["m1"], IK.LIKE)
    ev = score_unconsumed_movie(g, ids["alice"], ids["m0"])
    assert ev.total == 0.375
    assert [(t.source, t.divisor) for t in ev.case2_terms] == [(ids["m1"], 8)]


def test_no_rated_neighbors_is_no_evidence(catalog):
    g, ids = catalog
    assert score_unconsumed_movie(g, ids["alice"], ids["m0"]) is None
    assert score_unconsumed_movie(g, ids["alice"], ids["m2"]) is None


def test_consumed_movie_is_a_precondition_error(liked):
    g, ids = liked
    g.add_interaction(ids["alice"], ids["m0"], IK.CONSUME)
    with pytest.raises(PreconditionError):
        score_unconsumed_movie(g, ids["alice"], ids["m0"])


def test_liked_but_unconsumed_movie_is_still_scored(liked):
    g, ids = liked
    g.add_interaction(ids["alice"], ids["m0"], IK.LIKE)
    assert score_unconsumed_movie(g, ids["alice"], ids["m0"]).total == 0.25


def test_unknown_ids(catalog):
    g, ids = catalog
    with pytest.raises(NodeNotFoundError):
        score_unconsumed_movie(g, ids["alice"], 404)
    with pytest.raises(NodeNotFoundError):
        score_unconsumed_movie(g, 404, ids["m0"])


def test_sharing_movie_counted_once(catalog):
    g, ids = catalog
    # m1 now shares both the keyword and widget w1 with m0
    g.add_structural_edge(SK.BELONGS_TO, ids["w1"], ids["m1"])
    g.add_interaction(ids["alice"], ids["m1"], IK.LIKE)
    ev = score_unconsumed_movie(g, ids["alice"], ids["m0"])
    assert len(ev.case2_terms) == 1
    assert ev.total == 1 / 8


def test_keyword_comment_is_case1(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["kw"], IK.COMMENT, 0.8)
    ev = score_unconsumed_movie(g, ids["alice"], ids["m1"])
    # m1 has k=1, a=0 -> divisor 2
    assert ev.total == 0.4


def test_case_dominance(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["w0"], IK.LIKE)
    g.add_interaction(ids["alice"], ids["m1"], IK.LIKE)
    ev = score_unconsumed_movie(g, ids["alice"], ids["m0"])
    assert abs(ev.case1_terms[0].value) == 2 * abs(ev.case2_terms[0].value)


@pytest.mark.parametrize("kind, sign", [(IK.LIKE, 1), (IK.DISLIKE, -1)])
def test_monotone_in_case1_ratings(liked, kind, sign):
    g, ids = liked
    before = score_unconsumed_movie(g, ids["alice"], ids["m0"]).total
    g.add_interaction(ids["alice"], ids["w1"], kind)
    after = score_unconsumed_movie(g, ids["alice"], ids["m0"]).total
    assert sign * (after - before) > 0


# -- widgets ----------------------------------------------------------------


def test_direct_widget_rating_as_is(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["w0"], IK.LIKE)
    assert score_widget_for_movie(g, ids["alice"], ids["w0"]).total == 1.0


def test_widget_in_one_liked_movie(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["m0"], IK.LIKE)
    assert score_widget_for_movie(g, ids["alice"], ids["w0"]).total == 0.5


def test_widget_in_two_movies_cancels(catalog):
    g, ids = catalog
    g.add_structural_edge(SK.BELONGS_TO, ids["w1"], ids["m1"])
    g.add_interaction(ids["alice"], ids["m0"], IK.LIKE)
    g.add_interaction(ids["alice"], ids["m1"], IK.DISLIKE)
    assert score_widget_for_movie(g, ids["alice"], ids["w1"]).total == 0.0


def test_plain_a_divisor_switch(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["m0"], IK.LIKE)
    ev = score_widget_for_movie(g, ids["alice"], ids["w0"], divisor_rule=WidgetDivisor.A)
    assert ev.total == 1.0


def test_unattached_widget_rejected(catalog):
    g, ids = catalog
    loose = g.add_node(NK.WIDGET, "loose")
    with pytest.raises(PreconditionError):
        score_widget_for_movie(g, ids["alice"], loose)


def test_rank_widgets(catalog):
    g, ids = catalog
    assert rank_widgets(g, ids["alice"], ids["m2"]) == []
    g.add_interaction(ids["alice"], ids["w1"], IK.LIKE)
    ranked = rank_widgets(g, ids["alice"], ids["m0"])
    assert [p.item for p in ranked] == [ids["w1"], ids["w0"]]
    assert ranked[0].method is Method.GRAPH
    assert ranked[1].method is Method.NONE


def test_rank_widgets_ties_by_id(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["m0"], IK.LIKE)
    assert [p.item for p in rank_widgets(g, ids["alice"], ids["m0"])] == [ids["w0"], ids["w1"]]


# -- recommendations ----------------------------------------------------------


def test_recommend_falls_back_for_isolated(liked):
    g, ids = liked
    calls = []

    def fallback(person, movie):
        calls.append(movie)
        return -0.9

    recs = recommend_movies(g, ids["alice"], 10, fallback)
    methods = {p.item: p.method for p in recs}
    assert methods[ids["m0"]] is Method.GRAPH
    # alice rated nothing around m1 or m2
    assert methods[ids["m1"]] is Method.PEARSON
    assert methods[ids["m2"]] is Method.PEARSON
    assert sorted(calls) == [ids["m1"], ids["m2"]]


def test_cold_person_is_all_fallback(catalog):
    g, ids = catalog
    recs = recommend_movies(g, ids["bob"], 5, lambda p, m: 0.0)
    assert {p.method for p in recs} == {Method.PEARSON}
    assert [p.item for p in recs] == [ids["m0"], ids["m1"], ids["m2"]]


def test_recommend_excludes_consumed_and_truncates(liked):
    g, ids = liked
    g.add_interaction(ids["alice"], ids["m1"], IK.CONSUME)
    recs = recommend_movies(g, ids["alice"], 1, lambda p, m: -1.0)
    assert [p.item for p in recs] == [ids["m0"]]
    assert ids["m1"] not in unconsumed_movies(g, ids["alice"])


def test_recommend_matches_brute_force():
    rng = random.Random(7)
    for _ in range(50):
        g = random_graph(rng)
        for person in g.nodes(NK.PERSON):
            fallback = lambda p, m: ((m * 37) % 11) / 10 - 0.5  # noqa: E731
            expected = []
            for m in g.nodes(NK.MOVIE):
                if any(e.kind is IK.CONSUME for e in g.interactions() if (e.person, e.item) == (person, m)):
                    continue
                s = oracle_movie_score(g, person, m)
                expected.append((m, s if s is not None else fallback(person, m)))
            expected.sort(key=lambda ms: (-ms[1], ms[0]))
            got = recommend_movies(g, person, 100, fallback)
            assert [p.item for p in got] == [m for m, _ in expected]
            assert [p.score for p in got] == pytest.approx([s for _, s in expected], abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scores_match_oracle(seed):
    g = random_graph(random.Random(seed))
    for person in g.nodes(NK.PERSON):
        for m in g.nodes(NK.MOVIE):
            if g.has_consumed(person, m):
                continue
            ev = score_unconsumed_movie(g, person, m)
            expected = oracle_movie_score(g, person, m)
            if expected is None:
                assert ev is None
            else:
                assert ev.total == pytest.approx(expected, abs=1e-12)
        for w in g.nodes(NK.WIDGET):
            if g.degree(w, SK.BELONGS_TO):
                got = score_widget_for_movie(g, person, w).total
                assert got == pytest.approx(oracle_widget_score(g, person, w), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_locality(seed):
    """Visited nodes stay inside the movie's two-hop catalog neighborhood."""
    g = random_graph(random.Random(seed))
    for person in g.nodes(NK.PERSON):
        for m in g.nodes(NK.MOVIE):
            if g.has_consumed(person, m):
                continue
            hood = {person, m}
            for kind in SK:
                for x in g.neighbors(m, kind):
                    hood.add(x)
                    hood.update(g.neighbors(x, kind))
            visits = VisitCounter()
            score_unconsumed_movie(g, person, m, visits)
            assert visits.nodes <= hood
