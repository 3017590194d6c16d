import threading

import pytest
from fastapi.testclient import TestClient

from graphrec.kinds import InteractionKind as IK
from graphrec.scoring import rank_widgets
from graphrec.service import PredictorName, RecommenderState, ServiceConfig, create_app


@pytest.fixture
def served(liked):
    g, ids = liked
    g.add_interaction(ids["bob"], ids["m1"], IK.COMMENT, 0.6)
    g.add_interaction(ids["bob"], ids["m2"], IK.COMMENT, -0.4)
    state = RecommenderState(g)
    return TestClient(create_app(state)), state, ids


def test_health(served):
    client, _, _ = served
    r = client.get("/health")
    assert r.status_code == 200 and r.json()["status"] == "ok"


def test_movie_recommendations(served):
    client, _, ids = served
    r = client.get("/recommendations/movies", params={"person": ids["alice"], "n": 5})
    assert r.status_code == 200
    body = r.json()
    by_id = {row["movieId"]: row for row in body}
    assert by_id[ids["m0"]] == {"movieId": ids["m0"], "score": 0.25, "method": "GraphEvidence"}
    # no neighbors for m1/m2: alice's own mean (+1 from the widget like)
    assert by_id[ids["m1"]] == {"movieId": ids["m1"], "score": 1.0, "method": "PearsonCF"}
    scores = [row["score"] for row in body]
    assert scores == sorted(scores, reverse=True)


def test_recommendations_are_deterministic(served):
    client, _, ids = served
    params = {"person": ids["alice"]}
    first = client.get("/recommendations/movies", params=params).json()
    assert all(client.get("/recommendations/movies", params=params).json() == first for _ in range(5))


@pytest.mark.parametrize("params", [{}, {"person": "abc"}, {"person": 0, "n": 0}, {"person": 0, "n": "x"}])
def test_bad_query_is_400(served, params):
    client, _, _ = served
    assert client.get("/recommendations/movies", params=params).status_code == 400


def test_unknown_person_is_404(served):
    client, _, ids = served
    assert client.get("/recommendations/movies", params={"person": 999}).status_code == 404
    # a movie id is not a person
    assert client.get("/recommendations/movies", params={"person": ids["m0"]}).status_code == 404


def test_widget_ranking_matches_library(served):
    client, state, ids = served
    r = client.get("/recommendations/widgets", params={"person": ids["alice"], "movie": ids["m0"]})
    assert r.status_code == 200
    expected = rank_widgets(state.graph, ids["alice"], ids["m0"])
    assert [row["widgetId"] for row in r.json()] == [p.item for p in expected]
    assert r.json()[0]["method"] == "GraphEvidence"
    assert client.get("/recommendations/widgets", params={"person": ids["alice"], "movie": 999}).status_code == 404
    assert client.get("/recommendations/widgets", params={"person": ids["alice"]}).status_code == 400


def test_post_interaction_updates_weight(served):
    client, _, ids = served
    body = {"person": ids["alice"], "item": ids["m1"], "kind": "Like"}
    r = client.post("/graph/interactions", json=body)
    assert r.status_code == 201
    assert r.json() == {"person": ids["alice"], "item": ids["m1"], "kind": "LIKE", "weight": 1.0}
    r = client.post("/graph/interactions", json={**body, "kind": "CONSUME"})
    assert r.json()["weight"] == 1.25
    recs = client.get("/recommendations/movies", params={"person": ids["alice"]}).json()
    assert ids["m1"] not in [row["movieId"] for row in recs]


def test_post_changes_graph_evidence(served):
    client, _, ids = served
    r = client.post("/graph/interactions", json={"person": ids["alice"], "item": ids["m1"], "kind": "LIKE"})
    assert r.status_code == 201
    recs = client.get("/recommendations/movies", params={"person": ids["alice"]}).json()
    m0 = next(row for row in recs if row["movieId"] == ids["m0"])
    assert m0 == {"movieId": ids["m0"], "score": 0.375, "method": "GraphEvidence"}


@pytest.mark.parametrize(
    "body, status",
    [
        ({"person": 0, "item": 2, "kind": "teleport"}, 422),
        ({"person": 0, "item": 7, "kind": "LIKE"}, 422),  # Like on a keyword
        ({"person": 0, "item": 2, "kind": "COMMENT", "polarity": 3}, 422),
        ({"person": 0, "item": 999, "kind": "LIKE"}, 404),
        ({"person": 999, "item": 2, "kind": "LIKE"}, 404),
        ({"person": 0, "kind": "LIKE"}, 400),
        ({"person": "alice", "item": 2, "kind": "LIKE"}, 400),
        ([1, 2], 400),
    ],
)
def test_post_errors(served, body, status):
    client, state, _ = served
    before = state.graph.interaction_count
    assert client.post("/graph/interactions", json=body).status_code == status
    assert state.graph.interaction_count == before


def test_post_non_json(served):
    client, _, _ = served
    r = client.post("/graph/interactions", content=b"not json", headers={"content-type": "application/json"})
    assert r.status_code == 400


@pytest.mark.parametrize("name", [PredictorName.PEARSON, PredictorName.KNN])
def test_cf_predictors(liked, name):
    g, ids = liked
    g.add_interaction(ids["bob"], ids["m1"], IK.COMMENT, 0.6)
    client = TestClient(create_app(RecommenderState(g, ServiceConfig(predictor=name))))
    body = client.get("/recommendations/movies", params={"person": ids["alice"]}).json()
    assert {row["method"] for row in body} == {"KNN" if name is PredictorName.KNN else "PearsonCF"}


def test_concurrent_reads_and_writes(served):
    client, state, ids = served
    errors = []

    def reader():
        for _ in range(20):
            r = client.get("/recommendations/movies", params={"person": ids["bob"]})
            if r.status_code != 200:
                errors.append(r.status_code)

    def writer():
        for _ in range(20):
            r = client.post("/graph/interactions", json={"person": ids["bob"], "item": ids["w0"], "kind": "SHOWMORE"})
            if r.status_code != 201:
                errors.append(r.status_code)

    threads = [threading.Thread(target=reader) for _ in range(3)] + [threading.Thread(target=writer)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(30)
    assert errors == []
    state.graph.check_integrity()
    assert len(state.graph.interactions_between(ids["bob"], ids["w0"])) == 20
