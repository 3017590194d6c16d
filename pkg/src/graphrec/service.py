"""HTTP endpoints for movie recommendations, widget ranking and interaction intake.

GET handlers run under the graph's read lock and POST under its write lock,
so a request never observes a half-applied mutation.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .cf import DEFAULT_K, RatingMatrixView, default_prediction, knn_predict, predict_cf
from .errors import NodeNotFoundError, SchemaError, ValidationError
from .graph import Graph
from .interactions import aggregate_user_item_weight
from .kinds import InteractionKind, NodeKind
from .scoring import Method, Prediction, rank_widgets, recommend_movies, unconsumed_movies

log = logging.getLogger(__name__)

DEFAULT_N = 10


class PredictorName(enum.Enum):
    SAM = "sam"
    PEARSON = "pearson"
    KNN = "knn"


@dataclass
class ServiceConfig:
    graph_path: Optional[str] = None
    listen: str = "127.0.0.1:8000"
    predictor: PredictorName = PredictorName.SAM
    k: int = DEFAULT_K


class RecommenderState:
    """Graph plus the CF view derived from it; the view is rebuilt after each write."""

    def __init__(self, graph: Graph, config: ServiceConfig = ServiceConfig()):
        self.graph = graph
        self.config = config
        self.view = RatingMatrixView.from_graph(graph)

    def _cf(self, person: int, movie: int) -> float:
        if self.config.predictor is PredictorName.KNN:
            p = knn_predict(self.view, person, movie, self.config.k)
        else:
            p = predict_cf(self.view, person, movie)
        if p is None:
            p = default_prediction(self.view, person)
        return p if p is not None else 0.0

    def recommend(self, person: int, n: int) -> list[Prediction]:
        if self.config.predictor is PredictorName.SAM:
            return recommend_movies(self.graph, person, n, self._cf)
        self.graph.require_kind(person, NodeKind.PERSON)
        method = Method.KNN if self.config.predictor is PredictorName.KNN else Method.PEARSON
        preds = [
            Prediction(person, m, self._cf(person, m), method)
            for m in unconsumed_movies(self.graph, person)
        ]
        return sorted(preds, key=lambda p: (-p.score, p.item))[:n]

    def add_interaction(self, person, item, kind, polarity=0.0, timestamp=0) -> float:
        self.graph.add_interaction(person, item, kind, polarity, timestamp)
        self.view = RatingMatrixView.from_graph(self.graph)
        return aggregate_user_item_weight(self.graph, person, item)


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def _int_param(request: Request, name: str, default: Optional[int] = None) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        if default is None:
            raise ValidationError(f"missing query parameter {name!r}")
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"query parameter {name!r} must be an integer, got {raw!r}") from None


def _require(graph: Graph, node: int, kind: NodeKind) -> None:
    if node not in graph or graph.kind(node) is not kind:
        raise NodeNotFoundError(f"no {kind.value.lower()} with id {node}")


def create_app(state: RecommenderState) -> FastAPI:
    app = FastAPI(title="graphrec", version="0.1.0")
    app.state.recommender = state
    graph = state.graph

    @app.exception_handler(ValidationError)
    async def _bad_request(request, exc):
        return _error(400, str(exc))

    @app.exception_handler(NodeNotFoundError)
    async def _not_found(request, exc):
        return _error(404, str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "predictor": state.config.predictor.value}

    @app.get("/recommendations/movies")
    def movies(request: Request):
        person = _int_param(request, "person")
        n = _int_param(request, "n", DEFAULT_N)
        if n < 1:
            raise ValidationError(f"n must be >= 1, got {n}")
        with graph.read_locked():
            _require(graph, person, NodeKind.PERSON)
            preds = state.recommend(person, n)
        return [{"movieId": p.item, "score": p.score, "method": p.method.value} for p in preds]

    @app.get("/recommendations/widgets")
    def widgets(request: Request):
        person = _int_param(request, "person")
        movie = _int_param(request, "movie")
        with graph.read_locked():
            _require(graph, person, NodeKind.PERSON)
            _require(graph, movie, NodeKind.MOVIE)
            preds = rank_widgets(graph, person, movie)
        return [{"widgetId": p.item, "score": p.score, "method": p.method.value} for p in preds]

    @app.post("/graph/interactions", status_code=201)
    async def post_interaction(request: Request):
        try:
            body = await request.json()
        except ValueError:
            return _error(400, "body must be JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        try:
            person, item = body["person"], body["item"]
            kind_token = body["kind"]
            polarity = float(body.get("polarity", 0.0) or 0.0)
            timestamp = int(body.get("timestamp", 0) or 0)
        except (KeyError, TypeError, ValueError) as exc:
            return _error(400, f"malformed interaction body: {exc}")
        if not (isinstance(person, int) and isinstance(item, int)):
            return _error(400, "person and item must be integer node ids")
        try:
            kind = InteractionKind(str(kind_token).upper())
        except ValueError:
            return _error(422, f"unknown interaction kind {kind_token!r}")

        def store():
            with graph.write_locked():
                _require(graph, person, NodeKind.PERSON)
                if item not in graph:
                    raise NodeNotFoundError(f"no item with id {item}")
                return state.add_interaction(person, item, kind, polarity, timestamp)

        try:
            weight = await run_in_threadpool(store)
        except (SchemaError, ValidationError) as exc:
            return _error(422, str(exc))
        log.info("interaction %s %s->%s stored", kind.value, person, item)
        return JSONResponse(
            {"person": person, "item": item, "kind": kind.value, "weight": weight}, status_code=201
        )

    return app
