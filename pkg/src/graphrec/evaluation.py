"""Hold-out evaluation: train/test split, MAE/RMSE/MPE, algorithm comparison, latency."""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .cf import DEFAULT_K, RatingMatrixView, correlation_row, default_prediction, knn_predict, predict_cf
from .errors import ValidationError
from .graph import Graph, VisitCounter
from .interactions import sum_contributions
from .kinds import NodeKind
from .scoring import score_unconsumed_movie, unconsumed_movies

log = logging.getLogger(__name__)

# Weights live in [-1, 1], so percentage error is relative to a width of 2.
SCALE_WIDTH = 2.0

ALGORITHMS = ("knn", "pearson", "sam_hybrid")
REPORT_HEADER = "algorithm\tmae\trmse\tmpe_percent\tn_predictions\tn_undefined"

Predictor = Callable[[int, int], Optional[float]]


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class HeldOutRating:
    person: int
    movie: int
    weight: float


@dataclass
class MetricsReport:
    mae: float
    rmse: float
    mpe: float
    n_predictions: int
    n_undefined: int
    # MAE over the pairs whose prediction was defined; None if there were none
    mae_defined: Optional[float] = None
    log: list[tuple[int, int, float, float]] = field(default_factory=list, repr=False, compare=False)

    def row(self, name: str) -> str:
        return (
            f"{name}\t{self.mae:.4f}\t{self.rmse:.4f}\t{self.mpe:.4f}\t"
            f"{self.n_predictions}\t{self.n_undefined}"
        )


def mpe_from_mae(mae: float) -> float:
    return 100.0 * mae / SCALE_WIDTH


def split(graph: Graph, config: SplitConfig = SplitConfig()) -> tuple[Graph, list[HeldOutRating]]:
    """Hold out a random share of the rated (person, movie) pairs.

    A pair is rated when it carries at least one explicit interaction. All of
    a held-out pair's interactions leave the training graph and its aggregate
    weight becomes the target. Catalog structure stays intact. The training
    share is ``floor(train_fraction * n)``.
    """
    pairs = sorted(
        {
            (e.person, e.item)
            for e in graph.interactions()
            if e.kind.is_explicit and graph.kind(e.item) is NodeKind.MOVIE
        }
    )
    if not pairs:
        raise ValidationError("graph has no rating interactions to split")
    random.Random(config.seed).shuffle(pairs)
    n_train = math.floor(config.train_fraction * len(pairs))
    held = sorted(pairs[n_train:])
    held_set = set(held)
    train = graph.copy(e for e in graph.interactions() if (e.person, e.item) not in held_set)
    test = [
        HeldOutRating(p, m, sum_contributions(graph.interactions_between(p, m), NodeKind.MOVIE))
        for p, m in held
    ]
    return train, test


def evaluate(
    predictor: Predictor,
    test: Sequence[HeldOutRating],
    default: Callable[[int], Optional[float]],
) -> MetricsReport:
    """Score ``predictor`` on every test pair; undefined predictions fall back to ``default``."""
    if not test:
        raise ValidationError("test set is empty")
    abs_err, sq_err, rows, defined_err = [], [], [], []
    undefined = 0
    for case in test:
        p = predictor(case.person, case.movie)
        if p is None:
            undefined += 1
            p = default(case.person)
            if p is None:
                p = 0.0
        else:
            defined_err.append(abs(p - case.weight))
        err = p - case.weight
        abs_err.append(abs(err))
        sq_err.append(err * err)
        rows.append((case.person, case.movie, p, case.weight))
    n = len(test)
    mae = math.fsum(abs_err) / n
    rmse = math.sqrt(math.fsum(sq_err) / n)
    mae_defined = math.fsum(defined_err) / len(defined_err) if defined_err else None
    return MetricsReport(mae, rmse, mpe_from_mae(mae), n, undefined, mae_defined, rows)


def make_predictors(train: Graph, view: RatingMatrixView, k: int = DEFAULT_K) -> dict[str, Predictor]:
    def sam(a, j):
        evidence = score_unconsumed_movie(train, a, j)
        if evidence is not None:
            return evidence.total
        return predict_cf(view, a, j)

    return {
        "knn": lambda a, j: knn_predict(view, a, j, k),
        "pearson": lambda a, j: predict_cf(view, a, j),
        "sam_hybrid": sam,
    }


def compare_algorithms(
    train: Graph, test: Sequence[HeldOutRating], k: int = DEFAULT_K
) -> dict[str, MetricsReport]:
    view = RatingMatrixView.from_graph(train)
    predictors = make_predictors(train, view, k)
    default = lambda a: default_prediction(view, a)  # noqa: E731
    out = {}
    for name in ALGORITHMS:
        t0 = time.perf_counter()
        out[name] = evaluate(predictors[name], test, default)
        log.info(
            "evaluated %s: mae=%.4f rmse=%.4f undefined=%d (%.2fs)",
            name,
            out[name].mae,
            out[name].rmse,
            out[name].n_undefined,
            time.perf_counter() - t0,
        )
    return out


def format_report(reports: dict[str, MetricsReport]) -> str:
    lines = [REPORT_HEADER] + [reports[name].row(name) for name in reports]
    return "\n".join(lines) + "\n"


# -- latency -----------------------------------------------------------------


@dataclass
class BenchReport:
    requests: int
    mean_ms: float
    latencies_ms: list[float] = field(repr=False)
    visits: list[int] = field(repr=False)
    aborted: Optional[str] = None

    @property
    def mean_visits(self) -> float:
        return math.fsum(self.visits) / len(self.visits) if self.visits else 0.0

    def line(self, name: str) -> str:
        status = f" aborted={self.aborted!r}" if self.aborted else ""
        return (
            f"{name}\trequests={self.requests}\tmean_ms={self.mean_ms:.3f}\t"
            f"mean_visits={self.mean_visits:.1f}\tmax_visits={max(self.visits, default=0)}{status}"
        )


RequestFn = Callable[[int, int, VisitCounter], object]


def sample_requests(graph: Graph, requests: int, seed: int = 0) -> list[tuple[int, int]]:
    """(person, movie) pairs: person uniform, movie uniform among that person's unconsumed movies."""
    rng = random.Random(seed)
    persons = graph.nodes(NodeKind.PERSON)
    if not persons:
        raise ValidationError("graph has no persons")
    out = []
    for _ in range(requests):
        person = rng.choice(persons)
        candidates = unconsumed_movies(graph, person)
        if candidates:
            out.append((person, rng.choice(candidates)))
    return out


def bench_latency(request: RequestFn, pairs: Iterable[tuple[int, int]]) -> BenchReport:
    """Time ``request(person, movie, visits)`` over each pair."""
    latencies, visits = [], []
    aborted = None
    for person, movie in pairs:
        counter = VisitCounter()
        t0 = time.perf_counter()
        try:
            request(person, movie, counter)
        except Exception as exc:  # partial stats are still useful
            aborted = f"{type(exc).__name__}: {exc}"
            log.error("request (%s, %s) failed: %s", person, movie, aborted)
            break
        latencies.append((time.perf_counter() - t0) * 1000.0)
        visits.append(counter.count)
    if not latencies and aborted is None:
        raise ValidationError("requests must be >= 1")
    mean = math.fsum(latencies) / len(latencies) if latencies else float("nan")
    return BenchReport(len(latencies), mean, latencies, visits, aborted)


def request_functions(graph: Graph, view: RatingMatrixView, k: int = DEFAULT_K) -> dict[str, RequestFn]:
    """Instrumented single-prediction requests for each service predictor."""

    def sam(a, j, visits):
        evidence = score_unconsumed_movie(graph, a, j, visits)
        if evidence is not None:
            return evidence.total
        p = predict_cf(view, a, j, visits=visits)
        return p if p is not None else default_prediction(view, a)

    def pearson(a, j, visits):
        p = predict_cf(view, a, j, visits=visits)
        return p if p is not None else default_prediction(view, a)

    def knn(a, j, visits):
        p = knn_predict(view, a, j, k, visits=visits)
        return p if p is not None else default_prediction(view, a)

    return {"sam": sam, "pearson": pearson, "knn": knn}


def full_matrix_pearson_visits(view: RatingMatrixView, person: int) -> int:
    """Visit count of one Pearson pass that correlates ``person`` with every other user."""
    counter = VisitCounter()
    correlation_row(view, person, counter)
    return counter.count
