"""User-based Pearson collaborative filtering, the k-NN baseline and the hybrid.

Means are taken over each user's whole profile, not only the co-rated items,
so a user's mean is the same in every correlation and prediction it enters.
Correlations over fewer than two co-rated items, or with zero spread on
either side, are undefined and the neighbor is skipped.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Optional

from .errors import NodeNotFoundError, ValidationError
from .graph import Graph, VisitCounter
from .interactions import aggregate_user_item_weight
from .kinds import NodeKind
from .scoring import Method, Prediction, score_unconsumed_movie

DEFAULT_K = 20


class RatingMatrixView:
    """Read-only person -> {item: weight} matrix with per-person means."""

    def __init__(self, ratings: Mapping[int, Mapping[int, float]], persons: Iterable[int] = ()):
        self.ratings: dict[int, dict[int, float]] = {p: dict(r) for p, r in ratings.items()}
        for p in persons:
            self.ratings.setdefault(p, {})
        self.means: dict[int, float] = {
            p: math.fsum(r.values()) / len(r) for p, r in self.ratings.items() if r
        }
        raters: dict[int, list[int]] = {}
        for p in sorted(self.ratings):
            for item in self.ratings[p]:
                raters.setdefault(item, []).append(p)
        self.raters = raters
        values = [w for r in self.ratings.values() for w in r.values()]
        self.global_mean: Optional[float] = math.fsum(values) / len(values) if values else None
        self.n_ratings = len(values)
        self._corr: dict[tuple[int, int], Optional[float]] = {}

    @classmethod
    def from_graph(cls, graph: Graph, item_kinds: Optional[Iterable[NodeKind]] = None):
        """Aggregate interaction weights of every person in ``graph``."""
        kinds = set(item_kinds) if item_kinds is not None else None
        ratings = {}
        for p in graph.nodes(NodeKind.PERSON):
            row = {}
            for item in graph.items_of(p):
                if kinds is None or graph.kind(item) in kinds:
                    row[item] = aggregate_user_item_weight(graph, p, item)
            ratings[p] = row
        return cls(ratings)

    @property
    def persons(self) -> list[int]:
        return sorted(self.ratings)

    def require(self, person: int) -> dict[int, float]:
        try:
            return self.ratings[person]
        except KeyError:
            raise NodeNotFoundError(f"unknown person {person!r}") from None

    def mean(self, person: int) -> Optional[float]:
        self.require(person)
        return self.means.get(person)


def _pearson(view: RatingMatrixView, a: int, u: int, visits: Optional[VisitCounter]) -> Optional[float]:
    ra, ru = view.ratings[a], view.ratings[u]
    small, big = (ra, ru) if len(ra) <= len(ru) else (ru, ra)
    common = sorted(i for i in small if i in big)
    if visits is not None:
        visits.touch_all(common)
    if len(common) < 2:
        return None
    ma, mu = view.means[a], view.means[u]
    da = [ra[i] - ma for i in common]
    du = [ru[i] - mu for i in common]
    num = math.fsum(x * y for x, y in zip(da, du))
    den = math.sqrt(math.fsum(x * x for x in da) * math.fsum(y * y for y in du))
    if den == 0.0:
        return None
    return max(-1.0, min(1.0, num / den))


def pearson_correlation(
    view: RatingMatrixView, a: int, u: int, visits: Optional[VisitCounter] = None
) -> Optional[float]:
    """Pearson correlation of two persons over their co-rated items, or None."""
    if a == u:
        raise ValidationError("correlation of a person with itself is not defined")
    view.require(a)
    view.require(u)
    if visits is not None:
        return _pearson(view, a, u, visits)
    key = (a, u) if a < u else (u, a)
    try:
        return view._corr[key]
    except KeyError:
        c = view._corr[key] = _pearson(view, *key, None)
        return c


def correlation_row(
    view: RatingMatrixView, a: int, visits: Optional[VisitCounter] = None
) -> dict[int, Optional[float]]:
    """Correlations of ``a`` with every other person (one full pass over the matrix)."""
    view.require(a)
    row = {}
    for u in view.persons:
        if u == a:
            continue
        if visits is not None:
            visits.touch(u)
            visits.touch_all(view.ratings[u])
        row[u] = pearson_correlation(view, a, u)
    return row


def _neighbors(view, a, j, include_zero, visits):
    """(person, correlation) pairs eligible to vote on ``j``, ascending by person."""
    out = []
    for u in view.raters.get(j, ()):
        if u == a:
            continue
        if visits is not None:
            visits.touch(u)
        c = pearson_correlation(view, a, u, visits)
        if c is None or (c == 0.0 and not include_zero):
            continue
        out.append((u, c))
    return out


def _weighted(view, a, j, neighbors) -> Optional[float]:
    den = math.fsum(abs(c) for _, c in neighbors)
    if den == 0.0:
        return None
    num = math.fsum((view.ratings[u][j] - view.means[u]) * c for u, c in neighbors)
    return view.means[a] + num / den


def predict_cf(
    view: RatingMatrixView,
    a: int,
    j: int,
    include_zero: bool = False,
    visits: Optional[VisitCounter] = None,
) -> Optional[float]:
    """Mean-centred Pearson prediction of ``a``'s weight for item ``j``, or None."""
    view.require(a)
    if visits is not None:
        visits.touch(a)
        visits.touch(j)
    if a not in view.means:
        return None
    return _weighted(view, a, j, _neighbors(view, a, j, include_zero, visits))


def knn_predict(
    view: RatingMatrixView,
    a: int,
    j: int,
    k: int = DEFAULT_K,
    include_zero: bool = False,
    visits: Optional[VisitCounter] = None,
) -> Optional[float]:
    """Like :func:`predict_cf` but only the ``k`` raters of ``j`` with largest |c| vote."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    view.require(a)
    if visits is not None:
        visits.touch(a)
        visits.touch(j)
    if a not in view.means:
        return None
    pool = _neighbors(view, a, j, include_zero, visits)
    if len(pool) > k:
        best = sorted(pool, key=lambda uc: (-abs(uc[1]), uc[0]))[:k]
        pool = sorted(best)
    return _weighted(view, a, j, pool)


def default_prediction(view: RatingMatrixView, a: int) -> Optional[float]:
    """Cold-start value: the person's mean, else the global mean."""
    m = view.mean(a)
    return m if m is not None else view.global_mean


def hybrid_predict(
    graph: Graph,
    view: RatingMatrixView,
    a: int,
    j: int,
    visits: Optional[VisitCounter] = None,
) -> Prediction:
    """Graph evidence when available, otherwise Pearson CF, otherwise the cold-start default."""
    evidence = score_unconsumed_movie(graph, a, j, visits)
    if evidence is not None:
        return Prediction(a, j, evidence.total, Method.GRAPH)
    p = predict_cf(view, a, j, visits=visits)
    if p is None:
        p = default_prediction(view, a)
    return Prediction(a, j, p if p is not None else 0.0, Method.PEARSON)
