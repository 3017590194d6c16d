"""Two-hop graph evidence for movies and widgets, plus ranked recommendations.

Movie relevance for a person combines

* direct ratings of the widgets/keywords attached to the movie, each divided
  by ``a + k + 1`` (``a`` widgets and ``k`` keywords on the movie), and
* ratings of other movies that share a widget or keyword with it, each
  divided by ``2 * (a + k + 1)``.

Widget relevance uses the person's own rating of the widget as is, plus the
ratings of movies the widget belongs to divided by ``a + 1`` (``a`` movies
carrying the widget).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import PreconditionError, ValidationError
from .graph import Graph, VisitCounter
from .interactions import aggregate_user_item_weight
from .kinds import NodeKind, StructuralEdgeKind

HAS_KEYWORD = StructuralEdgeKind.HAS_KEYWORD
BELONGS_TO = StructuralEdgeKind.BELONGS_TO


class Method(enum.Enum):
    GRAPH = "GraphEvidence"
    PEARSON = "PearsonCF"
    KNN = "KNN"
    NONE = "NoEvidence"


@dataclass(frozen=True)
class Term:
    source: int
    rating: float
    divisor: float

    @property
    def value(self) -> float:
        return self.rating / self.divisor


@dataclass
class EvidenceBreakdown:
    case1_terms: list[Term] = field(default_factory=list)
    case2_terms: list[Term] = field(default_factory=list)

    @property
    def total(self) -> float:
        return sum(t.value for t in self.case1_terms) + sum(t.value for t in self.case2_terms)

    def __bool__(self) -> bool:
        return bool(self.case1_terms or self.case2_terms)


@dataclass(frozen=True)
class Prediction:
    person: int
    item: int
    score: float
    method: Method


class WidgetDivisor(enum.Enum):
    """How indirect widget evidence is scaled: ``a + 1`` (default) or plain ``a``."""

    A_PLUS_ONE = "a+1"
    A = "a"


def score_unconsumed_movie(
    graph: Graph, person: int, movie: int, visits: Optional[VisitCounter] = None
) -> Optional[EvidenceBreakdown]:
    """Graph evidence for a movie the person has not consumed; None if isolated."""
    graph.require_kind(person, NodeKind.PERSON)
    graph.require_kind(movie, NodeKind.MOVIE)
    if graph.has_consumed(person, movie):
        raise PreconditionError(f"person {person} already consumed movie {movie}")
    if visits is not None:
        visits.touch(person)
        visits.touch(movie)

    widgets = graph.neighbors(movie, BELONGS_TO)
    keywords = graph.neighbors(movie, HAS_KEYWORD)
    divisor = len(widgets) + len(keywords) + 1

    out = EvidenceBreakdown()
    sharing: set[int] = set()
    for x, kind in [(w, BELONGS_TO) for w in widgets] + [(kw, HAS_KEYWORD) for kw in keywords]:
        r = aggregate_user_item_weight(graph, person, x, visits)
        if r is not None:
            out.case1_terms.append(Term(x, r, divisor))
        sharing.update(graph.neighbors(x, kind))
    sharing.discard(movie)

    for other in sorted(sharing):
        r = aggregate_user_item_weight(graph, person, other, visits)
        if r is not None:
            out.case2_terms.append(Term(other, r, 2 * divisor))
    return out if out else None


def score_widget_for_movie(
    graph: Graph,
    person: int,
    widget: int,
    visits: Optional[VisitCounter] = None,
    divisor_rule: WidgetDivisor = WidgetDivisor.A_PLUS_ONE,
) -> EvidenceBreakdown:
    graph.require_kind(person, NodeKind.PERSON)
    graph.require_kind(widget, NodeKind.WIDGET)
    movies = graph.neighbors(widget, BELONGS_TO)
    if not movies:
        raise PreconditionError(f"widget {widget} belongs to no movie")
    if visits is not None:
        visits.touch(person)

    out = EvidenceBreakdown()
    direct = aggregate_user_item_weight(graph, person, widget, visits)
    if direct is not None:
        out.case1_terms.append(Term(widget, direct, 1))
    a = len(movies)
    divisor = a + 1 if divisor_rule is WidgetDivisor.A_PLUS_ONE else a
    for m in movies:
        r = aggregate_user_item_weight(graph, person, m, visits)
        if r is not None:
            out.case2_terms.append(Term(m, r, divisor))
    return out


def _ranked(predictions: list[Prediction]) -> list[Prediction]:
    return sorted(predictions, key=lambda p: (-p.score, p.item))


def unconsumed_movies(graph: Graph, person: int) -> list[int]:
    return [m for m in graph.nodes(NodeKind.MOVIE) if not graph.has_consumed(person, m)]


def recommend_movies(
    graph: Graph,
    person: int,
    n: int,
    fallback: Callable[[int, int], float],
    visits: Optional[VisitCounter] = None,
) -> list[Prediction]:
    """Top-``n`` unconsumed movies; isolated ones are scored by ``fallback(person, movie)``."""
    graph.require_kind(person, NodeKind.PERSON)
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    out = []
    for movie in unconsumed_movies(graph, person):
        evidence = score_unconsumed_movie(graph, person, movie, visits)
        if evidence is not None:
            out.append(Prediction(person, movie, evidence.total, Method.GRAPH))
        else:
            out.append(Prediction(person, movie, fallback(person, movie), Method.PEARSON))
    return _ranked(out)[:n]


def rank_widgets(
    graph: Graph,
    person: int,
    movie: int,
    divisor_rule: WidgetDivisor = WidgetDivisor.A_PLUS_ONE,
) -> list[Prediction]:
    graph.require_kind(person, NodeKind.PERSON)
    graph.require_kind(movie, NodeKind.MOVIE)
    out = []
    for w in graph.neighbors(movie, BELONGS_TO):
        evidence = score_widget_for_movie(graph, person, w, divisor_rule=divisor_rule)
        out.append(Prediction(person, w, evidence.total, Method.GRAPH if evidence else Method.NONE))
    return _ranked(out)
