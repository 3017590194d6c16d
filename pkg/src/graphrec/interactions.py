"""Signed weights for user interactions and their per-(person, item) aggregate.

Explicit interactions (like, dislike, comment) carry their polarity directly.
Implicit ones are scaled by ``1 / (t - 1)`` where ``t`` is the number of
interaction types available for the target kind, so that their sum can never
flip the sign of a single explicit rating.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

from .errors import SchemaError, ValidationError
from .kinds import InteractionEdge, InteractionKind, NodeKind

log = logging.getLogger(__name__)

IK = InteractionKind

# Interaction kinds each target accepts. Anything absent is a blank cell.
LEGAL_KINDS: dict[NodeKind, frozenset[InteractionKind]] = {
    NodeKind.MOVIE: frozenset({IK.COMMENT, IK.LIKE, IK.DISLIKE, IK.FULLSCREEN, IK.CONSUME}),
    NodeKind.WIDGET: frozenset({IK.LIKE, IK.DISLIKE, IK.DISMISS, IK.SHOWMORE}),
    NodeKind.KEYWORD: frozenset({IK.COMMENT}),
    NodeKind.PERSON: frozenset(),
}

# t: number of interaction types per asset kind (movies 5, widgets 4).
INTERACTION_TYPE_COUNT = {kind: len(kinds) for kind, kinds in LEGAL_KINDS.items() if kind.is_asset}

IMPLICIT_POLARITY = {
    IK.CONSUME: 1,
    IK.FULLSCREEN: 1,
    IK.SHOWMORE: 1,
    IK.DISMISS: -1,
}


def is_legal(kind: InteractionKind, target_kind: NodeKind) -> bool:
    return kind in LEGAL_KINDS[target_kind]


def check_legal(kind: InteractionKind, target_kind: NodeKind, polarity: float = 0.0) -> None:
    if not is_legal(kind, target_kind):
        raise SchemaError(f"{kind.value} is not a legal interaction on a {target_kind.value}")
    if kind is IK.COMMENT:
        if not (math.isfinite(polarity) and -1.0 <= polarity <= 1.0):
            raise ValidationError(f"comment polarity must lie in [-1, 1], got {polarity!r}")
    elif polarity != 0.0:
        raise ValidationError(f"{kind.value} carries no polarity, got {polarity!r}")


def interaction_contribution(
    kind: InteractionKind, target_kind: NodeKind, polarity: float = 0.0
) -> float:
    """Weight one interaction contributes toward a person's stance on an item."""
    check_legal(kind, target_kind, polarity)
    if kind is IK.LIKE:
        return 1.0
    if kind is IK.DISLIKE:
        return -1.0
    if kind is IK.COMMENT:
        return float(polarity)
    t = INTERACTION_TYPE_COUNT[target_kind]
    return IMPLICIT_POLARITY[kind] / (t - 1)


def sum_contributions(edges: Sequence[InteractionEdge], target_kind: NodeKind) -> Optional[float]:
    """Sum of contributions, or None when ``edges`` is empty."""
    if not edges:
        return None
    total = 0.0
    kinds = set()
    for edge in edges:
        total += interaction_contribution(edge.kind, target_kind, edge.polarity)
        kinds.add(edge.kind)
    if IK.LIKE in kinds and IK.DISLIKE in kinds:
        log.warning(
            "person %s both liked and disliked item %s; summing", edges[0].person, edges[0].item
        )
    return total


def aggregate_user_item_weight(graph, person: int, item: int, visits=None) -> Optional[float]:
    """Aggregate weight of ``person`` toward ``item``; None means no evidence.

    Raises NodeNotFoundError for unknown ids.
    """
    graph.require_kind(person, NodeKind.PERSON)
    target_kind = graph.kind(item)
    if visits is not None:
        visits.touch(item)
    return sum_contributions(graph.interactions_between(person, item), target_kind)
