"""Node, edge and interaction vocabularies, plus their persistence tokens."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class NodeKind(enum.Enum):
    PERSON = "PERSON"
    MOVIE = "MOVIE"
    WIDGET = "WIDGET"
    KEYWORD = "KEYWORD"

    @property
    def is_asset(self) -> bool:
        return self in (NodeKind.MOVIE, NodeKind.WIDGET)


class StructuralEdgeKind(enum.Enum):
    """Undirected catalog edges. ``endpoints`` gives the canonical (a, b) order."""

    HAS_KEYWORD = "HAS_KEYWORD"
    BELONGS_TO = "BELONGS_TO"

    @property
    def endpoints(self) -> tuple[NodeKind, NodeKind]:
        if self is StructuralEdgeKind.HAS_KEYWORD:
            return NodeKind.MOVIE, NodeKind.KEYWORD
        return NodeKind.WIDGET, NodeKind.MOVIE


class InteractionKind(enum.Enum):
    LIKE = "LIKE"
    DISLIKE = "DISLIKE"
    COMMENT = "COMMENT"
    CONSUME = "CONSUME"
    FULLSCREEN = "FULLSCREEN"
    DISMISS = "DISMISS"
    SHOWMORE = "SHOWMORE"

    @property
    def is_explicit(self) -> bool:
        return self in (InteractionKind.LIKE, InteractionKind.DISLIKE, InteractionKind.COMMENT)


@dataclass(frozen=True)
class InteractionEdge:
    """A person->item event. ``polarity`` is only meaningful for comments."""

    person: int
    item: int
    kind: InteractionKind
    polarity: float = 0.0
    timestamp: int = 0
