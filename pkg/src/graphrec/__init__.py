"""Graph-based hybrid recommendations for first and second screen media."""

from .cf import (
    RatingMatrixView,
    default_prediction,
    hybrid_predict,
    knn_predict,
    pearson_correlation,
    predict_cf,
)
from .errors import (
    GraphRecError,
    IntegrityError,
    NodeNotFoundError,
    ParseError,
    PreconditionError,
    SchemaError,
    ValidationError,
)
from .graph import Graph, VisitCounter, load, save
from .interactions import aggregate_user_item_weight, interaction_contribution
from .kinds import InteractionEdge, InteractionKind, NodeKind, StructuralEdgeKind
from .scoring import (
    EvidenceBreakdown,
    Method,
    Prediction,
    rank_widgets,
    recommend_movies,
    score_unconsumed_movie,
    score_widget_for_movie,
)

__version__ = "0.1.0"
