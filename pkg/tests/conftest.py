from pathlib import Path

import pytest

from graphrec.graph import Graph
from graphrec.kinds import InteractionKind as IK
from graphrec.kinds import NodeKind as NK
from graphrec.kinds import StructuralEdgeKind as SK

ROOT = Path(__file__).resolve().parent.parent
MOVIELENS = ROOT / "data" / "ml-latest-small"


@pytest.fixture(scope="session")
def movielens_dir():
    if not (MOVIELENS / "ratings.csv").is_file():
        pytest.skip(f"MovieLens sample not found at {MOVIELENS}")
    return MOVIELENS


@pytest.fixture(scope="session")
def movielens_raw(movielens_dir):
    from graphrec.movielens import load_movielens

    return load_movielens(movielens_dir)


@pytest.fixture
def catalog():
    """Two movies sharing a keyword; the first has two widgets.

    m0 -- w0, w1 (BELONGS_TO), kw (HAS_KEYWORD)
    m1 -- kw (HAS_KEYWORD), w1 (BELONGS_TO)
    """
    g = Graph()
    ids = {
        "alice": g.add_node(NK.PERSON, "alice"),
        "bob": g.add_node(NK.PERSON, "bob"),
        "m0": g.add_node(NK.MOVIE, "The Hunger Games"),
        "m1": g.add_node(NK.MOVIE, "Winter's Bone"),
        "m2": g.add_node(NK.MOVIE, "Isolated"),
        "w0": g.add_node(NK.WIDGET, "cast trivia"),
        "w1": g.add_node(NK.WIDGET, "soundtrack"),
        "kw": g.add_node(NK.KEYWORD, "lawrence"),
    }
    g.add_structural_edge(SK.BELONGS_TO, ids["w0"], ids["m0"])
    g.add_structural_edge(SK.BELONGS_TO, ids["w1"], ids["m0"])
    g.add_structural_edge(SK.HAS_KEYWORD, ids["m0"], ids["kw"])
    g.add_structural_edge(SK.HAS_KEYWORD, ids["m1"], ids["kw"])
    return g, ids


@pytest.fixture
def liked(catalog):
    g, ids = catalog
    g.add_interaction(ids["alice"], ids["w0"], IK.LIKE)
    return g, ids
