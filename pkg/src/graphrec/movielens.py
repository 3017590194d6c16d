"""MovieLens CSV ingestion, deterministic movie sampling and graph construction."""

from __future__ import annotations

import csv
import enum
import logging
import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .errors import IntegrityError, ParseError, ValidationError
from .graph import Graph
from .kinds import InteractionKind, NodeKind, StructuralEdgeKind

log = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

MIN_STARS, MAX_STARS = 0.5, 5.0
MIDPOINT = (MIN_STARS + MAX_STARS) / 2
HALF_RANGE = (MAX_STARS - MIN_STARS) / 2
LIKE_THRESHOLD = 3.5


class RatingMode(enum.Enum):
    LINEAR = "linear"
    BINARY = "binary"


@dataclass(frozen=True)
class Rating:
    user: int
    movie: int
    stars: float
    timestamp: int


@dataclass(frozen=True)
class Movie:
    movie: int
    title: str
    genres: str = ""


@dataclass(frozen=True)
class Tag:
    user: int
    movie: int
    tag: str
    timestamp: int


@dataclass
class RawDataset:
    ratings: list[Rating] = field(default_factory=list)
    movies: list[Movie] = field(default_factory=list)
    tags: list[Tag] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        """Sample metrics in the shape of the original evaluation table."""
        return {
            "users": len({r.user for r in self.ratings}),
            "movies": len(self.movies),
            "ratings": len(self.ratings),
            "keywords": len({normalize_tag(t.tag) for t in self.tags} - {""}),
        }


@dataclass(frozen=True)
class SampleSpec:
    n_movies: int
    seed: int = 0
    include_tags: bool = True

    def __post_init__(self):
        if self.n_movies < 1:
            raise ValidationError(f"n_movies must be >= 1, got {self.n_movies}")


def normalize_tag(tag: str) -> str:
    return tag.strip().lower()


def _read_csv(path: Path, columns: list[str]):
    if not path.is_file():
        raise FileNotFoundError(f"missing MovieLens file: {path}")
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file, expected a header row", path=path, line=1)
        if header[: len(columns)] != columns:
            raise ParseError(f"expected header {columns}, got {header}", path=path, line=1)
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, got {len(row)}", path=path, line=reader.line_num
                )
            yield reader.line_num, row


def _stars(value: str) -> float:
    stars = float(value)
    if not MIN_STARS <= stars <= MAX_STARS or (stars * 2) != int(stars * 2):
        raise ValueError(f"rating {value!r} is not a half-star value in [0.5, 5]")
    return stars


def load_movielens(dir_path: PathLike) -> RawDataset:
    """Read ratings.csv, movies.csv and tags.csv from a MovieLens directory."""
    root = Path(dir_path)
    raw = RawDataset()
    movie_path = root / "movies.csv"
    for line, row in _read_csv(movie_path, ["movieId", "title"]):
        try:
            raw.movies.append(Movie(int(row[0]), row[1], row[2] if len(row) > 2 else ""))
        except ValueError as exc:
            raise ParseError(str(exc), path=movie_path, line=line) from None
    known = {m.movie for m in raw.movies}
    if len(known) != len(raw.movies):
        raise IntegrityError(f"{movie_path}: duplicate movieId")

    ratings_path = root / "ratings.csv"
    for line, row in _read_csv(ratings_path, ["userId", "movieId", "rating", "timestamp"]):
        try:
            r = Rating(int(row[0]), int(row[1]), _stars(row[2]), int(row[3]))
        except ValueError as exc:
            raise ParseError(str(exc), path=ratings_path, line=line) from None
        if r.movie not in known:
            raise IntegrityError(f"{ratings_path}:{line}: unknown movieId {r.movie}")
        raw.ratings.append(r)

    tags_path = root / "tags.csv"
    for line, row in _read_csv(tags_path, ["userId", "movieId", "tag", "timestamp"]):
        try:
            t = Tag(int(row[0]), int(row[1]), row[2], int(row[3]))
        except ValueError as exc:
            raise ParseError(str(exc), path=tags_path, line=line) from None
        if t.movie not in known:
            raise IntegrityError(f"{tags_path}:{line}: unknown movieId {t.movie}")
        raw.tags.append(t)
    log.info("loaded %s: %s", root, raw.counts())
    return raw


def write_movielens(raw: RawDataset, dir_path: PathLike) -> None:
    root = Path(dir_path)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "movies.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["movieId", "title", "genres"])
        w.writerows((m.movie, m.title, m.genres) for m in raw.movies)
    with open(root / "ratings.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["userId", "movieId", "rating", "timestamp"])
        w.writerows((r.user, r.movie, f"{r.stars:g}", r.timestamp) for r in raw.ratings)
    with open(root / "tags.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["userId", "movieId", "tag", "timestamp"])
        w.writerows((t.user, t.movie, t.tag, t.timestamp) for t in raw.tags)


def map_rating_to_weight(stars: float, mode: RatingMode = RatingMode.LINEAR) -> float:
    """Map half-star ratings onto [-1, 1] (LINEAR) or {-1, +1} (BINARY)."""
    if not MIN_STARS <= stars <= MAX_STARS:
        raise ValidationError(f"stars must lie in [{MIN_STARS}, {MAX_STARS}], got {stars!r}")
    if RatingMode(mode) is RatingMode.BINARY:
        return 1.0 if stars >= LIKE_THRESHOLD else -1.0
    return (stars - MIDPOINT) / HALF_RANGE


def sample_dataset(raw: RawDataset, spec: SampleSpec) -> RawDataset:
    """Uniform movie sample with every rating and tag touching the chosen movies."""
    movie_ids = sorted(m.movie for m in raw.movies)
    if spec.n_movies > len(movie_ids):
        raise ValidationError(f"cannot sample {spec.n_movies} of {len(movie_ids)} movies")
    chosen = set(random.Random(spec.seed).sample(movie_ids, spec.n_movies))
    ratings = [r for r in raw.ratings if r.movie in chosen]
    tags = [t for t in raw.tags if t.movie in chosen] if spec.include_tags else []
    return RawDataset(
        ratings=ratings,
        movies=[m for m in raw.movies if m.movie in chosen],
        tags=tags,
    )


def build_graph(
    raw: RawDataset, mode: RatingMode = RatingMode.LINEAR, include_genres: bool = False
) -> Graph:
    """Persons, movies and tag keywords; each rating becomes one interaction edge.

    Node labels are the MovieLens ids (titles are not unique). Duplicate
    (user, movie) ratings keep the latest by timestamp.
    """
    mode = RatingMode(mode)
    known = {m.movie for m in raw.movies}
    latest: dict[tuple[int, int], Rating] = {}
    for r in raw.ratings:
        if r.movie not in known:
            raise IntegrityError(f"rating references unknown movieId {r.movie}")
        key = (r.user, r.movie)
        prev = latest.get(key)
        if prev is None or r.timestamp >= prev.timestamp:
            latest[key] = r

    g = Graph()
    person_ids = {u: g.add_node(NodeKind.PERSON, str(u)) for u in sorted({u for u, _ in latest})}
    movie_ids = {m: g.add_node(NodeKind.MOVIE, str(m)) for m in sorted(known)}

    pairs = set()
    for t in raw.tags:
        if t.movie not in known:
            raise IntegrityError(f"tag references unknown movieId {t.movie}")
        label = normalize_tag(t.tag)
        if label:
            pairs.add((t.movie, label))
    if include_genres:
        for m in raw.movies:
            for genre in m.genres.split("|"):
                label = normalize_tag(genre)
                if label and label != "(no genres listed)":
                    pairs.add((m.movie, label))
    for label in sorted({label for _, label in pairs}):
        g.add_node(NodeKind.KEYWORD, label)
    for movie, label in sorted(pairs):
        g.add_structural_edge(
            StructuralEdgeKind.HAS_KEYWORD, movie_ids[movie], g.find(NodeKind.KEYWORD, label)
        )

    for (user, movie), r in sorted(latest.items()):
        w = map_rating_to_weight(r.stars, mode)
        if mode is RatingMode.LINEAR:
            g.add_interaction(person_ids[user], movie_ids[movie], InteractionKind.COMMENT, w, r.timestamp)
        else:
            kind = InteractionKind.LIKE if w > 0 else InteractionKind.DISLIKE
            g.add_interaction(person_ids[user], movie_ids[movie], kind, 0.0, r.timestamp)
    return g
