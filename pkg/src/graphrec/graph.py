"""In-memory property graph of persons, movies, widgets and keywords.

Graphs are append-only: node ids are handed out sequentially and never
reused. Structural edges (movie-keyword, widget-movie) are undirected and
deduplicated; interaction edges form a multiset.

Thread safety follows a readers/writer contract. All read methods are pure,
so any number of threads may call them while holding ``graph.read_locked()``;
mutations must happen under ``graph.write_locked()`` when the graph is shared.
"""

from __future__ import annotations

import contextlib
import os
import threading
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .errors import NodeNotFoundError, ParseError, SchemaError, ValidationError
from .interactions import check_legal
from .kinds import InteractionEdge, InteractionKind, NodeKind, StructuralEdgeKind

__all__ = ["Graph", "RWLock", "VisitCounter", "save", "load"]

PathLike = Union[str, os.PathLike]


class RWLock:
    """Many readers or one writer. Writers are preferred once waiting."""

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._writers_waiting = 0

    @contextlib.contextmanager
    def read(self):
        with self._cond:
            while self._writer or self._writers_waiting:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if not self._readers:
                    self._cond.notify_all()

    @contextlib.contextmanager
    def write(self):
        with self._cond:
            self._writers_waiting += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._writers_waiting -= 1
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


class VisitCounter:
    """Records which nodes a computation touched.

    ``count`` is the number of touches (with repeats), ``nodes`` the distinct set.
    """

    def __init__(self):
        self.count = 0
        self.nodes: set[int] = set()

    def touch(self, node: int) -> None:
        self.count += 1
        self.nodes.add(node)

    def touch_all(self, nodes: Iterable[int]) -> None:
        for n in nodes:
            self.touch(n)


def _normalize_label(kind: NodeKind, label: str) -> str:
    if not isinstance(label, str):
        raise ValidationError(f"label must be a string, got {type(label).__name__}")
    if kind is NodeKind.KEYWORD:
        label = label.strip().lower()
    if not label.strip():
        raise ValidationError("node label must be non-empty")
    if any(c in label for c in "\t\r\n"):
        raise ValidationError(f"node label may not contain tabs or newlines: {label!r}")
    return label


class Graph:
    def __init__(self):
        self._kinds: list[NodeKind] = []
        self._labels: list[str] = []
        self._index: dict[tuple[NodeKind, str], int] = {}
        # node -> edge kind -> neighbor set
        self._adj: dict[int, dict[StructuralEdgeKind, set[int]]] = defaultdict(
            lambda: defaultdict(set)
        )
        self._edges: list[tuple[StructuralEdgeKind, int, int]] = []
        self._interactions: list[InteractionEdge] = []
        self._pair: dict[tuple[int, int], list[InteractionEdge]] = defaultdict(list)
        self._items_of: dict[int, set[int]] = defaultdict(set)
        self._persons_of: dict[int, set[int]] = defaultdict(set)
        self._by_kind: dict[NodeKind, list[int]] = {k: [] for k in NodeKind}
        self.lock = RWLock()

    # -- locking -----------------------------------------------------------

    def read_locked(self):
        return self.lock.read()

    def write_locked(self):
        return self.lock.write()

    # -- nodes -------------------------------------------------------------

    def add_node(self, kind: NodeKind, label: str) -> int:
        """Return the id for (kind, label), creating the node if needed."""
        kind = NodeKind(kind)
        label = _normalize_label(kind, label)
        key = (kind, label)
        existing = self._index.get(key)
        if existing is not None:
            return existing
        node = len(self._kinds)
        self._kinds.append(kind)
        self._labels.append(label)
        self._index[key] = node
        self._by_kind[kind].append(node)
        return node

    def find(self, kind: NodeKind, label: str) -> Optional[int]:
        try:
            return self._index.get((kind, _normalize_label(kind, label)))
        except ValidationError:
            return None

    def __contains__(self, node) -> bool:
        return isinstance(node, int) and 0 <= node < len(self._kinds)

    def __len__(self) -> int:
        return len(self._kinds)

    @property
    def node_count(self) -> int:
        return len(self._kinds)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def interaction_count(self) -> int:
        return len(self._interactions)

    def _check(self, node: int) -> None:
        if node not in self:
            raise NodeNotFoundError(f"unknown node id {node!r}")

    def kind(self, node: int) -> NodeKind:
        self._check(node)
        return self._kinds[node]

    def label(self, node: int) -> str:
        self._check(node)
        return self._labels[node]

    def require_kind(self, node: int, *kinds: NodeKind) -> NodeKind:
        kind = self.kind(node)
        if kind not in kinds:
            expected = "/".join(k.value for k in kinds)
            raise SchemaError(f"node {node} is a {kind.value}, expected {expected}")
        return kind

    def nodes(self, kind: Optional[NodeKind] = None) -> list[int]:
        if kind is None:
            return list(range(len(self._kinds)))
        return list(self._by_kind[kind])

    # -- structural edges --------------------------------------------------

    def add_structural_edge(self, kind: StructuralEdgeKind, a: int, b: int) -> None:
        kind = StructuralEdgeKind(kind)
        self._check(a)
        self._check(b)
        want_a, want_b = kind.endpoints
        ka, kb = self._kinds[a], self._kinds[b]
        if (ka, kb) == (want_b, want_a):
            a, b, ka, kb = b, a, kb, ka
        if (ka, kb) != (want_a, want_b):
            raise SchemaError(
                f"{kind.value} needs ({want_a.value}, {want_b.value}), got ({ka.value}, {kb.value})"
            )
        if b in self._adj[a][kind]:
            return
        self._adj[a][kind].add(b)
        self._adj[b][kind].add(a)
        self._edges.append((kind, a, b))

    def neighbors(self, node: int, kind: StructuralEdgeKind) -> list[int]:
        self._check(node)
        adj = self._adj.get(node)
        if not adj or kind not in adj:
            return []
        return sorted(adj[kind])

    def degree(self, node: int, kind: StructuralEdgeKind) -> int:
        self._check(node)
        adj = self._adj.get(node)
        if not adj or kind not in adj:
            return 0
        return len(adj[kind])

    def structural_edges(self) -> list[tuple[StructuralEdgeKind, int, int]]:
        return list(self._edges)

    # -- interactions ------------------------------------------------------

    def add_interaction(
        self,
        person: int,
        item: int,
        kind: InteractionKind,
        polarity: float = 0.0,
        timestamp: int = 0,
    ) -> InteractionEdge:
        kind = InteractionKind(kind)
        self.require_kind(person, NodeKind.PERSON)
        check_legal(kind, self.kind(item), float(polarity))
        edge = InteractionEdge(person, item, kind, float(polarity), int(timestamp))
        self._interactions.append(edge)
        self._pair[(person, item)].append(edge)
        self._items_of[person].add(item)
        self._persons_of[item].add(person)
        return edge

    def interactions(self) -> list[InteractionEdge]:
        return list(self._interactions)

    def interactions_between(self, person: int, item: int) -> list[InteractionEdge]:
        return self._pair.get((person, item), [])

    def items_of(self, person: int) -> list[int]:
        """Items the person has any interaction with, ascending."""
        self._check(person)
        return sorted(self._items_of.get(person, ()))

    def persons_of(self, item: int) -> list[int]:
        """Persons with any interaction on the item, ascending."""
        self._check(item)
        return sorted(self._persons_of.get(item, ()))

    def has_consumed(self, person: int, movie: int) -> bool:
        return any(e.kind is InteractionKind.CONSUME for e in self.interactions_between(person, movie))

    # -- whole-graph helpers -----------------------------------------------

    def copy(self, interactions: Optional[Iterable[InteractionEdge]] = None) -> "Graph":
        """Same nodes (and ids) and structural edges; optionally different interactions."""
        g = Graph()
        for kind, label in zip(self._kinds, self._labels):
            g.add_node(kind, label)
        for kind, a, b in self._edges:
            g.add_structural_edge(kind, a, b)
        for e in self._interactions if interactions is None else interactions:
            g.add_interaction(e.person, e.item, e.kind, e.polarity, e.timestamp)
        return g

    def check_integrity(self) -> None:
        """Raise if any edge references a missing node."""
        for kind, a, b in self._edges:
            self._check(a)
            self._check(b)
        for e in self._interactions:
            self._check(e.person)
            self._check(e.item)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._kinds == other._kinds
            and self._labels == other._labels
            and set(self._edges) == set(other._edges)
            and sorted(self._interactions, key=_edge_key) == sorted(other._interactions, key=_edge_key)
        )

    def __repr__(self) -> str:
        return (
            f"Graph(nodes={self.node_count}, edges={self.edge_count}, "
            f"interactions={self.interaction_count})"
        )


def _edge_key(e: InteractionEdge):
    return (e.person, e.item, e.kind.value, e.polarity, e.timestamp)


# -- persistence -----------------------------------------------------------

SECTIONS = ("#NODES", "#SEDGES", "#INTERACTIONS")
END = "#END"


def dump_lines(graph: Graph) -> Iterator[str]:
    yield "#NODES"
    for node in range(graph.node_count):
        yield f"{node}\t{graph._kinds[node].value}\t{graph._labels[node]}"
    yield "#SEDGES"
    for kind, a, b in graph._edges:
        yield f"{kind.value}\t{a}\t{b}"
    yield "#INTERACTIONS"
    for e in graph._interactions:
        yield f"{e.person}\t{e.item}\t{e.kind.value}\t{e.polarity!r}\t{e.timestamp}"
    yield END


def save(graph: Graph, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in dump_lines(graph):
            f.write(line)
            f.write("\n")


def load(path: PathLike) -> Graph:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_lines(f, path=str(path))


def parse_lines(lines: Iterable[str], path: Optional[str] = None) -> Graph:
    g = Graph()
    section = None
    expected = list(SECTIONS)
    finished = False
    lineno = 0

    def fail(msg):
        raise ParseError(msg, path=path, line=lineno)

    for lineno, raw in enumerate(lines, start=1):
        if finished:
            if raw.strip():
                fail("content after #END")
            continue
        if not raw.endswith("\n"):
            fail("truncated line (missing newline)")
        line = raw.rstrip("\r\n")
        if line.startswith("#"):
            if line == END:
                if expected:
                    fail(f"#END before section {expected[0]}")
                finished = True
                continue
            if not expected or line != expected[0]:
                fail(f"unexpected header {line!r}")
            section = expected.pop(0)
            continue
        if section is None:
            fail("data before #NODES header")
        fields = line.split("\t")
        try:
            if section == "#NODES":
                if len(fields) != 3:
                    fail(f"node line needs 3 fields, got {len(fields)}")
                node_id, kind, label = int(fields[0]), NodeKind(fields[1]), fields[2]
                if node_id != g.node_count:
                    fail(f"node id {node_id} out of sequence (expected {g.node_count})")
                if g.add_node(kind, label) != node_id:
                    fail(f"duplicate node ({kind.value}, {label!r})")
            elif section == "#SEDGES":
                if len(fields) != 3:
                    fail(f"structural edge line needs 3 fields, got {len(fields)}")
                g.add_structural_edge(StructuralEdgeKind(fields[0]), int(fields[1]), int(fields[2]))
            else:
                if len(fields) != 5:
                    fail(f"interaction line needs 5 fields, got {len(fields)}")
                g.add_interaction(
                    int(fields[0]),
                    int(fields[1]),
                    InteractionKind(fields[2]),
                    float(fields[3]),
                    int(fields[4]),
                )
        except ParseError:
            raise
        except (ValueError, SchemaError, NodeNotFoundError) as exc:
            fail(str(exc))
    if not finished:
        lineno += 1
        fail("unexpected end of file (missing #END)")
    return g
