"""Immutable simple graphs and the metric primitives every other module uses."""

from __future__ import annotations

import logging
from bisect import bisect_left
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from .exceptions import GraphFormatError, PreconditionError

logger = logging.getLogger(__name__)

Path = tuple[int, ...]


class _Infinite:
    """Distance between vertex sets with no path between them."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'INFINITE'

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash('INFINITE')

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITE = _Infinite()


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..vertex_count-1."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if vertex_count < 0:
            raise GraphFormatError(f'negative vertex count {vertex_count}')
        neighbours = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphFormatError(f'edge ({u}, {v}) outside 0..{vertex_count - 1}')
            if u == v:
                raise GraphFormatError(f'loop at vertex {u}')
            neighbours[u].add(v)
            neighbours[v].add(u)
        return cls(vertex_count, tuple(tuple(sorted(ns)) for ns in neighbours))

    def vertices(self) -> range:
        return range(self.vertex_count)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (u, v) with u < v, sorted."""
        return [(u, v) for u in self.vertices() for v in self.adjacency[u] if u < v]

    def edge_count(self) -> int:
        return sum(len(ns) for ns in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        ns = self.adjacency[u]
        i = bisect_left(ns, v)
        return i < len(ns) and ns[i] == v

    def check_vertices(self, vertices: Iterable[int]) -> None:
        for v in vertices:
            if not 0 <= v < self.vertex_count:
                raise PreconditionError(f'vertex {v} is not in a graph on {self.vertex_count} vertices')

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs BFS distances; -1 marks unreachable pairs."""
        n = self.vertex_count
        logger.debug('computing %dx%d distance matrix', n, n)
        matrix = np.full((n, n), -1, dtype=np.int32)
        for source in range(n):
            row = matrix[source]
            row[source] = 0
            queue = deque([source])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if row[w] < 0:
                        row[w] = row[u] + 1
                        queue.append(w)
        matrix.setflags(write=False)
        return matrix

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled densely; returns it with the old ids in order."""
        old = sorted(set(vertices))
        index = {v: i for i, v in enumerate(old)}
        edges = [(index[u], index[w]) for u in old for w in self.adjacency[u] if w in index and u < w]
        return Graph.from_edges(len(old), edges), old


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg


def multi_source_bfs(g: Graph, sources: Iterable[int], blocked: Iterable[int] = (),
                     cutoff: int | None = None) -> dict[int, int]:
    """Distances from the nearest source, never entering blocked vertices."""
    blocked = set(blocked)
    dist = {}
    queue = deque()
    for s in sources:
        if s not in blocked and s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        if cutoff is not None and dist[u] >= cutoff:
            continue
        for w in g.adjacency[u]:
            if w not in dist and w not in blocked:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distance(g: Graph, u: Iterable[int], v: Iterable[int]):
    """Shortest-path distance between two vertex sets, or INFINITE."""
    u, v = set(u), set(v)
    if not u or not v:
        raise PreconditionError('distance needs two nonempty vertex sets')
    g.check_vertices(u | v)
    if u & v:
        return 0
    dist = {s: 0 for s in u}
    queue = deque(sorted(u))
    while queue:
        x = queue.popleft()
        for w in g.adjacency[x]:
            if w not in dist:
                if w in v:
                    return dist[x] + 1
                dist[w] = dist[x] + 1
                queue.append(w)
    return INFINITE


def ball(g: Graph, u: Iterable[int], r: int) -> frozenset[int]:
    """Vertices at distance at most r from u."""
    if r < 0:
        raise PreconditionError(f'negative radius {r}')
    u = list(u)
    g.check_vertices(u)
    return frozenset(multi_source_bfs(g, u, cutoff=r))


def is_connected_set(g: Graph, u: Iterable[int]) -> bool:
    """True iff g[u] is connected; the empty set counts as connected."""
    u = set(u)
    if not u:
        return True
    g.check_vertices(u)
    outside = set(g.vertices()) - u
    start = min(u)
    return len(multi_source_bfs(g, [start], blocked=outside)) == len(u)


def separates(g: Graph, x: Iterable[int], y: Iterable[int], z: Iterable[int]) -> bool:
    """True iff every y-z path meets x."""
    x, y, z = set(x), set(y), set(z)
    if not y or not z:
        raise PreconditionError('separates needs nonempty y and z')
    g.check_vertices(x | y | z)
    y_free, z_free = y - x, z - x
    if not y_free or not z_free:
        return True
    if y_free & z_free:
        return False
    reached = multi_source_bfs(g, y_free, blocked=x)
    return not any(v in reached for v in z_free)


def path_avoiding(g: Graph, s: Iterable[int], t: Iterable[int],
                  forbidden: Iterable[int] = ()) -> Path | None:
    """Shortest s-t path in g - forbidden, or None; deterministic."""
    s, t, forbidden = set(s), set(t), set(forbidden)
    if not s or not t:
        raise PreconditionError('path_avoiding needs nonempty endpoints')
    g.check_vertices(s | t | forbidden)
    parent = {}
    queue = deque()
    for v in sorted(s - forbidden):
        parent[v] = None
        queue.append(v)
    while queue:
        u = queue.popleft()
        if u in t:
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return tuple(reversed(path))
        for w in g.adjacency[u]:
            if w not in parent and w not in forbidden:
                parent[w] = u
                queue.append(w)
    return None


def is_path(g: Graph, path: Path) -> bool:
    """Nonempty, simple and following edges of g."""
    if not path or len(set(path)) != len(path):
        return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


@dataclass(frozen=True)
class Separation:
    side_a: frozenset[int]
    side_b: frozenset[int]

    @property
    def order(self) -> int:
        return len(self.side_a & self.side_b)

    def validate(self, g: Graph) -> tuple[int, int] | None:
        """None if valid, else the offending edge (or (-1, v) for an uncovered vertex)."""
        for v in g.vertices():
            if v not in self.side_a and v not in self.side_b:
                return (-1, v)
        only_a = self.side_a - self.side_b
        only_b = self.side_b - self.side_a
        for u, v in g.edges():
            if (u in only_a and v in only_b) or (u in only_b and v in only_a):
                return (u, v)
        return None


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise PreconditionError('a cycle needs at least 3 vertices')
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def subdivide(g: Graph) -> Graph:
    """Full edge subdivision; original vertices keep their ids."""
    edges = []
    nxt = g.vertex_count
    for u, v in g.edges():
        edges.extend([(u, nxt), (nxt, v)])
        nxt += 1
    return Graph.from_edges(nxt, edges)


def cycle_rank(g: Graph) -> int:
    """|E| - |V| + number of components; a minor never has larger rank."""
    components = nx.number_connected_components(to_networkx(g)) if g.vertex_count else 0
    return g.edge_count() - g.vertex_count + components
