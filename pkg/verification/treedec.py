"""Tree-decompositions: validation, the two constructions for G_{h,d,m}, and edge orientation."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .certificates import Certificate, Verdict
from .construction import ConstructionParams, LabeledGraph, build, delta_boundary
from .exceptions import PreconditionError, StructuralError, ThresholdError
from .graph import Graph, Separation, multi_source_bfs

logger = logging.getLogger(__name__)

Bag = frozenset[int]


@dataclass(frozen=True)
class TreeDecomposition:
    tree: Graph
    bags: tuple[Bag, ...]
    labels: tuple[str, ...]
    root: int = 0

    @classmethod
    def from_bags(cls, tree_edges, bags, labels=None) -> TreeDecomposition:
        bags = tuple(frozenset(b) for b in bags)
        labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(len(bags)))
        return cls(Graph.from_edges(len(bags), tree_edges), bags, labels)

    def node_count(self) -> int:
        return len(self.bags)

    def check_tree(self) -> None:
        n = self.tree.vertex_count
        if n == 0 or n != len(self.bags) or n != len(self.labels):
            raise StructuralError('a decomposition needs one bag and one label per tree node')
        if self.tree.edge_count() != n - 1 or len(multi_source_bfs(self.tree, [0])) != n:
            raise StructuralError('the decomposition tree is not a tree')

    def occurrences(self) -> dict[int, list[int]]:
        occ = {}
        for node, bag in enumerate(self.bags):
            for v in bag:
                occ.setdefault(v, []).append(node)
        return occ


def validate(g: Graph, td: TreeDecomposition) -> Certificate:
    """Check (T1) vertex and edge coverage, then (T2) connectivity of every vertex's nodes."""
    td.check_tree()
    for bag in td.bags:
        g.check_vertices(bag)
    occ = td.occurrences()
    params = {'vertices': g.vertex_count, 'nodes': td.node_count()}

    def failure(condition, **witness):
        logger.info('decomposition fails %s at %s', condition, witness)
        return Certificate(claim='td', params=params, verdict=Verdict.FAIL,
                           witness={'condition': condition, **witness})

    for v in g.vertices():
        if v not in occ:
            return failure('T1', vertex=v)
    for u, v in g.edges():
        if not set(occ[u]).intersection(occ[v]):
            return failure('T1', edge=(u, v))
    for v in g.vertices():
        nodes = occ[v]
        outside = set(td.tree.vertices()) - set(nodes)
        if len(multi_source_bfs(td.tree, [nodes[0]], blocked=outside)) != len(nodes):
            return failure('T2', vertex=v, nodes=nodes)
    width, _ = width_and_adhesions(td)
    return Certificate(claim='td', params=params, verdict=Verdict.PASS, stats={'width': width})


def width_and_adhesions(td: TreeDecomposition) -> tuple[int, dict[tuple[int, int], Bag]]:
    """Width is the largest bag size minus one."""
    width = max(len(b) for b in td.bags) - 1
    return width, {(x, y): td.bags[x] & td.bags[y] for x, y in td.tree.edges()}


def _component(tree: Graph, start: int, cut: tuple[int, int]) -> set[int]:
    x, y = cut
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in tree.neighbors(u):
            if {u, w} == {x, y} or w in seen:
                continue
            seen.add(w)
            queue.append(w)
    return seen


def induced_separation(g: Graph, td: TreeDecomposition, edge: tuple[int, int]) -> Separation:
    x, y = edge
    if not td.tree.has_edge(x, y):
        raise PreconditionError(f'{edge} is not an edge of the decomposition tree')
    side_x = _component(td.tree, x, edge)
    a = frozenset().union(*(td.bags[n] for n in side_x))
    b = frozenset().union(*(td.bags[n] for n in td.tree.vertices() if n not in side_x))
    return Separation(a, b)


class _Assembler:
    def __init__(self):
        self.bags = []
        self.labels = []
        self.edges = []

    def add(self, bag, label, parent=None) -> int:
        node = len(self.bags)
        self.bags.append(frozenset(bag))
        self.labels.append(label)
        if parent is not None:
            self.edges.append((parent, node))
        return node

    def graft(self, sub: TreeDecomposition, mapping, prefix: str, parent: int) -> None:
        offset = len(self.bags)
        for bag, label in zip(sub.bags, sub.labels):
            self.bags.append(frozenset(mapping[v] for v in bag))
            self.labels.append(f'{prefix}/{label}')
        self.edges.extend((offset + x, offset + y) for x, y in sub.tree.edges())
        self.edges.append((parent, offset + sub.root))

    def result(self) -> TreeDecomposition:
        return TreeDecomposition.from_bags(self.edges, self.bags, self.labels)


def copy_below(lg: LabeledGraph, level: int, pos: int) -> int:
    """Index of the copy hanging under a tree node: 2*mid for internal nodes, 2j-1 under leaf L_j."""
    if level == lg.params.h:
        return 2 * pos - 1
    mid = lg.leaf_range(level + 1, 2 * pos - 1)[1]
    return 2 * mid


def _skeleton(lg: LabeledGraph, asm: _Assembler) -> list[tuple[int, int]]:
    """Add the B(G) nodes (ids equal to tree vertex ids) and return their (level, pos) keys."""
    h = lg.params.h
    keys = sorted(lg.tree_nodes, key=lg.tree_nodes.get)
    for level, pos in keys:
        if level < h:
            bag = {lg.root, lg.tree_nodes[(level, pos)]}
            for child in lg.tree_children(level, pos):
                bag.add(lg.tree_nodes[child])
                s, t = delta_boundary(lg, *child)
                bag.update(s, t)
        else:
            s, t = delta_boundary(lg, level, pos)
            bag = {lg.root, *s, *t}
        parent = None
        if level:
            parent = lg.tree_nodes[(level - 1, (pos + 1) // 2)]
        asm.add(bag, f'B:{level},{pos}', parent)
    return keys


def _spine_anchor(lg: LabeledGraph, leaf_index: int, v_index: int) -> int:
    """B(G) node owning the copy whose boundary the spine targets: LCA of the two adjacent leaves."""
    left = leaf_index - 1 if v_index < 2 * leaf_index else leaf_index
    a, b = lg.leaf(left), lg.leaf(left + 1)
    while a != b:
        a, b = (a - 1) // 2, (b - 1) // 2
    return a


def _attach_spines(lg: LabeledGraph, asm: _Assembler) -> None:
    for k, spine in enumerate(lg.spines):
        asm.add(spine.path, f'spine:{k}', _spine_anchor(lg, spine.leaf_index, spine.v_index))


def build_flat(lg: LabeledGraph) -> TreeDecomposition:
    """B(G) nodes with Eq (1) bags, one node per copy and one per spine."""
    asm = _Assembler()
    keys = _skeleton(lg, asm)
    m = lg.params.m
    for level, pos in keys:
        i = copy_below(lg, level, pos)
        asm.add(lg.copies[(m - 1, i)] | {lg.root}, f'H:{i}', lg.tree_nodes[(level, pos)])
    _attach_spines(lg, asm)
    return asm.result()


@lru_cache(maxsize=16)
def _recursive_for(h: int, d: int, m: int) -> TreeDecomposition:
    return build_recursive(build(ConstructionParams(h, d, m)))


def build_recursive(lg: LabeledGraph) -> TreeDecomposition:
    """Like build_flat, but each copy node is replaced by the decomposition of that copy."""
    if lg.params.m == 2:
        return build_flat(lg)
    sub = _recursive_for(lg.params.h, lg.params.d, lg.params.m - 1)
    asm = _Assembler()
    keys = _skeleton(lg, asm)
    for level, pos in keys:
        i = copy_below(lg, level, pos)
        asm.graft(sub, lg.embeddings[i - 1], f'H:{i}', lg.tree_nodes[(level, pos)])
    _attach_spines(lg, asm)
    td = asm.result()
    logger.debug('recursive decomposition of %s: %d nodes', lg.params.as_dict(), td.node_count())
    return td


def adhesion_mismatches(lg: LabeledGraph, td: TreeDecomposition) -> list[tuple[int, int]]:
    """B(G) edges whose adhesion differs from {R, y} with S(delta(y)) and T(delta(y))."""
    _, adhesions = width_and_adhesions(td)
    mismatches = []
    for (level, pos), y in lg.tree_nodes.items():
        if not level:
            continue
        x = lg.tree_nodes[(level - 1, (pos + 1) // 2)]
        s, t = delta_boundary(lg, level, pos)
        expected = frozenset({lg.root, y, *s, *t})
        if adhesions[(min(x, y), max(x, y))] != expected:
            mismatches.append((x, y))
    return mismatches


def bag_profile(lg: LabeledGraph, td: TreeDecomposition) -> dict[int, tuple[int, int]]:
    """For each B(G)-type bag: (maximal registered V-sets inside it, vertices left over)."""
    by_vertex = {}
    for key, members in lg.v_sets.items():
        for v in members:
            by_vertex.setdefault(v, []).append(key)
    profile = {}
    for node, (bag, label) in enumerate(zip(td.bags, td.labels)):
        if not label.rsplit('/', 1)[-1].startswith('B:'):
            continue
        keys = {k for v in bag for k in by_vertex.get(v, ())}
        inside = [frozenset(lg.v_sets[k]) for k in sorted(keys) if bag.issuperset(lg.v_sets[k])]
        maximal = [s for s in inside if not any(s < other for other in inside)]
        covered = frozenset().union(*maximal)
        profile[node] = (len(maximal), len(bag - covered))
    return profile


@dataclass(frozen=True)
class Sink:
    node: int
    bag: Bag
    hits: int  # |w ∩ bag|
    degree: int
    bound: int  # |w| - degree * (|w| - t), a lower bound for hits


@dataclass(frozen=True)
class BalancedEdge:
    edge: tuple[int, int]
    adhesion: Bag
    sides: tuple[int, int]  # elements of w on each side


TrapOutcome = Sink | BalancedEdge


def trap(td: TreeDecomposition, w, t: int, balance: int | None = None) -> TrapOutcome:
    """Orient every tree edge toward the side holding at least t elements of w.

    If some edge cannot be oriented that way, the first edge whose sides both
    hold at least `balance` elements (default |w| - t + 1) is returned instead.
    """
    td.check_tree()
    w = frozenset(w)
    size = len(w)
    if 2 * t <= size:
        raise ThresholdError(f'threshold {t} must exceed |w|/2 = {size / 2}')
    if balance is None:
        balance = size - t + 1

    # Euler intervals of the tree rooted at td.root
    order, parent = [], {td.root: None}
    stack = [td.root]
    while stack:
        u = stack.pop()
        order.append(u)
        for nb in reversed(td.tree.neighbors(u)):
            if nb not in parent:
                parent[nb] = u
                stack.append(nb)
    tin = {u: i for i, u in enumerate(order)}
    size_of = {u: 1 for u in order}
    for u in reversed(order):
        if parent[u] is not None:
            size_of[parent[u]] += size_of[u]
    occ = td.occurrences()
    w_occ = {v: [tin[n] for n in occ.get(v, [])] for v in w}

    def side_counts(x, y):
        child = y if parent.get(y) == x else x
        lo, hi = tin[child], tin[child] + size_of[child]
        below = sum(1 for v in w if any(lo <= i < hi for i in w_occ[v]))
        above = sum(1 for v in w if any(not lo <= i < hi for i in w_occ[v]))
        return (below, above) if child == x else (above, below)

    orientation = {}
    ambiguous = []
    for x, y in td.tree.edges():
        cx, cy = side_counts(x, y)
        if (cx >= t) == (cy >= t):
            ambiguous.append(((x, y), (cx, cy)))
        else:
            orientation[(x, y)] = x if cx >= t else y

    if ambiguous:
        for edge, sides in ambiguous:
            if min(sides) >= balance:
                return BalancedEdge(edge, td.bags[edge[0]] & td.bags[edge[1]], sides)
        raise ThresholdError(f'edges cannot be oriented at {t} and none is balanced at {balance}')

    for node in td.tree.vertices():
        incident = [(min(node, nb), max(node, nb)) for nb in td.tree.neighbors(node)]
        if all(orientation[e] == node for e in incident):
            degree = len(incident)
            return Sink(node, td.bags[node], len(w & td.bags[node]), degree, size - degree * (size - t))
    raise StructuralError('an oriented tree always has a sink')
