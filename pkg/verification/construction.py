"""The graphs G_{h,d,m} with their landmark registry.

Vertex ids are assigned in construction order: the root, the binary tree in
breadth-first order, then the base path (m = 2) or the copies left to right
(m > 2), then the internal vertices of the spines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from .certificates import Certificate, Verdict
from .exceptions import (
    DegenerateParameterError,
    DegenerateTriangleError,
    LandmarkLookupError,
    ParameterError,
)
from .graph import Graph, ball, multi_source_bfs, separates

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstructionParams:
    h: int
    d: int
    m: int

    def validate(self) -> ConstructionParams:
        if self.h < 0 or self.d < 1 or self.m < 2:
            raise ParameterError(f'need h >= 1, d >= 1, m >= 2; got {self.as_dict()}')
        if self.h == 0:
            raise DegenerateParameterError('h = 0 leaves the only leaf without a spine target')
        return self

    @property
    def segments(self) -> int:
        """Number of copies (or base-path segments) glued side by side."""
        return 2 ** (self.h + 1) - 1

    @property
    def leaf_count(self) -> int:
        return 2 ** self.h

    def as_dict(self) -> dict:
        return {'h': self.h, 'd': self.d, 'm': self.m}


@dataclass(frozen=True)
class Spine:
    leaf_index: int  # j of the owning leaf L_j
    v_index: int  # i of the targeted V_i^{m-1}
    path: tuple[int, ...]  # leaf first, target last

    @property
    def owner(self) -> int:
        return self.path[0]

    @property
    def target(self) -> int:
        return self.path[-1]

    @property
    def internals(self) -> tuple[int, ...]:
        return self.path[1:-1]


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """G_{h,d,m} plus every landmark the checks refer to.

    copies holds H_i^j for 1 <= j <= m-1, where H_i^1 is the i-th segment of
    a base path between consecutive anchors. template and embeddings describe
    how the top-level copies were placed (None and () when m = 2).
    """

    graph: Graph
    params: ConstructionParams
    root: int
    s_set: tuple[int, ...]
    t_set: tuple[int, ...]
    v_sets: dict[tuple[int, int], tuple[int, ...]]
    copies: dict[tuple[int, int], frozenset[int]]
    tree_nodes: dict[tuple[int, int], int]
    leaves: tuple[int, ...]
    spines: tuple[Spine, ...]
    template: LabeledGraph | None
    embeddings: tuple[tuple[int, ...], ...]

    def v_count(self, j: int) -> int:
        """Number of registered V-sets at level j."""
        return sum(1 for (level, _) in self.v_sets if level == j)

    def copy_count(self, j: int) -> int:
        return sum(1 for (level, _) in self.copies if level == j)

    def top_v(self, i: int) -> tuple[int, ...]:
        return self.v_sets[(self.params.m - 1, i)]

    def top_copy(self, i: int) -> frozenset[int]:
        return self.copies[(self.params.m - 1, i)]

    def leaf(self, j: int) -> int:
        return self.leaves[j - 1]

    def tree_children(self, level: int, pos: int) -> tuple[tuple[int, int], ...]:
        if level >= self.params.h:
            return ()
        return ((level + 1, 2 * pos - 1), (level + 1, 2 * pos))

    def subtree(self, level: int, pos: int) -> list[int]:
        width = 1
        nodes = []
        for lv in range(level, self.params.h + 1):
            first = (pos - 1) * width + 1
            nodes.extend(self.tree_nodes[(lv, p)] for p in range(first, first + width))
            width *= 2
        return nodes

    def leaf_range(self, level: int, pos: int) -> tuple[int, int]:
        """(j_min, j_max) of the leaves below tree node (level, pos)."""
        span = 2 ** (self.params.h - level)
        return (pos - 1) * span + 1, pos * span

    def v_set_union(self) -> set[int]:
        return {v for members in self.v_sets.values() for v in members}


@dataclass(frozen=True)
class DeltaView:
    level: int
    pos: int
    apex: int
    vertex_set: frozenset[int]
    s_delta: tuple[int, ...]
    t_delta: tuple[int, ...]
    leaf_range: tuple[int, int]


@dataclass(frozen=True)
class SFamilyMember:
    """One S_i of the extraction pipeline with the leaves it was built from."""

    index: int
    delta: DeltaView
    members: frozenset[int]
    left_leaf: int  # l_i, the leaf just left of the triangle
    inner_leaf: int  # l'_i, the triangle's own leaf inside S(delta)


def _tree(h: int) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int], tuple[int, ...]]:
    edges = []
    nodes = {}
    for level in range(h + 1):
        for pos in range(1, 2 ** level + 1):
            vid = 2 ** level - 1 + pos - 1
            nodes[(level, pos)] = vid
            if level:
                edges.append((nodes[(level - 1, (pos + 1) // 2)], vid))
    leaves = tuple(nodes[(h, p)] for p in range(1, 2 ** h + 1))
    return edges, nodes, leaves


def _spines(params: ConstructionParams, leaves, top_v, next_id: int, edges: list) -> tuple[tuple[Spine, ...], int]:
    """Spines from L_j to every vertex of V_{2j-2} and V_{2j+1} (registered indices only)."""
    spines = []
    last = params.segments + 1
    for j, leaf in enumerate(leaves, start=1):
        for i in (2 * j - 2, 2 * j + 1):
            if not 1 <= i <= last:
                continue
            for target in top_v[i]:
                internals = tuple(range(next_id, next_id + params.d))
                next_id += params.d
                path = (leaf, *internals, target)
                edges.extend(zip(path, path[1:]))
                spines.append(Spine(j, i, path))
    return tuple(spines), next_id


def _build_base(params: ConstructionParams) -> LabeledGraph:
    h, d = params.h, params.d
    n = params.segments
    edges, tree_nodes, leaves = _tree(h)
    offset = len(tree_nodes)
    base_len = (d + 1) * n
    edges.extend((offset + p, offset + p + 1) for p in range(base_len))
    anchors = [offset + (i - 1) * (d + 1) for i in range(1, n + 2)]
    v_sets = {(1, i): (a,) for i, a in enumerate(anchors, start=1)}
    copies = {
        (1, i): frozenset(range(anchors[i - 1], anchors[i] + 1)) for i in range(1, n + 1)
    }
    top_v = {i: v_sets[(1, i)] for i in range(1, n + 2)}
    spines, total = _spines(params, leaves, top_v, offset + base_len + 1, edges)
    return LabeledGraph(
        graph=Graph.from_edges(total, edges),
        params=params,
        root=tree_nodes[(0, 1)],
        s_set=(anchors[0], leaves[0]),
        t_set=(anchors[-1], leaves[-1]),
        v_sets=v_sets,
        copies=copies,
        tree_nodes=tree_nodes,
        leaves=leaves,
        spines=spines,
        template=None,
        embeddings=(),
    )


def _build_glued(params: ConstructionParams) -> LabeledGraph:
    h, d, m = params.h, params.d, params.m
    n = params.segments
    template = _build(h, d, m - 1)
    edges, tree_nodes, leaves = _tree(h)
    root = tree_nodes[(0, 1)]
    next_id = len(tree_nodes)
    tg = template.graph

    embeddings = []
    for c in range(1, n + 1):
        emb = [-1] * tg.vertex_count
        emb[template.root] = root
        if c > 1:
            previous = embeddings[-1]
            for s, t in zip(template.s_set, template.t_set):
                emb[s] = previous[t]
        for v in tg.vertices():
            if emb[v] < 0:
                emb[v] = next_id
                next_id += 1
        edges.extend((emb[u], emb[w]) for u, w in tg.edges())
        embeddings.append(tuple(emb))

    v_sets = {}
    copies = {}
    for j in range(1, m - 1):
        v_cnt = template.v_count(j)
        c_cnt = template.copy_count(j)
        for c, emb in enumerate(embeddings, start=1):
            for k in range(1, v_cnt + 1):
                v_sets[(j, (c - 1) * (v_cnt - 1) + k)] = tuple(emb[v] for v in template.v_sets[(j, k)])
            for k in range(1, c_cnt + 1):
                copies[(j, (c - 1) * c_cnt + k)] = frozenset(emb[v] for v in template.copies[(j, k)])
    v_sets[(m - 1, 1)] = tuple(embeddings[0][s] for s in template.s_set)
    for c, emb in enumerate(embeddings, start=1):
        v_sets[(m - 1, c + 1)] = tuple(emb[t] for t in template.t_set)
        copies[(m - 1, c)] = frozenset(emb)

    top_v = {i: v_sets[(m - 1, i)] for i in range(1, n + 2)}
    spines, total = _spines(params, leaves, top_v, next_id, edges)
    return LabeledGraph(
        graph=Graph.from_edges(total, edges),
        params=params,
        root=root,
        s_set=top_v[1] + (leaves[0],),
        t_set=top_v[n + 1] + (leaves[-1],),
        v_sets=v_sets,
        copies=copies,
        tree_nodes=tree_nodes,
        leaves=leaves,
        spines=spines,
        template=template,
        embeddings=tuple(embeddings),
    )


@lru_cache(maxsize=32)
def _build(h: int, d: int, m: int) -> LabeledGraph:
    params = ConstructionParams(h, d, m)
    lg = _build_base(params) if m == 2 else _build_glued(params)
    logger.debug('built G_{%d,%d,%d} with %d vertices', h, d, m, lg.graph.vertex_count)
    return lg


def build(params: ConstructionParams) -> LabeledGraph:
    """Build G_{h,d,m}; instances are cached and must not be mutated."""
    params.validate()
    lg = _build(params.h, params.d, params.m)
    logger.info('G_{%d,%d,%d}: %d vertices, %d edges', params.h, params.d, params.m,
                lg.graph.vertex_count, lg.graph.edge_count())
    return lg


def count_vertices(params: ConstructionParams) -> int:
    """Closed form for m = 2, recurrence for m > 2."""
    params.validate()
    h, d = params.h, params.d
    n = params.segments
    tree = 2 ** (h + 1) - 1
    bundles = 2 ** (h + 1) - 2
    count = (d + 1) * n + 1 + tree + d * bundles
    for m in range(3, params.m + 1):
        count = n * count - (n - 1) * (m - 1) - n + tree + d * (m - 1) * bundles
    return count


def vertex_count_floor_bits(params: ConstructionParams) -> int:
    """b with count_vertices(params) >= 2**(b - 1), from h, d and m alone.

    The m = 2 count is at least (d + 2) * 2**h and each further level multiplies
    it by at least 2**(h + 1) - 1 >= 2**h.
    """
    params.validate()
    return (params.m - 1) * params.h + (params.d + 2).bit_length()


def bounded_vertex_count(params: ConstructionParams, cap: int) -> tuple[int | None, int]:
    """(count, bit length) when the count is at most cap, else (None, a bit-length lower bound)."""
    floor_bits = vertex_count_floor_bits(params)
    if floor_bits - 1 >= cap.bit_length():
        return None, floor_bits
    h, d = params.h, params.d
    n = params.segments
    count = (d + 1) * n + 1 + n + d * (n - 1)
    for m in range(3, params.m + 1):
        if count > cap:
            break
        count = n * count + (n - 1) * (m - 1) * (d - 1)
    if count > cap:
        return None, max(floor_bits, count.bit_length())
    return count, count.bit_length()


LANDMARK_KINDS = ('root', 'S', 'T', 'V', 'copy', 'tree', 'leaf', 'spine')


def landmark(lg: LabeledGraph, kind: str, *index: int):
    """Registry accessor: root | S | T | V(j,i) | copy(j,i) | tree(level,pos) | leaf(j) | spine(k)."""
    try:
        if kind == 'root' and not index:
            return lg.root
        if kind == 'S' and not index:
            return lg.s_set
        if kind == 'T' and not index:
            return lg.t_set
        if kind == 'V' and len(index) == 2:
            return frozenset(lg.v_sets[index])
        if kind == 'copy' and len(index) == 2:
            return lg.copies[index]
        if kind == 'tree' and len(index) == 2:
            return lg.tree_nodes[index]
        if kind == 'leaf' and len(index) == 1:
            if index[0] < 1:
                raise IndexError(index[0])
            return lg.leaves[index[0] - 1]
        if kind == 'spine' and len(index) == 1:
            if index[0] < 0:
                raise IndexError(index[0])
            return lg.spines[index[0]]
    except (KeyError, IndexError) as exc:
        raise LandmarkLookupError(f'no {kind} landmark at {index}') from exc
    raise LandmarkLookupError(f'unknown landmark query {kind}{index}')


def parse_landmark_query(query: str) -> tuple[str, tuple[int, ...]]:
    """'V:2,2' -> ('V', (2, 2)); 'root' -> ('root', ())."""
    kind, _, rest = query.partition(':')
    if kind not in LANDMARK_KINDS:
        raise LandmarkLookupError(f'unknown landmark kind {kind!r}')
    try:
        index = tuple(int(part) for part in rest.split(',')) if rest else ()
    except ValueError as exc:
        raise LandmarkLookupError(f'bad landmark index {rest!r}') from exc
    return kind, index


def delta_boundary(lg: LabeledGraph, level: int, pos: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """S(delta(x)) and T(delta(x)); also defined for leaves, where it bounds the copy below."""
    if not (0 <= level <= lg.params.h and 1 <= pos <= 2 ** level):
        raise LandmarkLookupError(f'no tree node at level {level}, position {pos}')
    j_min, j_max = lg.leaf_range(level, pos)
    return (lg.top_v(2 * j_min - 1) + (lg.leaf(j_min),),
            lg.top_v(2 * j_max) + (lg.leaf(j_max),))


def delta(lg: LabeledGraph, level: int, pos: int) -> DeltaView:
    """The triangle below tree node (level, pos)."""
    if level == lg.params.h:
        raise DegenerateTriangleError(f'level {level} is the leaf level; triangles need level < h')
    s_delta, t_delta = delta_boundary(lg, level, pos)
    j_min, j_max = lg.leaf_range(level, pos)
    m = lg.params.m
    members = set(lg.subtree(level, pos))
    for i in range(2 * j_min - 1, 2 * j_max):
        members |= lg.copies[(m - 1, i)]
    for spine in lg.spines:
        if j_min <= spine.leaf_index <= j_max and 2 * j_min - 1 <= spine.v_index <= 2 * j_max:
            members.update(spine.path)
    return DeltaView(level, pos, lg.tree_nodes[(level, pos)], frozenset(members),
                     s_delta, t_delta, (j_min, j_max))


def s_family_members(lg: LabeledGraph, q: int, count: int) -> list[SFamilyMember]:
    if q > lg.params.h - 1:
        raise DegenerateTriangleError(f'level q={q} must be at most h-1={lg.params.h - 1}')
    if 2 ** q < count + 1:
        raise ParameterError(f'level {q} has {2 ** q} nodes, fewer than N+1={count + 1}')
    family = []
    for i in range(1, count + 1):
        view = delta(lg, q, i + 1)
        j_min = view.leaf_range[0]
        left = lg.leaf(j_min - 1)
        family.append(SFamilyMember(i, view, frozenset(view.s_delta) | {left}, left, lg.leaf(j_min)))
    return family


def s_family(lg: LabeledGraph, q: int, count: int) -> list[frozenset[int]]:
    """S_1..S_N built from the level-q triangles x_1..x_N."""
    return [member.members for member in s_family_members(lg, q, count)]


def verify_landmark_distances(lg: LabeledGraph) -> Certificate:
    """Vertices of one V-set are pairwise at least 2d+2 apart."""
    g = lg.graph
    threshold = 2 * lg.params.d + 2
    owners = {}
    for key, members in lg.v_sets.items():
        for v in members:
            owners.setdefault(v, set()).add(key)
    union = sorted(owners)
    within = None
    within_pair = None
    cross = None
    cross_pair = None
    for u in union:
        dist = multi_source_bfs(g, [u])
        for v in union:
            if v <= u:
                continue
            dv = dist.get(v)
            if dv is None:
                continue
            if owners[u] & owners[v]:
                if within is None or dv < within:
                    within, within_pair = dv, (u, v)
            elif cross is None or dv < cross:
                cross, cross_pair = dv, (u, v)
    ok = within is None or within >= threshold
    notes = []
    if within is None:
        notes.append('every V-set is a singleton; the within-set check is vacuous')
    logger.info('landmark distances for %s: within-set minimum %s, cross-set minimum %s',
                lg.params.as_dict(), within, cross)
    return Certificate(
        claim='obs32',
        params=lg.params.as_dict(),
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        witness=None if ok else {'pair': within_pair, 'distance': within},
        stats={
            'threshold': threshold,
            'within_minimum': within,
            'within_argmin': within_pair,
            'cross_minimum': cross,
            'cross_argmin': cross_pair,
            'v_sets': len(lg.v_sets),
        },
        notes=notes,
    )


def delta_separator(lg: LabeledGraph, level: int, pos: int) -> frozenset[int]:
    s_delta, _ = delta_boundary(lg, level, pos)
    return frozenset(s_delta) | ball(lg.graph, [lg.root], level)


def verify_delta_separation(lg: LabeledGraph, level: int) -> Certificate:
    """S(delta(x)) together with ball(R, level) separates S(G) from T(G) for every x at the level."""
    if not 0 <= level <= lg.params.h - 1:
        raise DegenerateTriangleError(f'level must lie in [0, {lg.params.h - 1}]')
    failures = []
    for pos in range(1, 2 ** level + 1):
        separator = delta_separator(lg, level, pos)
        if not separates(lg.graph, separator, lg.s_set, lg.t_set):
            failures.append(pos)
    logger.info('triangle separation at level %d: %d of %d nodes fail', level, len(failures), 2 ** level)
    return Certificate(
        claim='obs33',
        params={**lg.params.as_dict(), 'level': level},
        verdict=Verdict.FAIL if failures else Verdict.PASS,
        witness={'positions': failures} if failures else None,
        stats={'nodes_checked': 2 ** level},
    )
