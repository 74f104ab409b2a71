"""K-fat minor models, model search, K-far path systems and K-fat n-path-connectivity.

A branch path E_e for e = xy is stored as a full path whose first vertex lies
in U_x and whose last vertex lies in U_y; fatness distances are taken between
the full vertex sets of branch sets and branch paths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, islice, permutations

from .certificates import Certificate, Verdict
from .exceptions import PreconditionError
from .graph import (
    Graph,
    ball,
    cycle_rank,
    distance,
    is_connected_set,
    is_path,
    multi_source_bfs,
)
from .menger import max_disjoint_paths
from .search import NodeCounter, SearchBudget, SearchOutcome, run_search

logger = logging.getLogger(__name__)

PathT = tuple[int, ...]

GREEDY_PERMUTATION_CAP = 5040  # terminal assignments tried before full enumeration


@dataclass(frozen=True)
class FatModel:
    pattern: Graph
    branch_sets: tuple[frozenset[int], ...]
    branch_paths: dict[tuple[int, int], PathT]
    fatness: int

    def oriented_path(self, x: int, y: int) -> PathT | None:
        """Branch path of xy read from U_x to U_y."""
        path = self.branch_paths.get((min(x, y), max(x, y)))
        if path is None:
            return None
        if x > y:
            return tuple(reversed(path))
        return path

    def members(self) -> list[tuple[str, tuple[int, ...], frozenset[int]]]:
        found = [('U', (x,), s) for x, s in enumerate(self.branch_sets)]
        found.extend(('E', e, frozenset(p)) for e, p in sorted(self.branch_paths.items()))
        return found


def _model_failure(model: FatModel, reason: str, **witness) -> Certificate:
    logger.info('model rejected: %s %s', reason, witness)
    return Certificate(claim='fat-model', params={'K': model.fatness}, verdict=Verdict.FAIL,
                       witness={'reason': reason, **witness})


def validate_model(g: Graph, model: FatModel) -> Certificate:
    """Check the model invariants and K-fatness in g."""
    pattern, sets, K = model.pattern, model.branch_sets, model.fatness
    if len(sets) != pattern.vertex_count:
        return _model_failure(model, 'branch-set-count', expected=pattern.vertex_count, actual=len(sets))
    for x, s in enumerate(sets):
        g.check_vertices(s)
        if not s:
            return _model_failure(model, 'empty-branch-set', vertex=x)
        if not is_connected_set(g, s):
            return _model_failure(model, 'disconnected-branch-set', vertex=x)
    for x, y in combinations(range(len(sets)), 2):
        if sets[x] & sets[y]:
            return _model_failure(model, 'overlapping-branch-sets', pair=(x, y))

    if set(model.branch_paths) != set(pattern.edges()):
        return _model_failure(model, 'branch-path-keys', expected=pattern.edges(),
                              actual=sorted(model.branch_paths))
    owner = {v: x for x, s in enumerate(sets) for v in s}
    used = {}
    for (x, y), path in sorted(model.branch_paths.items()):
        g.check_vertices(path)
        if not is_path(g, path):
            return _model_failure(model, 'not-a-path', edge=(x, y))
        ends = (owner.get(path[0]), owner.get(path[-1]))
        if ends not in ((x, y), (y, x)):
            return _model_failure(model, 'path-endpoints', edge=(x, y))
        for v in path[1:-1]:
            if v in owner:
                return _model_failure(model, 'path-meets-branch-set', edge=(x, y), vertex=v)
            if v in used:
                return _model_failure(model, 'paths-share-internal-vertex', edge=(x, y),
                                      other=used[v], vertex=v)
        for v in path[1:-1]:
            used[v] = (x, y)

    if K > 0:
        members = model.members()
        for (kind_a, key_a, set_a), (kind_b, key_b, set_b) in combinations(members, 2):
            if kind_a == 'U' and kind_b == 'E' and key_a[0] in key_b:
                continue
            reach = ball(g, set_a, K - 1)
            if reach & set_b:
                dist = distance(g, set_a, set_b)
                return _model_failure(model, 'too-close', pair=[[kind_a, key_a], [kind_b, key_b]],
                                      distance=dist)
    return Certificate(claim='fat-model', params={'K': K}, verdict=Verdict.PASS,
                       stats={'pattern_vertices': pattern.vertex_count,
                              'model_vertices': sum(len(s) for s in sets)})


def grid(rows: int, cols: int) -> Graph:
    """rows x cols grid; vertex (r, c) has id r*cols + c (0-based)."""
    if rows < 1 or cols < 1:
        raise PreconditionError('a grid needs at least one row and one column')
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def grid_vertex(cols: int, r: int, c: int) -> int:
    return r * cols + c


# Connected set enumeration (each connected subset of `allowed` exactly once)

def connected_sets(g: Graph, allowed: set[int], counter: NodeCounter):
    for v in sorted(allowed):
        ext = sorted(w for w in g.neighbors(v) if w in allowed and w > v)
        yield from _extend(g, allowed, counter, frozenset([v]), ext, v, set(g.neighbors(v)) | {v})


def _extend(g, allowed, counter, current, ext, root, closed):
    counter.tick()
    yield current
    ext = list(ext)
    while ext:
        w = ext.pop(0)
        fresh = [u for u in g.neighbors(w) if u in allowed and u > root and u not in closed]
        new_closed = closed | set(g.neighbors(w)) | {w}
        yield from _extend(g, allowed, counter, current | {w}, sorted(set(ext) | set(fresh)),
                           root, new_closed)


# Model search

def _pattern_order(pattern: Graph) -> list[int]:
    order = []
    seen = set()
    for start in pattern.vertices():
        if start in seen:
            continue
        dist = multi_source_bfs(pattern, [start])
        for v in sorted(dist, key=lambda u: (dist[u], u)):
            seen.add(v)
            order.append(v)
    return order


def _terminals(g: Graph, k: int) -> list[int]:
    """Farthest-point selection from vertex 0; ties by larger distance sum, then id."""
    chosen = [0]
    dists = [multi_source_bfs(g, [0])]
    while len(chosen) < k:
        best = None
        for v in g.vertices():
            if v in chosen:
                continue
            ds = [d.get(v) for d in dists]
            if any(x is None for x in ds):
                continue
            key = (min(ds), sum(ds), -v)
            if best is None or key > best[0]:
                best = (key, v)
        if best is None:
            break
        chosen.append(best[1])
        dists.append(multi_source_bfs(g, [best[1]]))
    return chosen


def _bfs_path(g: Graph, start: int, goal: int, blocked: set[int]) -> PathT | None:
    parent = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w in parent or w in blocked:
                    continue
                parent[w] = u
                if w == goal:
                    path = [w]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                nxt.append(w)
        frontier = nxt
    return None


def _greedy(g: Graph, pattern: Graph, K: int, counter: NodeCounter) -> FatModel | None:
    """Route shortest paths between spread-out terminals and split them into arms."""
    k = pattern.vertex_count
    terminals = _terminals(g, k)
    if len(terminals) < k:
        return None
    arm = (K + 1) // 2
    dist = {t: multi_source_bfs(g, [t]) for t in terminals}
    for perm in islice(permutations(terminals), GREEDY_PERMUTATION_CAP):
        counter.tick()
        where = dict(enumerate(perm))
        edges = sorted(pattern.edges(), key=lambda e: (dist[where[e[0]]].get(where[e[1]], g.vertex_count), e))
        blocked = set(perm)
        routes = {}
        for x, y in edges:
            path = _bfs_path(g, where[x], where[y], blocked - {where[y]})
            if path is None or len(path) < 2 * arm + 2:
                break
            routes[(x, y)] = path
            blocked.update(path[1:-1])
        else:
            sets = [{where[x]} for x in range(k)]
            paths = {}
            for (x, y), path in routes.items():
                sets[x].update(path[1:arm + 1])
                sets[y].update(path[len(path) - 1 - arm:-1])
                paths[(x, y)] = path[arm:len(path) - arm]
            model = FatModel(pattern, tuple(frozenset(s) for s in sets), paths, K)
            if validate_model(g, model).verdict == Verdict.PASS:
                return model
    return None


class _Exhaustive:
    """Complete enumeration of branch sets (connected, canonical order) and branch paths."""

    def __init__(self, g: Graph, pattern: Graph, K: int, counter: NodeCounter):
        self.g, self.pattern, self.K, self.counter = g, pattern, K, counter
        self.order = _pattern_order(pattern)
        self.edges = pattern.edges()

    def run(self) -> FatModel | None:
        return self._assign(0, {})

    def _assign(self, index, sets):
        if index == len(self.order):
            return self._route(sets)
        x = self.order[index]
        used = set().union(*sets.values()) if sets else set()
        if self.K > 0 and sets:
            blocked = used | ball(self.g, used, self.K - 1)
        else:
            blocked = used
        allowed = set(self.g.vertices()) - blocked
        degree = self.pattern.degree(x)
        for candidate in connected_sets(self.g, allowed, self.counter):
            if self.K > 0 and len(candidate) < degree:
                continue
            if self.K == 0 and not self._adjacent_to_assigned(x, candidate, sets):
                continue
            sets[x] = candidate
            found = self._assign(index + 1, sets)
            if found is not None:
                return found
            del sets[x]
        return None

    def _adjacent_to_assigned(self, x, candidate, sets):
        for y in self.pattern.neighbors(x):
            if y in sets and not any(w in sets[y] for v in candidate for w in self.g.neighbors(v)):
                return False
        return True

    def _model(self, sets, paths):
        return FatModel(self.pattern, tuple(sets[x] for x in self.pattern.vertices()), dict(paths), self.K)

    def _route(self, sets):
        if self.K == 0:
            paths = {}
            for x, y in self.edges:
                paths[(x, y)] = min((u, w) for u in sets[x] for w in self.g.neighbors(u) if w in sets[y])
            return self._model(sets, paths)
        owner = {v: x for x, s in sets.items() for v in s}
        near = {x: ball(self.g, s, self.K - 1) for x, s in sets.items()}
        return self._route_from(0, sets, owner, near, {}, set())

    def _route_from(self, index, sets, owner, near, paths, path_zone):
        if index == len(self.edges):
            return self._model(sets, paths)
        x, y = self.edges[index]
        forbidden = set(path_zone)
        for z in sets:
            if z not in (x, y):
                forbidden |= near[z]
        starts = sorted(v for v in sets[x] if v not in forbidden)
        goals = {v for v in sets[y] if v not in forbidden}
        last = index == len(self.edges) - 1
        for path in self._paths(starts, goals, owner, forbidden, first_only=last):
            paths[(x, y)] = path
            zone = path_zone | ball(self.g, path, self.K - 1)
            found = self._route_from(index + 1, sets, owner, near, paths, zone)
            if found is not None:
                return found
            del paths[(x, y)]
        return None

    def _paths(self, starts, goals, owner, forbidden, first_only):
        """All simple paths start..goal with internals outside branch sets and forbidden."""
        if first_only:
            path = self._shortest(starts, goals, owner, forbidden)
            if path is not None:
                yield path
            return
        for s in starts:
            stack = [(s, (s,))]
            while stack:
                u, path = stack.pop()
                self.counter.tick()
                for w in reversed(self.g.neighbors(u)):
                    if w in path:
                        continue
                    if w in goals:
                        yield path + (w,)
                    elif w not in owner and w not in forbidden:
                        stack.append((w, path + (w,)))

    def _shortest(self, starts, goals, owner, forbidden):
        parent = {s: None for s in starts}
        frontier = list(starts)
        while frontier:
            nxt = []
            for u in frontier:
                self.counter.tick()
                for w in self.g.neighbors(u):
                    if w in parent:
                        continue
                    if w in goals:
                        path = [w, u]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return tuple(reversed(path))
                    if w not in owner and w not in forbidden:
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
        return None


def find_fat_model(g: Graph, pattern: Graph, K: int, budget: SearchBudget) -> SearchOutcome:
    """Search for a K-fat model of pattern in g: cycle-rank prune, greedy routing, then full enumeration."""
    if pattern.vertex_count == 0:
        raise PreconditionError('pattern must be nonempty')
    if K < 0:
        raise PreconditionError('fatness must be nonnegative')

    def body(counter):
        if pattern.vertex_count > g.vertex_count or cycle_rank(pattern) > cycle_rank(g):
            return Verdict.EXHAUSTED_NONE, None, {'phase': 'prune'}
        counter.tick()
        model = _greedy(g, pattern, K, counter)
        if model is not None:
            return Verdict.FOUND, model, {'phase': 'greedy'}
        model = _Exhaustive(g, pattern, K, counter).run()
        if model is not None:
            return Verdict.FOUND, model, {'phase': 'exhaustive'}
        return Verdict.EXHAUSTED_NONE, None, {'phase': 'exhaustive'}

    outcome = run_search(f'fat-model K={K}', budget, body)
    if outcome.found and validate_model(g, outcome.witness).verdict != Verdict.PASS:
        raise AssertionError('search returned a model that does not validate')
    return outcome


# Far path systems

def _ab_path_search(g, a, b, blocked, counter, first_only, min_start=None):
    """A-B paths (only the first vertex in a, only the last in b) avoiding blocked."""
    ab = a | b
    starts = sorted(v for v in a if v not in blocked and (min_start is None or v > min_start))
    if first_only:
        for s in starts:
            if s in b:
                yield (s,)
                return
        parent = {s: None for s in starts}
        frontier = list(starts)
        while frontier:
            nxt = []
            for u in frontier:
                counter.tick()
                for w in g.neighbors(u):
                    if w in parent or w in blocked:
                        continue
                    if w in b and w not in a:
                        path = [w, u]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        yield tuple(reversed(path))
                        return
                    if w not in ab:
                        parent[w] = u
                        nxt.append(w)
            frontier = nxt
        return
    to_b = multi_source_bfs(g, [v for v in b if v not in blocked], blocked=blocked)
    for s in starts:
        if s in b:
            yield (s,)
            continue
        stack = [(s, (s,))]
        while stack:
            u, path = stack.pop()
            counter.tick()
            steps = [w for w in g.neighbors(u) if w not in path and w not in blocked and w in to_b]
            steps.sort(key=lambda w: (to_b[w], w), reverse=True)
            for w in steps:
                if w in b and w not in a:
                    yield path + (w,)
                elif w not in ab:
                    stack.append((w, path + (w,)))


def _far_paths(g: Graph, a: frozenset, b: frozenset, count: int, K: int, counter: NodeCounter):
    if count == 0:
        return []
    if K == 0:
        # Paths may share vertices but must be distinct.
        paths = list(islice(_ab_path_search(g, a, b, frozenset(), counter, False), count))
        return paths if len(paths) == count else None
    if len(a) < count or len(b) < count:
        return None
    if K == 1:
        counter.tick()
        found = max_disjoint_paths(g, a, b, frozenset())
        if len(found) < count:
            return None
        return [_trim_ab(p, a, b) for p in found[:count]]

    def extend(chosen, zone, min_start):
        last = len(chosen) == count - 1
        for path in _ab_path_search(g, a, b, zone, counter, last, min_start):
            if last:
                return chosen + [path]
            result = extend(chosen + [path], zone | ball(g, path, K - 1), path[0])
            if result is not None:
                return result
        return None

    return extend([], frozenset(), None)


def _trim_ab(path, a, b):
    start = max(i for i, v in enumerate(path) if v in a)
    end = min(i for i, v in enumerate(path) if v in b and i >= start)
    return tuple(path[start:end + 1])


def find_far_path_system(g: Graph, a, b, count: int, K: int, budget: SearchBudget) -> SearchOutcome:
    """Search for `count` A-B paths pairwise at least K apart; the last path is decided by reachability."""
    a, b = frozenset(a), frozenset(b)
    g.check_vertices(a | b)

    def body(counter):
        paths = _far_paths(g, a, b, count, K, counter)
        if paths is None:
            return Verdict.EXHAUSTED_NONE, None, {}
        return Verdict.FOUND, paths, {}

    outcome = run_search(f'path-system l={count} K={K}', budget, body)
    if outcome.found and not path_system_is_valid(g, a, b, outcome.witness, K):
        raise AssertionError('search returned an invalid path system')
    return outcome


def path_system_is_valid(g: Graph, a, b, paths, K: int) -> bool:
    a, b = set(a), set(b)
    if len({tuple(path) for path in paths}) < len(paths):
        return False
    for path in paths:
        if not is_path(g, tuple(path)) or path[0] not in a or path[-1] not in b:
            return False
        if len(path) > 1 and (path[0] in b or path[-1] in a or any(v in a or v in b for v in path[1:-1])):
            return False
    if K == 0:
        return True
    for p, q in combinations(paths, 2):
        if ball(g, p, K - 1) & set(q):
            return False
    return True


def is_fat_path_connected(g: Graph, w, K: int, n: int, budget: SearchBudget) -> SearchOutcome:
    """Decide whether w is K-fat n-path-connected; failures name the offending subsets."""
    w = sorted(set(w))
    g.check_vertices(w)

    def body(counter):
        if len(w) < 2 * n:
            return Verdict.EXHAUSTED_NONE, None, {'reason': 'too-small', 'size': len(w), 'needed': 2 * n}
        if K > 0:
            for u, v in combinations(w, 2):
                counter.tick()
                dist = distance(g, [u], [v])
                if dist < K:
                    return Verdict.EXHAUSTED_NONE, None, {'reason': 'close-pair', 'pair': (u, v),
                                                          'distance': dist}
        systems = []
        for size in range(1, n + 1):
            for a in combinations(w, size):
                for b in combinations(w, size):
                    paths = _far_paths(g, frozenset(a), frozenset(b), size, K, counter)
                    if paths is None:
                        return Verdict.EXHAUSTED_NONE, None, {'reason': 'no-path-system', 'A': a, 'B': b}
                    systems.append((a, b, paths))
        return Verdict.FOUND, {'w': w, 'systems': systems}, {'subset_pairs': len(systems)}

    return run_search(f'path-connected K={K} n={n}', budget, body)


def row_witness(model: FatModel, grid_rows: int, grid_cols: int, i: int) -> frozenset[int]:
    """Lowest vertex of each branch set on row i (1-based) of a grid model."""
    if model.pattern.adjacency != grid(grid_rows, grid_cols).adjacency:
        raise PreconditionError(f'model pattern is not the {grid_rows}x{grid_cols} grid')
    if not 1 <= i <= grid_rows:
        raise PreconditionError(f'row {i} outside 1..{grid_rows}')
    return frozenset(min(model.branch_sets[grid_vertex(grid_cols, i - 1, c)]) for c in range(grid_cols))
