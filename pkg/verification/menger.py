"""Disjoint paths and vertex cuts by unit-capacity flow, and the two weak-Menger checks on G_{h,d,m}."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from math import comb

import networkx as nx
import numpy as np
from django.conf import settings

from .certificates import Certificate, Mode, Verdict
from .construction import LabeledGraph
from .exceptions import ParameterError, SizeCapError, StructuralError
from .graph import Graph, ball, is_path, path_avoiding
from .search import NodeCounter, SearchBudget, SearchOutcome, run_search

logger = logging.getLogger(__name__)

SOURCE, SINK = 'source', 'sink'


def _split_network(g: Graph, s, t, forbidden, weight=lambda v: 1) -> nx.DiGraph:
    """Vertex-split flow network: (v, 0) -> (v, 1) carries the vertex capacity."""
    network = nx.DiGraph()
    allowed = [v for v in g.vertices() if v not in forbidden]
    for v in allowed:
        network.add_edge((v, 0), (v, 1), capacity=weight(v))
    for u, v in g.edges():
        if u in forbidden or v in forbidden:
            continue
        network.add_edge((u, 1), (v, 0))
        network.add_edge((v, 1), (u, 0))
    for v in sorted(s):
        network.add_edge(SOURCE, (v, 0))
    for v in sorted(t):
        network.add_edge((v, 1), SINK)
    return network


def _check_terminals(g: Graph, s, t, forbidden):
    s, t, forbidden = frozenset(s), frozenset(t), frozenset(forbidden)
    if not s or not t:
        raise ParameterError('source and sink sets must be nonempty')
    if s & forbidden or t & forbidden:
        raise ParameterError('source and sink sets must avoid the forbidden vertices')
    g.check_vertices(s | t | forbidden)
    return s, t, forbidden


def max_disjoint_paths(g: Graph, s, t, forbidden=()) -> list[tuple[int, ...]]:
    """A maximum family of vertex-disjoint s-t paths in g - forbidden."""
    s, t, forbidden = _check_terminals(g, s, t, forbidden)
    network = _split_network(g, s, t, forbidden)
    value, flow = nx.maximum_flow(network, SOURCE, SINK)
    paths = []
    for start in sorted(s):
        if flow[SOURCE].get((start, 0), 0) <= 0:
            continue
        path = [start]
        node = (start, 1)
        while True:
            successors = [w for w, f in sorted(flow[node].items(), key=lambda kv: str(kv[0])) if f > 0]
            nxt = successors[0]
            flow[node][nxt] -= 1
            if nxt == SINK:
                break
            path.append(nxt[0])
            node = (nxt[0], 1)
        paths.append(tuple(path))
    if len(paths) != value:
        raise StructuralError(f'flow of value {value} decomposed into {len(paths)} paths')
    logger.debug('max disjoint paths: %d', value)
    return paths


def min_vertex_cut(g: Graph, s, t, forbidden=()) -> frozenset[int]:
    """A minimum set of vertices of g - forbidden meeting every s-t path.

    Cuts may use vertices of s and t, so one always exists; among minimum
    cuts, fewer endpoint vertices are preferred.
    """
    s, t, forbidden = _check_terminals(g, s, t, forbidden)
    scale = g.vertex_count + 1
    ends = s | t
    network = _split_network(g, s, t, forbidden, lambda v: scale + 1 if v in ends else scale)
    value, (reachable, _) = nx.minimum_cut(network, SOURCE, SINK)
    cut = frozenset(v for v in g.vertices()
                    if v not in forbidden and (v, 0) in reachable and (v, 1) not in reachable)
    if len(cut) != value // scale:
        raise StructuralError(f'cut of weight {value} has {len(cut)} vertices')
    return cut


def far_pair_search(lg: LabeledGraph, K: int, avoid_root: bool, budget: SearchBudget) -> SearchOutcome:
    """Two S(G)-T(G) paths at distance at least K, optionally both avoiding the root.

    The first path is grown depth first; a prefix is abandoned as soon as no
    S-T path survives outside the radius K-1 ball around it, since extending
    the prefix only grows that ball. The second path is then found by BFS.
    """
    if K < 0:
        raise ParameterError('K must be nonnegative')
    g = lg.graph
    s, t = frozenset(lg.s_set), frozenset(lg.t_set)
    st = s | t
    root_block = frozenset([lg.root]) if avoid_root else frozenset()

    def second_path(prefix):
        zone = ball(g, prefix, K - 1) if K > 0 else frozenset()
        return path_avoiding(g, s, t, zone | root_block)

    def body(counter: NodeCounter):
        for start in sorted(s - root_block):
            stack = [(start,)]
            while stack:
                prefix = stack.pop()
                counter.tick()
                q = second_path(prefix)
                if q is None:
                    continue
                if prefix[-1] in t:
                    return Verdict.FOUND, (prefix, _strict(q, s, t)), {}
                for w in reversed(g.neighbors(prefix[-1])):
                    if w in prefix or w in root_block:
                        continue
                    if w in t or w not in st:
                        stack.append(prefix + (w,))
        return Verdict.EXHAUSTED_NONE, None, {}

    outcome = run_search(f'far-pair K={K} avoid_root={avoid_root}', budget, body)
    if outcome.found and not far_pair_is_valid(lg, outcome.witness, K, avoid_root):
        raise AssertionError('far pair witness failed re-validation')
    return outcome


def far_pair_notes(lg: LabeledGraph) -> list[str]:
    d = lg.params.d
    return [f'the construction hypothesis d >= 2 {"holds" if d >= 2 else "fails"} (d={d})']


def _strict(path, s, t):
    start = max(i for i, v in enumerate(path) if v in s)
    end = min(i for i, v in enumerate(path) if v in t and i >= start)
    return tuple(path[start:end + 1])


def far_pair_is_valid(lg: LabeledGraph, pair, K: int, avoid_root: bool) -> bool:
    g = lg.graph
    s, t = set(lg.s_set), set(lg.t_set)
    for path in pair:
        path = tuple(path)
        if not is_path(g, path) or path[0] not in s or path[-1] not in t:
            return False
        if avoid_root and lg.root in path:
            return False
    if K > 0 and ball(g, pair[0], K - 1) & set(pair[1]):
        return False
    return True


def _candidate_count(n: int, m: int) -> int:
    return sum(comb(n, k) for k in range(m))


def _sample_candidates(n: int, m: int, samples: int, seed: int) -> list[tuple[int, ...]]:
    """Uniform samples over all vertex sets of size below m."""
    rng = np.random.default_rng(seed)
    weights = np.array([comb(n, k) for k in range(m)], dtype=float)
    sizes = rng.choice(m, size=samples, p=weights / weights.sum())
    return [tuple(sorted(int(v) for v in rng.choice(n, size=int(k), replace=False))) for k in sizes]


def admits_far_path(lg: LabeledGraph, candidate, ell: int) -> bool:
    zone = ball(lg.graph, (*candidate, lg.root), ell)
    return path_avoiding(lg.graph, lg.s_set, lg.t_set, zone) is not None


def no_small_separator(lg: LabeledGraph, ell: int, mode: Mode = Mode.EXHAUSTIVE,
                       samples: int | None = None, seed: int | None = None,
                       jobs: int | None = None) -> Certificate:
    """For candidate sets X with |X| < m, an S-T path must stay more than ell away from X and the root."""
    if ell < 0:
        raise ParameterError('ell must be nonnegative')
    mode = Mode(mode)
    g, m = lg.graph, lg.params.m
    n = g.vertex_count
    total = _candidate_count(n, m)
    if mode == Mode.EXHAUSTIVE:
        cap = settings.LAB_EXHAUSTIVE_CANDIDATE_CAP
        if total > cap:
            raise SizeCapError(f'{total} candidate sets exceed the exhaustive cap of {cap}')
        candidates = [c for k in range(m) for c in combinations(range(n), k)]
    elif mode == Mode.SAMPLED:
        if not samples or samples < 1:
            raise ParameterError('sampled mode needs a positive sample count')
        if seed is None:
            seed = settings.LAB_DEFAULT_SEED
        candidates = _sample_candidates(n, m, samples, seed)
    else:
        raise ParameterError(f'mode {mode.value} is not supported here')

    jobs = jobs or settings.LAB_DEFAULT_JOBS
    logger.info('separator check on %s: %d candidates, ell=%d, %s, %d job(s)',
                lg.params.as_dict(), len(candidates), ell, mode.value, jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: admits_far_path(lg, c, ell), candidates,
                                    chunksize=max(1, len(candidates) // (4 * jobs))))
    else:
        results = [admits_far_path(lg, c, ell) for c in candidates]
    failures = [c for c, ok in zip(candidates, results) if not ok]

    h, d = lg.params.h, lg.params.d
    notes = [
        'checked the strict form: every candidate needs an S-T path at distance > ell',
        f'hypothesis d >= 2*ell: {"holds" if d >= 2 * ell else "fails"} (d={d}, ell={ell})',
        f'hypothesis h >= 2*ell+2: {"holds" if h >= 2 * ell + 2 else "fails"} (h={h}, ell={ell})',
    ]
    return Certificate(
        claim='menger-sep',
        params={**lg.params.as_dict(), 'l': ell},
        verdict=Verdict.FAIL if failures else Verdict.PASS,
        mode=mode,
        seed=seed if mode == Mode.SAMPLED else None,
        samples=samples if mode == Mode.SAMPLED else None,
        witness={'X': failures[0], 'failures': len(failures)} if failures else None,
        stats={'candidates': len(candidates), 'candidate_space': total},
        notes=notes,
    )
