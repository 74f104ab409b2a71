"""Claim registry behind the verify, search, extract and revalidate commands.

Every runner takes the cleaned options of a command and returns a Certificate.
"""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np
from django.conf import settings

from .certificates import Certificate, Mode, Verdict
from .construction import (
    ConstructionParams,
    LabeledGraph,
    build,
    delta_separator,
    verify_delta_separation,
    verify_landmark_distances,
)
from .exceptions import ExtractionFailure, ParameterError, PreconditionError
from .fatminor import (
    find_fat_model,
    find_far_path_system,
    grid,
    is_fat_path_connected,
    path_system_is_valid,
    validate_model,
)
from .graph import (
    Graph,
    complete_graph,
    cycle_graph,
    distance,
    multi_source_bfs,
    path_graph,
    separates,
)
from .knx import derive_params, failure_certificate, identity_extraction
from .menger import admits_far_path, far_pair_is_valid, far_pair_notes, far_pair_search, no_small_separator
from .qi import (
    VertexMap,
    check_conn_image,
    check_conn_preimage,
    check_qi,
    check_separator_transfer,
    r_of,
)
from .search import SearchBudget
from .serializers import model_from_dict, model_to_dict, read_json, vertex_map_from_dict
from .treedec import adhesion_mismatches, bag_profile, build_flat, build_recursive, validate

logger = logging.getLogger(__name__)

BAG_SET_LIMIT = 4
BAG_VERTEX_LIMIT = 8
SWEEP_SET_SIZE = 6
SEPARATOR_MARGINS = (1, 2)


# Option helpers

def _required(opts: dict, key: str):
    value = opts.get(key)
    if value is None:
        raise ParameterError(f'--{key.replace("_", "-")} is required for this claim')
    return value


def labeled(opts: dict) -> LabeledGraph:
    return build(ConstructionParams(_required(opts, 'h'), _required(opts, 'd'), _required(opts, 'm')))


def parse_graph_spec(spec: str) -> Graph:
    """grid:R,C | cycle:N | path:N | complete:N | gdm:h,d,m."""
    kind, _, rest = spec.partition(':')
    try:
        numbers = [int(x) for x in rest.split(',')] if rest else []
    except ValueError as exc:
        raise ParameterError(f'bad graph spec {spec!r}') from exc
    shapes = {'grid': (2, lambda r, c: grid(r, c)), 'cycle': (1, cycle_graph), 'path': (1, path_graph),
              'complete': (1, complete_graph),
              'gdm': (3, lambda h, d, m: build(ConstructionParams(h, d, m)).graph)}
    if kind not in shapes or len(numbers) != shapes[kind][0]:
        raise ParameterError(f'bad graph spec {spec!r}; expected one of grid:R,C cycle:N path:N '
                             f'complete:N gdm:h,d,m')
    if any(x < 1 for x in numbers):
        raise ParameterError(f'graph spec {spec!r} needs positive sizes')
    return shapes[kind][1](*numbers)


def host_graph(opts: dict) -> tuple[Graph, str]:
    if opts.get('host'):
        return parse_graph_spec(opts['host']), opts['host']
    spec = f'gdm:{_required(opts, "h")},{_required(opts, "d")},{_required(opts, "m")}'
    return parse_graph_spec(spec), spec


def vertex_map(kind: str, g: Graph) -> VertexMap:
    if kind == 'identity':
        return VertexMap.identity(g)
    if kind == 'subdivision':
        return VertexMap.subdivision_inclusion(g)
    raise ParameterError(f'unknown map {kind!r}; expected identity or subdivision')


def budget_of(opts: dict) -> SearchBudget:
    if opts.get('budget') is None:
        return SearchBudget.default()
    return SearchBudget(opts['budget'])


def seed_of(opts: dict) -> int:
    seed = opts.get('seed')
    return settings.LAB_DEFAULT_SEED if seed is None else seed


# Construction claims

def run_landmark_distances(opts: dict) -> Certificate:
    return verify_landmark_distances(labeled(opts))


def run_delta_separation(opts: dict) -> Certificate:
    lg = labeled(opts)
    if opts.get('level') is not None:
        return verify_delta_separation(lg, opts['level'])
    checked = 0
    for level in range(lg.params.h):
        cert = verify_delta_separation(lg, level)
        checked += cert.stats['nodes_checked']
        if not cert.passed:
            return replace(cert, params=lg.params.as_dict(),
                           witness={'level': level, **cert.witness})
    return Certificate(claim='obs33', params=lg.params.as_dict(), verdict=Verdict.PASS,
                       stats={'levels': lg.params.h, 'nodes_checked': checked})


def run_td(opts: dict) -> Certificate:
    lg = labeled(opts)
    recursive = bool(opts.get('recursive'))
    td = build_recursive(lg) if recursive else build_flat(lg)
    params = {**lg.params.as_dict(), 'recursive': recursive}
    cert = validate(lg.graph, td)
    if not cert.passed:
        return replace(cert, params=params)
    mismatches = adhesion_mismatches(lg, td)
    if mismatches:
        return Certificate(claim='td', params=params, verdict=Verdict.FAIL,
                           witness={'condition': 'adhesion', 'edges': mismatches})
    return Certificate(claim='td', params=params, verdict=Verdict.PASS,
                       stats={**cert.stats, 'nodes': td.node_count()})


def run_td_shape(opts: dict) -> Certificate:
    lg = labeled(opts)
    profile = bag_profile(lg, build_recursive(lg))
    over = [[node, sets, rest] for node, (sets, rest) in sorted(profile.items())
            if sets > BAG_SET_LIMIT or rest > BAG_VERTEX_LIMIT]
    params = {**lg.params.as_dict(), 'set_limit': BAG_SET_LIMIT, 'vertex_limit': BAG_VERTEX_LIMIT}
    stats = {
        'bags': len(profile),
        'max_sets': max((s for s, _ in profile.values()), default=0),
        'max_leftover': max((r for _, r in profile.values()), default=0),
    }
    if over:
        return Certificate(claim='td-shape', params=params, verdict=Verdict.FAIL,
                           witness={'bags': over}, stats=stats)
    return Certificate(claim='td-shape', params=params, verdict=Verdict.PASS, stats=stats)


# Menger claims

def _separator(lg: LabeledGraph, opts: dict) -> Certificate:
    samples = opts.get('samples')
    if samples:
        return no_small_separator(lg, opts['l'], Mode.SAMPLED, samples=samples, seed=seed_of(opts),
                                  jobs=opts.get('jobs'))
    return no_small_separator(lg, opts['l'], Mode.EXHAUSTIVE, jobs=opts.get('jobs'))


def run_menger_pair(opts: dict) -> Certificate:
    lg = labeled(opts)
    K = _required(opts, 'K')
    avoid_root = bool(opts.get('avoid_root'))
    budget = budget_of(opts)
    outcome = far_pair_search(lg, K, avoid_root, budget)
    notes = far_pair_notes(lg)
    if opts.get('l') is not None:
        sep = _separator(lg, opts)
        notes.append(f'separator check with l={opts["l"]}: {sep.verdict.value}')
    payload = {'paths': list(outcome.witness)} if outcome.found else None
    return outcome.to_certificate('menger-pair', {**lg.params.as_dict(), 'K': K, 'avoid_root': avoid_root},
                                  budget, witness_payload=payload, notes=notes)


def run_menger_sep(opts: dict) -> Certificate:
    _required(opts, 'l')
    return _separator(labeled(opts), opts)


# Quasi-isometry claims

def _map_from_file(path: str, source: Graph, target: Graph) -> VertexMap:
    try:
        data = read_json(path)
    except OSError as exc:
        raise ParameterError(f'cannot read {path}: {exc}') from exc
    return vertex_map_from_dict(data, source, target)


def _qi_setup(opts: dict) -> tuple[VertexMap, dict]:
    g, spec = host_graph(opts)
    M = opts.get('M') if opts.get('M') is not None else 1
    A = opts.get('A') if opts.get('A') is not None else 0
    if opts.get('map_file'):
        # The assignment travels with the certificate so revalidate needs no file.
        target = opts.get('target') or spec
        f = _map_from_file(opts['map_file'], g, parse_graph_spec(target))
        return f, {'host': spec, 'map': 'file', 'target': target, 'assignment': list(f.assignment),
                   'M': M, 'A': A}
    kind = opts.get('map') or 'identity'
    return vertex_map(kind, g), {'host': spec, 'map': kind, 'M': M, 'A': A}


def run_qi(opts: dict) -> Certificate:
    f, info = _qi_setup(opts)
    cert = check_qi(f, info['M'], info['A'])
    return replace(cert, params={**cert.params, **info})


def random_connected_set(g: Graph, rng: np.random.Generator, max_size: int) -> frozenset[int]:
    """Grow a connected set from a random vertex by random frontier choices."""
    start = int(rng.integers(g.vertex_count))
    size = int(rng.integers(1, max_size + 1))
    members = {start}
    frontier = set(g.neighbors(start))
    while len(members) < size and frontier:
        pick = sorted(frontier)[int(rng.integers(len(frontier)))]
        members.add(pick)
        frontier.discard(pick)
        frontier.update(w for w in g.neighbors(pick) if w not in members)
    return frozenset(members)


def random_separation(g: Graph, rng: np.random.Generator, reach: int = 0):
    """A sphere around a random vertex with the center on one side and a farther vertex on the other.

    The sphere radius exceeds reach and the far vertex lies more than reach beyond
    the sphere, so a reach-ball around the sphere contains neither side.
    """
    center = int(rng.integers(g.vertex_count))
    radius = reach + SEPARATOR_MARGINS[int(rng.integers(len(SEPARATOR_MARGINS)))]
    dist = multi_source_bfs(g, [center])
    sphere = frozenset(v for v, k in dist.items() if k == radius)
    beyond = sorted(v for v, k in dist.items() if k > radius + reach)
    if not beyond:
        return None
    return sphere, frozenset([center]), frozenset([beyond[int(rng.integers(len(beyond)))]])


def _sweep(claim: str, opts: dict, check) -> Certificate:
    """Run check on seeded random instances until one fails or the samples run out."""
    f, info = _qi_setup(opts)
    M, A = info['M'], info['A']
    qi = check_qi(f, M, A)
    if not qi.passed:
        raise PreconditionError(f'the map is not an ({M}, {A})-quasi-isometry: {qi.witness}')
    samples = opts.get('samples') or 50
    seed = seed_of(opts)
    rng = np.random.default_rng(seed)
    checked = exercised = 0
    for _ in range(samples):
        cert = check(f, M, A, rng)
        if cert is None:
            continue
        checked += 1
        exercised += not cert.stats.get('vacuous', False)
        if not cert.passed:
            return Certificate(claim=claim, params={**info, **cert.params}, verdict=Verdict.FAIL,
                               mode=Mode.SAMPLED, seed=seed, samples=samples, witness=cert.witness,
                               stats={'checked': checked, 'exercised': exercised})
    logger.info('%s sweep: %d instances checked (%d non-vacuous) with seed %d',
                claim, checked, exercised, seed)
    notes = [] if exercised else ['no sampled instance tested the conclusion; the pass holds vacuously']
    return Certificate(claim=claim, params=info, verdict=Verdict.PASS, mode=Mode.SAMPLED,
                       seed=seed, samples=samples, stats={'checked': checked, 'exercised': exercised},
                       notes=notes)


def run_conn_image_sweep(opts: dict) -> Certificate:
    return _sweep('lemma22', opts, lambda f, M, A, rng: check_conn_image(
        f, M, A, random_connected_set(f.source, rng, SWEEP_SET_SIZE)))


def run_conn_preimage_sweep(opts: dict) -> Certificate:
    return _sweep('lemma23', opts, lambda f, M, A, rng: check_conn_preimage(
        f, M, A, random_connected_set(f.target, rng, SWEEP_SET_SIZE)))


def _separator_check(f, M, A, rng):
    found = random_separation(f.source, rng, r_of(M, A))
    if found is None:
        return None
    x, y, z = found
    return check_separator_transfer(f, M, A, x, y, z)


def run_separator_sweep(opts: dict) -> Certificate:
    return _sweep('lemma24', opts, _separator_check)


VERIFY_CLAIMS = {
    'obs32': run_landmark_distances,
    'obs33': run_delta_separation,
    'td': run_td,
    'td-shape': run_td_shape,
    'menger-pair': run_menger_pair,
    'menger-sep': run_menger_sep,
    'qi': run_qi,
    'lemma22': run_conn_image_sweep,
    'lemma23': run_conn_preimage_sweep,
    'lemma24': run_separator_sweep,
}


# Searches

def run_search_fat_model(opts: dict) -> Certificate:
    g = parse_graph_spec(_required(opts, 'host'))
    pattern = parse_graph_spec(_required(opts, 'pattern'))
    K = _required(opts, 'K')
    budget = budget_of(opts)
    outcome = find_fat_model(g, pattern, K, budget)
    payload = model_to_dict(outcome.witness) if outcome.found else None
    return outcome.to_certificate('search-fat-model', {'host': opts['host'], 'pattern': opts['pattern'], 'K': K},
                                  budget, witness_payload=payload)


def run_search_path_system(opts: dict) -> Certificate:
    g = parse_graph_spec(_required(opts, 'host'))
    a, b, count, K = _required(opts, 'a'), _required(opts, 'b'), _required(opts, 'l'), _required(opts, 'K')
    budget = budget_of(opts)
    outcome = find_far_path_system(g, a, b, count, K, budget)
    payload = {'paths': outcome.witness} if outcome.found else None
    params = {'host': opts['host'], 'a': sorted(a), 'b': sorted(b), 'l': count, 'K': K}
    return outcome.to_certificate('search-path-system', params, budget, witness_payload=payload)


def run_search_path_connected(opts: dict) -> Certificate:
    g = parse_graph_spec(_required(opts, 'host'))
    w, K, n = _required(opts, 'w'), _required(opts, 'K'), _required(opts, 'n')
    budget = budget_of(opts)
    outcome = is_fat_path_connected(g, w, K, n, budget)
    params = {'host': opts['host'], 'w': sorted(w), 'K': K, 'n': n}
    return outcome.to_certificate('search-path-connected', params, budget, witness_payload=outcome.witness)


SEARCHES = {
    'fat-model': run_search_fat_model,
    'path-system': run_search_path_system,
    'path-connected': run_search_path_connected,
}


# Extraction

def run_extract_kn(opts: dict) -> Certificate:
    """Identity-map extraction on G_{h,d,m}; overrides shrink the derived constants to fit."""
    lg = labeled(opts)
    n = _required(opts, 'n')
    M = opts.get('M') if opts.get('M') is not None else 1
    A = opts.get('A') if opts.get('A') is not None else 0
    overrides = opts.get('override') or {}
    try:
        extraction = identity_extraction(lg, n, M, A, overrides, assume_qi=bool(opts.get('assume_qi')))
    except ExtractionFailure as exc:
        return failure_certificate(exc, derive_params(M, A, n, overrides), lg.params.as_dict())
    return extraction.to_certificate()


# Revalidation

def _labeled_from(params: dict, graph_payload) -> LabeledGraph:
    lg = build(ConstructionParams(int(params['h']), int(params['d']), int(params['m'])))
    if graph_payload is not None and graph_payload[0] != lg.graph:
        raise ParameterError('the graph file does not match the certificate parameters')
    return lg


def _host_from(params: dict, graph_payload) -> Graph:
    if graph_payload is not None:
        return graph_payload[0]
    return parse_graph_spec(params['host'])


def _recheck_landmark_distances(cert, graph_payload):
    lg = _labeled_from(cert.params, graph_payload)
    u, v = cert.witness['pair']
    same_set = any(u in members and v in members for members in lg.v_sets.values())
    dist = distance(lg.graph, [u], [v])
    return same_set and dist == cert.witness['distance'] and dist < 2 * lg.params.d + 2


def _recheck_delta_separation(cert, graph_payload):
    lg = _labeled_from(cert.params, graph_payload)
    level = cert.witness.get('level', cert.params.get('level'))
    return all(not separates(lg.graph, delta_separator(lg, level, pos), lg.s_set, lg.t_set)
               for pos in cert.witness['positions'])


def _recheck_menger_pair(cert, graph_payload):
    lg = _labeled_from(cert.params, graph_payload)
    return far_pair_is_valid(lg, cert.witness['paths'], cert.params['K'], cert.params['avoid_root'])


def _recheck_menger_sep(cert, graph_payload):
    lg = _labeled_from(cert.params, graph_payload)
    return not admits_far_path(lg, cert.witness['X'], cert.params['l'])


def _recheck_td(cert, graph_payload):
    rerun = run_td({**cert.params})
    return rerun.verdict == Verdict.FAIL and rerun.witness == cert.witness


def _recheck_model(cert, graph_payload):
    model = model_from_dict(cert.witness)
    if cert.claim == 'extract-kn':
        g = _labeled_from(cert.params['instance'], graph_payload).graph
        expected = complete_graph(cert.params['n'])
        if model.fatness != 1 or model.pattern != expected:
            return False
    else:
        g = _host_from(cert.params, graph_payload)
        if model.fatness != cert.params['K']:
            return False
    return validate_model(g, model).passed


def _recheck_path_system(cert, graph_payload):
    g = _host_from(cert.params, graph_payload)
    p = cert.params
    paths = cert.witness['paths']
    return len(paths) == p['l'] and path_system_is_valid(g, p['a'], p['b'], paths, p['K'])


def _recheck_path_connected(cert, graph_payload):
    g = _host_from(cert.params, graph_payload)
    K = cert.params['K']
    return all(len(paths) == len(a) and path_system_is_valid(g, a, b, paths, K)
               for a, b, paths in cert.witness['systems'])


def _recheck_qi(cert, graph_payload):
    params = cert.params
    if params['map'] == 'file':
        f = vertex_map_from_dict({'assignment': params['assignment']}, parse_graph_spec(params['host']),
                                 parse_graph_spec(params['target']))
    else:
        f, _ = _qi_setup({'host': params['host'], 'map': params['map']})
    rerun = check_qi(f, cert.params['M'], cert.params['A'])
    return rerun.verdict == Verdict.FAIL and rerun.witness == cert.witness


RECHECKS = {
    'obs32': _recheck_landmark_distances,
    'obs33': _recheck_delta_separation,
    'td': _recheck_td,
    'menger-pair': _recheck_menger_pair,
    'menger-sep': _recheck_menger_sep,
    'qi': _recheck_qi,
    'search-fat-model': _recheck_model,
    'extract-kn': _recheck_model,
    'search-path-system': _recheck_path_system,
    'search-path-connected': _recheck_path_connected,
}


def revalidate(cert: Certificate, graph_payload=None) -> Certificate:
    """Re-check a certificate's witness against the rebuilt (or supplied) graph without searching again.

    graph_payload is the (graph, labeled graph or None) pair read from a graph file.
    """
    params = {'claim': cert.claim, 'verdict': cert.verdict.value, 'digest': cert.digest()}
    if cert.witness is None:
        return Certificate(claim='revalidate', params=params, verdict=Verdict.PASS,
                           notes=['the certificate carries no witness to re-check'])
    recheck = RECHECKS.get(cert.claim)
    if recheck is None or (cert.claim == 'extract-kn' and cert.verdict != Verdict.FOUND):
        return Certificate(claim='revalidate', params=params, verdict=Verdict.PASS,
                           notes=[f'witnesses of {cert.claim} {cert.verdict.value} are not re-checkable'])
    try:
        ok = recheck(cert, graph_payload)
    except (KeyError, TypeError, ValueError) as exc:
        logger.warning('witness of %s could not be re-checked: %s', cert.claim, exc)
        ok = False
    logger.info('revalidated %s witness: %s', cert.claim, 'ok' if ok else 'rejected')
    return Certificate(claim='revalidate', params=params,
                       verdict=Verdict.PASS if ok else Verdict.FAIL,
                       witness=None if ok else {'claim': cert.claim})
