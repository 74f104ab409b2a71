"""Constructive K_n extraction: from a quasi-isometry of G_{h,d,m} to a 1-fat K_n model in the target."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from itertools import combinations

from django.conf import settings

from .certificates import Certificate, Verdict
from .construction import ConstructionParams, LabeledGraph, bounded_vertex_count, s_family_members
from .exceptions import ExtractionFailure, LabError, ParameterError, SizeCapError
from .fatminor import FatModel, validate_model
from .graph import Graph, ball, complete_graph, path_avoiding, separates
from .menger import max_disjoint_paths, min_vertex_cut
from .qi import VertexMap, check_qi, contract_balls, r_of
from .serializers import model_to_dict

logger = logging.getLogger(__name__)

OVERRIDABLE = ('N', 'q', 'r', 'd', 'h', 'm', 'root_radius')


@dataclass(frozen=True)
class ExtractionParams:
    n: int
    M: int
    A: int
    N: int
    q: int
    r: int
    d: int
    h: int
    m: int
    root_radius: int
    overridden: tuple[str, ...] = ()
    implied_vertices: int | None = None
    bit_length: int | None = None
    oversize: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def derive_params(M: int, A: int, n: int, overrides: dict | None = None) -> ExtractionParams:
    """Evaluate the extraction constants for (M, A, n), applying overrides along the chain.

    Each derived value is computed from the (possibly overridden) values before
    it, so overriding q also moves d, h and the root radius unless they are
    overridden too.
    """
    if n < 1:
        raise ParameterError(f'n must be >= 1, got {n}')
    overrides = dict(overrides or {})
    unknown = sorted(set(overrides) - set(OVERRIDABLE))
    if unknown:
        raise ParameterError(f'cannot override {", ".join(unknown)}; allowed: {", ".join(OVERRIDABLE)}')
    for key, value in overrides.items():
        if not isinstance(value, int) or value < 0:
            raise ParameterError(f'override {key} must be a nonnegative integer, got {value!r}')

    def pick(key, default):
        return overrides.get(key, default)

    N = pick('N', n * (n - 1) // 2)
    q = pick('q', N.bit_length())  # ceil(log2(N + 1))
    r = pick('r', r_of(M, A))
    d = pick('d', 4 * r * M * ((2 * r + q) * M + (6 * r + 1) * A + 1))
    h = pick('h', d + 2)
    m = pick('m', n * n)
    root_radius = pick('root_radius', M * q + A)

    # Counting stops at the cap; above it only a bit-length bound is kept.
    try:
        implied, bits = bounded_vertex_count(ConstructionParams(h, d, m), settings.LAB_GRAPH_SIZE_CAP)
    except ParameterError:
        implied, bits = None, None
    oversize = bits is not None and implied is None
    if oversize:
        logger.warning('derived G_{%d,%d,%d} has at least 2**%d vertices, above the cap of %d',
                       h, d, m, bits - 1, settings.LAB_GRAPH_SIZE_CAP)
    return ExtractionParams(n, M, A, N, q, r, d, h, m, root_radius,
                            tuple(k for k in OVERRIDABLE if k in overrides), implied, bits, oversize)


@dataclass(frozen=True)
class Extraction:
    params: ExtractionParams
    model: FatModel
    paths: tuple[tuple[int, ...], ...]
    stages: tuple[dict, ...] = field(default_factory=tuple)
    instance: dict = field(default_factory=dict)
    regions: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)

    def to_certificate(self, notes=()) -> Certificate:
        return Certificate(
            claim='extract-kn',
            params={**self.params.as_dict(), 'instance': self.instance},
            verdict=Verdict.FOUND,
            witness=model_to_dict(self.model),
            stats={'stages': list(self.stages)},
            notes=list(notes) + _param_notes(self.params),
        )


def _param_notes(p: ExtractionParams) -> list[str]:
    notes = ['balls are contracted in the target graph']
    if p.overridden:
        notes.append(f'overridden: {", ".join(p.overridden)}; the properties the large constants '
                     f'would guarantee were checked at each stage')
    return notes


def failure_certificate(exc: ExtractionFailure, p: ExtractionParams, instance: dict) -> Certificate:
    return Certificate(
        claim='extract-kn',
        params={**p.as_dict(), 'instance': instance},
        verdict=Verdict.FAIL,
        witness={'stage': exc.stage, 'detail': exc.detail},
        stats={'stages': list(exc.stages)},
        notes=_param_notes(p),
    )


class _Pipeline:
    """Stage bookkeeping shared by st_path_family and extract_kn."""

    def __init__(self, stages: list | None = None):
        self.stages = [] if stages is None else stages

    def record(self, name: str, **stats) -> None:
        logger.info('extraction stage %s: %s', name, stats)
        self.stages.append({'stage': name, **stats})

    def fail(self, name: str, **detail):
        logger.warning('extraction failed at %s: %s', name, detail)
        raise ExtractionFailure(name, detail, list(self.stages))


def _blocks(mapping: VertexMap) -> dict[int, list[int]]:
    blocks = defaultdict(list)
    for v, image in enumerate(mapping.assignment):
        blocks[image].append(v)
    return blocks


def _family_paths(lg: LabeledGraph, h_graph: Graph, f: VertexMap, p: ExtractionParams,
                  family, run: _Pipeline) -> list[tuple[int, ...]]:
    centers = sorted(f.image(set().union(*(member.members for member in family))))
    verify = h_graph.vertex_count <= settings.LAB_QI_CHECK_LIMIT
    contraction = contract_balls(h_graph, centers, p.r, verify=verify)
    quotient, mapping = contraction.quotient, contraction.mapping
    blocks = _blocks(mapping)
    run.record('contraction', centers=len(centers), radius=p.r,
               quotient_vertices=quotient.vertex_count, verified=verify)

    root_zone = ball(h_graph, [f(lg.root)], p.root_radius)
    forbidden = mapping.image(root_zone)
    sources = mapping.image(f.image(lg.s_set)) - forbidden
    sinks = mapping.image(f.image(lg.t_set)) - forbidden
    if not sources or not sinks:
        run.fail('menger', found=0, needed=p.m, reason='terminals lie inside the root ball')
    flow = max_disjoint_paths(quotient, sources, sinks, forbidden)
    run.record('menger', flow=len(flow), needed=p.m, root_ball=len(root_zone))
    if len(flow) < p.m:
        cut = min_vertex_cut(quotient, sources, sinks, forbidden)
        run.fail('menger', found=len(flow), needed=p.m,
                 cut=[sorted(blocks[x]) for x in sorted(cut)])

    everything = frozenset(h_graph.vertices())
    s_image, t_image = f.image(lg.s_set), f.image(lg.t_set)
    lifted = []
    for qpath in flow[:p.m]:
        region = {v for x in qpath for v in blocks[x]}
        starts = s_image.intersection(blocks[qpath[0]])
        ends = t_image.intersection(blocks[qpath[-1]])
        path = path_avoiding(h_graph, starts, ends, everything - region)
        if path is None:
            run.fail('lift', quotient_path=list(qpath))
        lifted.append(path)

    seen = {}
    for k, path in enumerate(lifted):
        for v in path:
            if v in seen:
                run.fail('lift', reason='paths intersect', pair=[seen[v], k], vertex=v)
            seen[v] = k
        if root_zone & set(path):
            run.fail('lift', reason='path meets the root ball', path=k)
    for hub in contraction.hubs:
        meeting = {seen[v] for v in blocks[hub] if v in seen}
        if len(meeting) > 1:
            run.fail('lift', reason='ball met by several paths', paths=sorted(meeting))
    run.record('lift', paths=len(lifted), lengths=[len(path) for path in lifted])
    return lifted


def _check_map(lg: LabeledGraph, h_graph: Graph, f: VertexMap) -> None:
    if f.source.vertex_count != lg.graph.vertex_count or f.target.vertex_count != h_graph.vertex_count:
        raise ParameterError('the map must go from the labeled graph to the target graph')


def st_path_family(lg: LabeledGraph, h_graph: Graph, f: VertexMap, M: int, A: int,
                   p: ExtractionParams) -> list[tuple[int, ...]]:
    """p.m disjoint f(S)-f(T) paths avoiding the root ball, each landmark ball met by at most one.

    f is assumed to satisfy check_qi(f, M, A); extract_kn checks it first.
    """
    _check_map(lg, h_graph, f)
    run = _Pipeline()
    family = _family(lg, p, run)
    return _family_paths(lg, h_graph, f, p, family, run)


def _family(lg: LabeledGraph, p: ExtractionParams, run: _Pipeline):
    try:
        family = s_family_members(lg, p.q, p.N)
    except LabError as exc:
        run.fail('family', level=p.q, count=p.N, error=str(exc))
    run.record('family', level=p.q, members=len(family))
    return family


def _spine(lg: LabeledGraph, leaf: int, target: int) -> tuple[int, ...] | None:
    for spine in lg.spines:
        if spine.owner == leaf and spine.target == target:
            return spine.path
    return None


def extract_kn(lg: LabeledGraph, h_graph: Graph, f: VertexMap, M: int, A: int, n: int,
               p: ExtractionParams, assume_qi: bool = False) -> Extraction:
    """Build a 1-fat K_n model in h_graph from the path family and the spines of G.

    Every property the stages rely on is checked as it is used; the first one
    that does not hold raises ExtractionFailure naming its stage.
    """
    _check_map(lg, h_graph, f)
    if n != p.n:
        raise ParameterError(f'n={n} does not match the derived parameters (n={p.n})')
    run = _Pipeline()
    run.record('params', **{k: v for k, v in p.as_dict().items() if k != 'overridden'},
               instance=lg.params.as_dict())

    if assume_qi:
        run.record('qi', checked=False)
    else:
        largest = max(lg.graph.vertex_count, h_graph.vertex_count)
        if largest > settings.LAB_QI_CHECK_LIMIT:
            raise SizeCapError(f'{largest} vertices exceed the quasi-isometry check limit of '
                               f'{settings.LAB_QI_CHECK_LIMIT}; pass assume_qi to skip the check')
        cert = check_qi(f, M, A)
        if not cert.passed:
            run.fail('qi', witness=cert.witness)
        run.record('qi', checked=True)

    family = _family(lg, p, run)
    edges = list(combinations(range(n), 2))
    if len(family) < len(edges):
        run.fail('family', members=len(family), needed=len(edges))
    paths = _family_paths(lg, h_graph, f, p, family, run)

    root_zone = ball(h_graph, [f(lg.root)], p.root_radius)
    s_image, t_image = f.image(lg.s_set), f.image(lg.t_set)
    for member in family:
        s_prime = ball(h_graph, f.image(member.members), p.r)
        if not separates(h_graph, s_prime | root_zone, s_image, t_image):
            run.fail('separation', index=member.index)
    run.record('separation', checked=len(family))

    leaves = {x for member in family for x in (member.left_leaf, member.inner_leaf)}
    leaf_balls = ball(h_graph, f.image(leaves), p.r)
    survivors = [path for path in paths if not leaf_balls & set(path)]
    run.record('filter', discarded=len(paths) - len(survivors), surviving=len(survivors))
    if len(survivors) < n:
        run.fail('filter', surviving=len(survivors), needed=n)
    sets = tuple(frozenset(path) for path in survivors[:n])

    everything = frozenset(h_graph.vertices())
    branch_paths = {}
    regions = []
    for (x, y), member in zip(edges, family):
        v_part = member.delta.s_delta[:-1]
        hits = []
        for branch in (sets[x], sets[y]):
            hit = next((a for a in v_part if ball(h_graph, [f(a)], p.r) & branch), None)
            if hit is None:
                run.fail('ball-hit', edge=[x, y], index=member.index)
            hits.append(hit)
        spines = [_spine(lg, member.left_leaf, a) for a in hits]
        if None in spines:
            run.fail('spine', edge=[x, y], leaf=member.left_leaf, targets=hits)
        region = ball(h_graph, f.image(spines[0] + spines[1]), p.r)
        for other, earlier in regions:
            if region & earlier:
                run.fail('regions', edges=[list(other), [x, y]])
        regions.append(((x, y), region))
        others = frozenset().union(*(s for k, s in enumerate(sets) if k not in (x, y)))
        route = path_avoiding(h_graph, sets[x] & region, sets[y] & region,
                              (everything - region) | others)
        if route is None:
            run.fail('route', edge=[x, y], region=len(region))
        branch_paths[(x, y)] = route
        run.record('route', edge=[x, y], region=len(region), length=len(route))

    model = FatModel(complete_graph(n), sets, branch_paths, 1)
    cert = validate_model(h_graph, model)
    if not cert.passed:
        run.fail('model', witness=cert.witness)
    run.record('model', branch_sets=n, branch_paths=len(branch_paths))
    return Extraction(p, model, tuple(paths), tuple(run.stages), lg.params.as_dict(),
                      {edge: frozenset(region) for edge, region in regions})


def identity_extraction(lg: LabeledGraph, n: int, M: int = 1, A: int = 0,
                        overrides: dict | None = None, assume_qi: bool = False) -> Extraction:
    """extract_kn with the target equal to G and f the identity."""
    p = derive_params(M, A, n, overrides)
    f = VertexMap.identity(lg.graph)
    return extract_kn(lg, lg.graph, f, M, A, n, p, assume_qi=assume_qi)
