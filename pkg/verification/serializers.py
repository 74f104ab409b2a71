"""JSON exchange formats for graphs, decompositions, models and vertex maps, plus DOT export."""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from pathlib import Path

import graphviz

from .certificates import jsonable
from .construction import ConstructionParams, LabeledGraph, build
from .exceptions import GraphFormatError, LabError
from .fatminor import FatModel
from .graph import Graph
from .qi import VertexMap
from .treedec import TreeDecomposition

logger = logging.getLogger(__name__)

ROLE_COLORS = {'root': 'black', 'S': 'blue', 'T': 'blue', 'V': 'red', 'tree': 'gray'}


def dumps(payload) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2, ensure_ascii=True) + '\n'


def _field(data: dict, key: str, kind=None):
    if not isinstance(data, dict) or key not in data:
        raise GraphFormatError(f'missing field {key!r}')
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise GraphFormatError(f'field {key!r} must be a {kind.__name__}')
    return value


def _indexed(data: dict, key: str) -> list:
    """Values of a mapping keyed "0", "1", ... in key order."""
    keyed = _field(data, key, dict)
    try:
        values = {int(k): v for k, v in keyed.items()}
    except ValueError as exc:
        raise GraphFormatError(f'field {key!r} has a non-integer key') from exc
    if sorted(values) != list(range(len(values))):
        raise GraphFormatError(f'field {key!r} must be keyed 0..{len(values) - 1}')
    return [values[k] for k in range(len(values))]


def _pair(key: str, sep: str) -> tuple[int, int]:
    try:
        x, y = key.split(sep)
        return int(x), int(y)
    except ValueError as exc:
        raise GraphFormatError(f'malformed key {key!r}') from exc


def graph_to_dict(g: Graph, labels: dict | None = None) -> dict:
    data = {'n': g.vertex_count, 'edges': g.edges()}
    if labels is not None:
        data['labels'] = labels
    return data


def graph_from_dict(data: dict) -> Graph:
    """Read {"n", "edges"}; a "labels" block, when present, is left to the caller."""
    count = _field(data, 'n', int)
    edges = _field(data, 'edges', list)
    try:
        return Graph.from_edges(count, [(int(u), int(v)) for u, v in edges])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LabError):
            raise
        raise GraphFormatError(f'malformed edge list: {exc}') from exc


def _landmark_labels(lg: LabeledGraph) -> dict:
    return {
        'root': lg.root,
        'S': lg.s_set,
        'T': lg.t_set,
        'V': {f'{j},{i}': members for (j, i), members in sorted(lg.v_sets.items())},
        'copies': {f'{j},{i}': sorted(members) for (j, i), members in sorted(lg.copies.items())},
        'tree': {f'{level},{pos}': vid for (level, pos), vid in sorted(lg.tree_nodes.items())},
        'leaves': lg.leaves,
        'spines': [{'leaf': s.leaf_index, 'v': s.v_index, 'path': s.path} for s in lg.spines],
    }


def labeled_graph_to_dict(lg: LabeledGraph) -> dict:
    return {**graph_to_dict(lg.graph, _landmark_labels(lg)), 'params': lg.params.as_dict()}


def load_graph_payload(data: dict) -> tuple[Graph, LabeledGraph | None]:
    """A plain graph, or a labeled graph rebuilt from its parameters and checked against the file."""
    graph = graph_from_dict(data)
    if 'params' not in data:
        return graph, None
    params = _field(data, 'params', dict)
    try:
        lg = build(ConstructionParams(int(params['h']), int(params['d']), int(params['m'])))
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f'malformed construction parameters: {params!r}') from exc
    if graph != lg.graph:
        raise GraphFormatError('graph does not match the one built from its parameters')
    labels = data.get('labels')
    if labels is not None and labels != json.loads(dumps(_landmark_labels(lg))):
        raise GraphFormatError('landmark labels do not match the ones built from its parameters')
    return lg.graph, lg


def td_to_dict(td: TreeDecomposition) -> dict:
    return {
        'tree_edges': td.tree.edges(),
        'bags': {str(node): sorted(bag) for node, bag in enumerate(td.bags)},
        'labels': {str(node): label for node, label in enumerate(td.labels)},
        'root': td.root,
    }


def td_from_dict(data: dict) -> TreeDecomposition:
    bags = _indexed(data, 'bags')
    edges = _field(data, 'tree_edges', list)
    labels = _indexed(data, 'labels') if 'labels' in data else None
    try:
        td = TreeDecomposition.from_bags([(int(u), int(v)) for u, v in edges],
                                         [[int(v) for v in bag] for bag in bags], labels)
        return replace(td, root=int(data.get('root', 0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LabError):
            raise
        raise GraphFormatError(f'malformed decomposition: {exc}') from exc


def model_to_dict(model: FatModel) -> dict:
    return {
        'pattern': graph_to_dict(model.pattern),
        'K': model.fatness,
        'branch_sets': {str(x): sorted(s) for x, s in enumerate(model.branch_sets)},
        'branch_paths': {f'{x}-{y}': path for (x, y), path in sorted(model.branch_paths.items())},
    }


def model_from_dict(data: dict) -> FatModel:
    pattern = graph_from_dict(_field(data, 'pattern', dict))
    try:
        sets = tuple(frozenset(int(v) for v in s) for s in _indexed(data, 'branch_sets'))
        paths = {_pair(key, '-'): tuple(int(v) for v in path)
                 for key, path in _field(data, 'branch_paths', dict).items()}
    except TypeError as exc:
        raise GraphFormatError(f'malformed model: {exc}') from exc
    except ValueError as exc:
        if isinstance(exc, LabError):
            raise
        raise GraphFormatError(f'malformed model: {exc}') from exc
    return FatModel(pattern, sets, paths, _field(data, 'K', int))


def vertex_map_to_dict(f: VertexMap) -> dict:
    return {'assignment': f.assignment}


def vertex_map_from_dict(data: dict, source: Graph, target: Graph) -> VertexMap:
    assignment = _field(data, 'assignment', list)
    try:
        return VertexMap(source, target, tuple(int(v) for v in assignment))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, LabError):
            raise GraphFormatError(str(exc)) from exc
        raise GraphFormatError(f'malformed assignment: {exc}') from exc


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f'{path}: not valid JSON ({exc})') from exc


def _roles(lg: LabeledGraph) -> dict[int, str]:
    roles = {v: 'tree' for v in lg.tree_nodes.values()}
    roles.update((v, 'V') for v in lg.v_set_union())
    roles.update((v, 'S') for v in lg.s_set)
    roles.update((v, 'T') for v in lg.t_set)
    roles[lg.root] = 'root'
    return roles


def export_dot(obj: Graph | LabeledGraph, path=None) -> str:
    """DOT text with sorted nodes and edges; landmark roles are colored for labeled graphs."""
    if isinstance(obj, LabeledGraph):
        g, roles = obj.graph, _roles(obj)
        name = 'G_{h}_{d}_{m}'.format(**obj.params.as_dict())
    else:
        g, roles, name = obj, {}, 'G'
    dot = graphviz.Graph(name=name)
    for v in g.vertices():
        role = roles.get(v)
        if role is None:
            dot.node(str(v))
        else:
            dot.node(str(v), color=ROLE_COLORS[role], role=role)
    for u, v in g.edges():
        dot.edge(str(u), str(v))
    source = dot.source
    if path is not None:
        Path(path).write_text(source, encoding='utf-8')
        logger.info('wrote DOT for %d vertices to %s', g.vertex_count, path)
    return source
