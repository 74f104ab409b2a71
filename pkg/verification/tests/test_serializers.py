import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase as HypothesisTestCase

from verification.certificates import Verdict
from verification.claims import revalidate, run_qi
from verification.construction import ConstructionParams, build
from verification.exceptions import GraphFormatError
from verification.fatminor import find_fat_model
from verification.graph import Graph, complete_graph, cycle_graph, path_graph, subdivide
from verification.qi import VertexMap
from verification.search import SearchBudget
from verification.serializers import (
    dumps,
    export_dot,
    graph_from_dict,
    graph_to_dict,
    labeled_graph_to_dict,
    load_graph_payload,
    model_from_dict,
    model_to_dict,
    td_from_dict,
    td_to_dict,
    vertex_map_from_dict,
    vertex_map_to_dict,
)
from verification.treedec import build_flat, build_recursive


def through_json(payload):
    """Serialize the way the commands do and read it back"""
    return json.loads(dumps(payload))


# Helper strategies for generating test data
def small_graph():
    """Generate graphs on 1 to 8 vertices"""
    return st.integers(min_value=1, max_value=8).flatmap(
        lambda n: st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
            max_size=12,
        ).map(lambda edges: Graph.from_edges(n, edges))
    )


class ExchangeFormatPropertyTests(HypothesisTestCase):
    """Property-based tests for the graph exchange format"""

    @given(g=small_graph())
    @settings(max_examples=40, deadline=None)
    def test_property_graph_edges_are_sorted_pairs(self, g):
        """
        Property: a graph is written as {"n", "edges"} with each edge u < v
        and the list sorted, and reads back as the same graph
        """
        payload = through_json(graph_to_dict(g))
        self.assertEqual(set(payload), {'n', 'edges'})
        self.assertEqual(payload['n'], g.vertex_count)
        self.assertTrue(all(u < v for u, v in payload['edges']))
        self.assertEqual(payload['edges'], sorted(payload['edges']))
        self.assertEqual(graph_from_dict(payload), g)


class GraphFormatTests(SimpleTestCase):
    """Graph and labeled graph payloads"""

    def test_graph_payload(self):
        self.assertEqual(graph_to_dict(path_graph(3)), {'n': 3, 'edges': [(0, 1), (1, 2)]})
        labeled = graph_from_dict({'n': 2, 'edges': [[0, 1]], 'labels': {'root': 0}})
        self.assertEqual(labeled, path_graph(2))

    def test_bad_graph_payloads(self):
        with self.assertRaises(GraphFormatError):
            graph_from_dict({'n': 2})
        with self.assertRaises(GraphFormatError):
            graph_from_dict({'vertex_count': 2, 'edges': []})
        with self.assertRaises(GraphFormatError):
            graph_from_dict({'n': 2, 'edges': [[0, 3]]})
        with self.assertRaises(GraphFormatError):
            graph_from_dict({'n': 2, 'edges': [[0]]})
        with self.assertRaises(GraphFormatError):
            graph_from_dict({'n': '2', 'edges': []})

    def test_labeled_graph_layout(self):
        lg = build(ConstructionParams(1, 2, 2))
        payload = through_json(labeled_graph_to_dict(lg))

        # Verify the graph fields sit at the top with the landmarks in a labels block
        self.assertEqual(payload['n'], 17)
        self.assertEqual(payload['params'], {'h': 1, 'd': 2, 'm': 2})
        labels = payload['labels']
        self.assertEqual(labels['root'], lg.root)
        self.assertEqual(labels['S'], list(lg.s_set))
        self.assertEqual(labels['T'], list(lg.t_set))
        self.assertEqual(labels['V']['1,1'], list(lg.top_v(1)))
        self.assertEqual(labels['tree']['0,1'], lg.tree_nodes[(0, 1)])
        self.assertEqual(labels['copies']['1,2'], sorted(lg.copies[(1, 2)]))
        self.assertEqual(len(labels['spines']), len(lg.spines))
        self.assertEqual(labels['spines'][0]['path'], list(lg.spines[0].path))

    def test_labeled_payload_is_rebuilt_and_checked(self):
        lg = build(ConstructionParams(1, 2, 2))
        payload = through_json(labeled_graph_to_dict(lg))
        graph, labeled = load_graph_payload(payload)
        self.assertIs(labeled, lg)
        self.assertEqual(graph, lg.graph)

        # Verify a missing edge or a moved landmark is rejected
        with self.assertRaises(GraphFormatError):
            load_graph_payload({**payload, 'edges': payload['edges'][1:]})
        moved = {**payload, 'labels': {**payload['labels'], 'root': payload['labels']['root'] + 1}}
        with self.assertRaises(GraphFormatError):
            load_graph_payload(moved)
        with self.assertRaises(GraphFormatError):
            load_graph_payload({**payload, 'params': {'h': 1, 'd': 2}})

    def test_plain_graph_payload_has_no_landmarks(self):
        graph, labeled = load_graph_payload(through_json(graph_to_dict(cycle_graph(4))))
        self.assertEqual(graph, cycle_graph(4))
        self.assertIsNone(labeled)

    def test_dot_export(self):
        lg = build(ConstructionParams(1, 2, 2))
        source = export_dot(lg)
        self.assertIn('G_1_2_2', source)
        self.assertIn('role=root', source)
        self.assertIn('0 -- 1', source)
        self.assertEqual(source.count(' -- '), lg.graph.edge_count())
        self.assertIn('graph G {', export_dot(cycle_graph(3)))


class DecompositionAndModelFormatTests(SimpleTestCase):
    """Tree-decomposition, model and vertex map payloads"""

    def test_decomposition_bags_are_keyed_by_node(self):
        lg = build(ConstructionParams(1, 2, 3))
        td = build_recursive(lg)
        payload = through_json(td_to_dict(td))
        self.assertEqual(sorted(payload['bags'], key=int), [str(k) for k in range(td.node_count())])
        self.assertEqual(payload['bags']['0'], sorted(td.bags[0]))

        again = td_from_dict(payload)
        self.assertEqual(again.bags, td.bags)
        self.assertEqual(again.labels, td.labels)
        self.assertEqual(again.tree, td.tree)

    def test_bad_decomposition_payloads(self):
        payload = through_json(td_to_dict(build_flat(build(ConstructionParams(1, 2, 2)))))
        with self.assertRaises(GraphFormatError):
            td_from_dict({**payload, 'bags': list(payload['bags'].values())})
        with self.assertRaises(GraphFormatError):
            td_from_dict({**payload, 'bags': {**payload['bags'], 'x': []}})
        gap = dict(payload['bags'])
        gap.pop('0')
        with self.assertRaises(GraphFormatError):
            td_from_dict({**payload, 'bags': gap})

    def test_model_payload(self):
        outcome = find_fat_model(cycle_graph(6), complete_graph(3), 1, SearchBudget(100_000))
        payload = through_json(model_to_dict(outcome.witness))
        self.assertEqual(set(payload), {'pattern', 'K', 'branch_sets', 'branch_paths'})
        self.assertEqual(payload['K'], 1)
        self.assertEqual(sorted(payload['branch_sets']), ['0', '1', '2'])
        self.assertEqual(sorted(payload['branch_paths']), ['0-1', '0-2', '1-2'])
        self.assertEqual(model_from_dict(payload), outcome.witness)

    def test_bad_model_payloads(self):
        pattern = {'n': 1, 'edges': []}
        with self.assertRaises(GraphFormatError):
            model_from_dict({'pattern': pattern, 'K': 0, 'branch_sets': {'0': ['a']}, 'branch_paths': {}})
        with self.assertRaises(GraphFormatError):
            model_from_dict({'pattern': pattern, 'K': 0, 'branch_sets': {'0': [0]},
                             'branch_paths': {'0_1': [0]}})
        with self.assertRaises(GraphFormatError):
            model_from_dict({'pattern': pattern, 'branch_sets': {'0': [0]}, 'branch_paths': {}})

    def test_vertex_map_payload(self):
        g = cycle_graph(4)
        f = VertexMap.subdivision_inclusion(g)
        payload = through_json(vertex_map_to_dict(f))
        self.assertEqual(payload, {'assignment': [0, 1, 2, 3]})
        self.assertEqual(vertex_map_from_dict(payload, g, subdivide(g)), f)

    def test_bad_vertex_map_payloads(self):
        g = cycle_graph(4)
        with self.assertRaises(GraphFormatError):
            vertex_map_from_dict({'assignment': [0, 1, 2]}, g, g)
        with self.assertRaises(GraphFormatError):
            vertex_map_from_dict({'assignment': [0, 1, 2, 9]}, g, g)
        with self.assertRaises(GraphFormatError):
            vertex_map_from_dict({'assignment': [0, 1, 2, 'x']}, g, g)
        with self.assertRaises(GraphFormatError):
            vertex_map_from_dict({'map': [0, 1, 2, 3]}, g, g)

    def test_quasi_isometry_of_a_map_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            folded = Path(tmp) / 'fold.json'
            folded.write_text(dumps(vertex_map_to_dict(
                VertexMap(cycle_graph(6), cycle_graph(3), (0, 1, 2, 0, 1, 2)))), encoding='utf-8')
            cert = run_qi({'host': 'cycle:6', 'map_file': str(folded), 'target': 'cycle:3', 'M': 2, 'A': 1})

        # Verify the fold fails and the stored assignment alone re-checks it
        self.assertEqual(cert.verdict, Verdict.FAIL)
        self.assertEqual(cert.params['map'], 'file')
        self.assertEqual(cert.params['assignment'], [0, 1, 2, 0, 1, 2])
        self.assertEqual(revalidate(cert).verdict, Verdict.PASS)
