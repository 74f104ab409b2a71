from itertools import product

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase as HypothesisTestCase

from verification.certificates import Verdict
from verification.exceptions import PreconditionError
from verification.fatminor import (
    FatModel,
    find_far_path_system,
    find_fat_model,
    grid,
    grid_vertex,
    is_fat_path_connected,
    path_system_is_valid,
    row_witness,
    validate_model,
)
from verification.graph import Graph, complete_graph, cycle_graph, cycle_rank, is_connected_set, path_graph
from verification.search import SearchBudget

BUDGET = SearchBudget(200_000)


# Helper strategies for generating test data
def tiny_graph():
    """Generate graphs on 3 to 6 vertices"""
    return st.integers(min_value=3, max_value=6).flatmap(
        lambda n: st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]),
            max_size=9,
        ).map(lambda edges: Graph.from_edges(n, edges))
    )


PATTERNS = [complete_graph(3), path_graph(4), Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])]


def is_minor(g, pattern):
    """Brute-force minor oracle: try every assignment of g's vertices to branch sets or to nothing"""
    k = pattern.vertex_count
    for labels in product(range(k + 1), repeat=g.vertex_count):
        sets = [{v for v, label in enumerate(labels) if label == x} for x in range(k)]
        if not all(s and is_connected_set(g, s) for s in sets):
            continue
        if all(any(w in sets[y] for v in sets[x] for w in g.neighbors(v)) for x, y in pattern.edges()):
            return True
    return False


class FatMinorPropertyTests(HypothesisTestCase):
    """Property-based tests for the model search"""

    @given(g=tiny_graph())
    @settings(max_examples=30, deadline=None)
    def test_property_triangle_minor_iff_cycle(self, g):
        """
        Property: with K = 0 the search is a plain minor test, and K_3 is a
        minor exactly of the graphs that contain a cycle
        """
        outcome = find_fat_model(g, complete_graph(3), 0, SearchBudget(2_000_000))
        self.assertNotEqual(outcome.status, Verdict.BUDGET_EXCEEDED)
        self.assertEqual(outcome.found, cycle_rank(g) > 0)
        if outcome.found:
            self.assertEqual(validate_model(g, outcome.witness).verdict, Verdict.PASS)

    @given(g=tiny_graph(), pattern=st.sampled_from(PATTERNS))
    @settings(max_examples=25, deadline=None)
    def test_property_zero_fatness_agrees_with_minor_oracle(self, g, pattern):
        """
        Property: find_fat_model with K = 0 finds a model exactly when the
        brute-force oracle finds the pattern as a minor
        """
        outcome = find_fat_model(g, pattern, 0, SearchBudget(2_000_000))
        self.assertNotEqual(outcome.status, Verdict.BUDGET_EXCEEDED)
        self.assertEqual(outcome.found, is_minor(g, pattern))

    @given(rows=st.integers(min_value=2, max_value=4), cols=st.integers(min_value=2, max_value=5))
    @settings(max_examples=15, deadline=None)
    def test_property_disjoint_rows_form_path_system(self, rows, cols):
        """
        Property: a rows x cols grid has `rows` disjoint left-to-right paths
        """
        g = grid(rows, cols)
        left = [grid_vertex(cols, r, 0) for r in range(rows)]
        right = [grid_vertex(cols, r, cols - 1) for r in range(rows)]
        outcome = find_far_path_system(g, left, right, rows, 1, BUDGET)
        self.assertTrue(outcome.found)
        self.assertTrue(path_system_is_valid(g, left, right, outcome.witness, 1))


class FatModelUnitTests(SimpleTestCase):
    """Unit tests for model validation and the searches"""

    def test_valid_edge_model(self):
        model = FatModel(complete_graph(2), (frozenset({0}), frozenset({4})), {(0, 1): (0, 1, 2, 3, 4)}, 1)
        cert = validate_model(path_graph(5), model)
        self.assertEqual(cert.verdict, Verdict.PASS)
        self.assertEqual(model.oriented_path(1, 0), (4, 3, 2, 1, 0))

    def test_branch_sets_too_close(self):
        model = FatModel(complete_graph(2), (frozenset({0}), frozenset({4})), {(0, 1): (0, 1, 2, 3, 4)}, 5)
        cert = validate_model(path_graph(5), model)
        self.assertEqual(cert.verdict, Verdict.FAIL)
        self.assertEqual(cert.witness['reason'], 'too-close')
        self.assertEqual(cert.witness['distance'], 4)

    def test_broken_path_is_rejected(self):
        model = FatModel(complete_graph(2), (frozenset({0}), frozenset({4})), {(0, 1): (0, 2, 4)}, 0)
        self.assertEqual(validate_model(path_graph(5), model).witness['reason'], 'not-a-path')

    def test_disconnected_branch_set_is_rejected(self):
        model = FatModel(complete_graph(1), (frozenset({0, 2}),), {}, 0)
        self.assertEqual(validate_model(path_graph(3), model).witness['reason'], 'disconnected-branch-set')

    def test_path_through_branch_set_is_rejected(self):
        model = FatModel(complete_graph(3), (frozenset({0}), frozenset({2}), frozenset({4})),
                         {(0, 1): (0, 1, 2), (0, 2): (0, 1, 2, 3, 4), (1, 2): (2, 3, 4)}, 0)
        cert = validate_model(path_graph(5), model)
        self.assertEqual(cert.verdict, Verdict.FAIL)

    def test_triangle_in_cycle(self):
        g = cycle_graph(6)
        outcome = find_fat_model(g, complete_graph(3), 1, BUDGET)
        self.assertTrue(outcome.found)
        self.assertEqual(outcome.witness.fatness, 1)
        self.assertEqual(validate_model(g, outcome.witness).verdict, Verdict.PASS)

    def test_cycle_rank_prune(self):
        outcome = find_fat_model(cycle_graph(8), complete_graph(4), 1, BUDGET)
        self.assertEqual(outcome.status, Verdict.EXHAUSTED_NONE)
        self.assertEqual(outcome.detail, {'phase': 'prune'})

    def test_zero_budget(self):
        outcome = find_fat_model(cycle_graph(6), complete_graph(3), 1, SearchBudget(0))
        self.assertEqual(outcome.status, Verdict.BUDGET_EXCEEDED)
        cert = outcome.to_certificate('search-fat-model', {'K': 1}, SearchBudget(0))
        self.assertIsNone(cert.witness)
        self.assertEqual(cert.node_limit, 0)

    def test_negative_fatness(self):
        with self.assertRaises(PreconditionError):
            find_fat_model(cycle_graph(5), complete_graph(3), -1, BUDGET)

    def test_far_paths_in_grid(self):
        g = grid(3, 5)
        left, right = [0, 5, 10], [4, 9, 14]
        two = find_far_path_system(g, left, right, 2, 2, BUDGET)
        self.assertTrue(two.found)
        self.assertTrue(path_system_is_valid(g, left, right, two.witness, 2))
        three = find_far_path_system(g, left, right, 3, 2, BUDGET)
        self.assertEqual(three.status, Verdict.EXHAUSTED_NONE)

    def test_zero_fatness_paths_are_distinct(self):
        g = grid(2, 3)
        outcome = find_far_path_system(g, [0, 3], [2, 5], 2, 0, BUDGET)
        self.assertTrue(outcome.found)
        self.assertEqual(len(set(outcome.witness)), 2)
        self.assertTrue(path_system_is_valid(g, [0, 3], [2, 5], outcome.witness, 0))

    def test_zero_fatness_may_share_an_end(self):
        g = cycle_graph(4)
        outcome = find_far_path_system(g, [0], [2], 2, 0, BUDGET)
        self.assertTrue(outcome.found)
        self.assertEqual(sorted(outcome.witness), [(0, 1, 2), (0, 3, 2)])

        # Verify a single path cannot be counted twice
        self.assertEqual(find_far_path_system(path_graph(3), [0], [2], 2, 0, BUDGET).status,
                         Verdict.EXHAUSTED_NONE)
        self.assertFalse(path_system_is_valid(path_graph(3), [0], [2], [(0, 1, 2)] * 2, 0))

    def test_path_system_rejects_inner_terminals(self):
        g = path_graph(4)
        self.assertFalse(path_system_is_valid(g, [0, 1], [3], [(0, 1, 2, 3)], 0))
        self.assertTrue(path_system_is_valid(g, [1], [3], [(1, 2, 3)], 0))

    def test_path_connected_cycle(self):
        outcome = is_fat_path_connected(cycle_graph(8), [0, 4], 2, 1, BUDGET)
        self.assertTrue(outcome.found)
        self.assertEqual(outcome.witness['w'], [0, 4])

    def test_path_connected_rejects_close_pair(self):
        outcome = is_fat_path_connected(path_graph(6), [0, 1, 4, 5], 2, 2, BUDGET)
        self.assertEqual(outcome.status, Verdict.EXHAUSTED_NONE)
        self.assertEqual(outcome.detail['reason'], 'close-pair')

    def test_path_connected_needs_room(self):
        outcome = is_fat_path_connected(path_graph(6), [0, 5], 1, 2, BUDGET)
        self.assertEqual(outcome.detail['reason'], 'too-small')

    def test_grid_row_witness(self):
        rows, cols = 3, 6
        g = grid(rows, cols)
        model = FatModel(g, tuple(frozenset({v}) for v in g.vertices()),
                         {(u, v): (u, v) for u, v in g.edges()}, 0)
        self.assertEqual(row_witness(model, rows, cols, 2), frozenset(range(6, 12)))
        with self.assertRaises(PreconditionError):
            row_witness(model, rows, cols, 4)
        with self.assertRaises(PreconditionError):
            row_witness(model, 2, 9, 1)

    def test_three_fat_cycle_in_large_grid(self):
        g = grid(9, 9)
        outcome = find_fat_model(g, cycle_graph(4), 3, SearchBudget(2_000_000))
        self.assertEqual(outcome.status, Verdict.FOUND)
        self.assertEqual(outcome.witness.fatness, 3)
        self.assertEqual(validate_model(g, outcome.witness).verdict, Verdict.PASS)

    def test_no_cycle_model_in_a_tree(self):
        tree = path_graph(30)
        outcome = find_fat_model(tree, cycle_graph(4), 1, BUDGET)
        self.assertEqual(outcome.status, Verdict.EXHAUSTED_NONE)
        self.assertEqual(outcome.detail, {'phase': 'prune'})

    def test_grid_row_is_path_connected(self):
        rows, cols = 3, 6
        g = grid(rows, cols)
        model = FatModel(g, tuple(frozenset({v}) for v in g.vertices()),
                         {(u, v): (u, v) for u, v in g.edges()}, 0)
        w = row_witness(model, rows, cols, 2)

        # Verify one vertex per column on the row is 1-fat 3-path-connected
        outcome = is_fat_path_connected(g, w, 1, 3, BUDGET)
        self.assertEqual(outcome.status, Verdict.FOUND)
        self.assertEqual(outcome.witness['w'], sorted(w))
        for a, b, paths in outcome.witness['systems']:
            self.assertTrue(path_system_is_valid(g, a, b, paths, 1))
