from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase as HypothesisTestCase

from verification.certificates import Verdict
from verification.construction import ConstructionParams, build
from verification.exceptions import PreconditionError, StructuralError, ThresholdError
from verification.graph import path_graph
from verification.treedec import (
    BalancedEdge,
    Sink,
    TreeDecomposition,
    adhesion_mismatches,
    bag_profile,
    build_flat,
    build_recursive,
    induced_separation,
    trap,
    validate,
    width_and_adhesions,
)


def G(h, d, m):
    return build(ConstructionParams(h, d, m))


def path_decomposition(n):
    """Bags {i, i+1} along a path of n vertices"""
    return TreeDecomposition.from_bags([(i, i + 1) for i in range(n - 2)],
                                       [{i, i + 1} for i in range(n - 1)])


class TrapPropertyTests(HypothesisTestCase):
    """Property-based tests for orienting a decomposition towards a vertex set"""

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_property_trap_outcome_bounds(self, data):
        """
        Property: trap returns a sink holding at least |w| - deg(|w| - t) elements of w,
        or an edge with at least |w| - t + 1 elements of w on each side
        """
        lg = G(2, 2, 2)
        td = build_flat(lg)
        w = data.draw(st.sets(st.sampled_from(range(lg.graph.vertex_count)), min_size=1, max_size=9))
        t = data.draw(st.integers(min_value=len(w) // 2 + 1, max_value=len(w)))
        outcome = trap(td, w, t)

        # Verify the bound that applies to the outcome
        if isinstance(outcome, Sink):
            self.assertEqual(outcome.hits, len(w & outcome.bag))
            self.assertGreaterEqual(outcome.hits, outcome.bound)
            self.assertEqual(outcome.bound, len(w) - outcome.degree * (len(w) - t))
        else:
            self.assertIsInstance(outcome, BalancedEdge)
            self.assertGreaterEqual(min(outcome.sides), len(w) - t + 1)


class DecompositionUnitTests(SimpleTestCase):
    """Unit tests for validation and the constructions for G_{h,d,m}"""

    def test_flat_decomposition_is_valid(self):
        for params in [(1, 1, 2), (1, 2, 2), (2, 2, 2), (1, 2, 3)]:
            lg = G(*params)
            cert = validate(lg.graph, build_flat(lg))
            self.assertEqual(cert.verdict, Verdict.PASS, msg=str(params))

    def test_recursive_decomposition_is_valid(self):
        for params in [(1, 2, 3), (2, 1, 3)]:
            lg = G(*params)
            td = build_recursive(lg)
            self.assertEqual(validate(lg.graph, td).verdict, Verdict.PASS, msg=str(params))
            self.assertGreater(td.node_count(), build_flat(lg).node_count())

    def test_recursive_equals_flat_for_base_graphs(self):
        lg = G(1, 2, 2)
        self.assertEqual(build_recursive(lg), build_flat(lg))

    def test_adhesions_match_triangle_boundaries(self):
        for params in [(2, 2, 2), (1, 2, 3)]:
            lg = G(*params)
            self.assertEqual(adhesion_mismatches(lg, build_flat(lg)), [])
        lg = G(1, 2, 3)
        self.assertEqual(adhesion_mismatches(lg, build_recursive(lg)), [])

    def test_bag_profile_covers_skeleton_bags(self):
        lg = G(2, 2, 2)
        td = build_flat(lg)
        profile = bag_profile(lg, td)
        self.assertEqual(len(profile), len(lg.tree_nodes))
        for sets, leftover in profile.values():
            self.assertGreaterEqual(sets, 1)
            self.assertGreaterEqual(leftover, 1)

    def test_missing_vertex_fails_coverage(self):
        td = TreeDecomposition.from_bags([], [{0, 1}])
        cert = validate(path_graph(3), td)
        self.assertEqual(cert.verdict, Verdict.FAIL)
        self.assertEqual(cert.witness, {'condition': 'T1', 'vertex': 2})

    def test_missing_edge_fails_coverage(self):
        td = TreeDecomposition.from_bags([(0, 1)], [{0, 1}, {2}])
        cert = validate(path_graph(3), td)
        self.assertEqual(cert.witness, {'condition': 'T1', 'edge': [1, 2]})

    def test_scattered_vertex_fails_connectivity(self):
        td = TreeDecomposition.from_bags([(0, 1), (1, 2)], [{0, 1}, {1, 2}, {0}])
        cert = validate(path_graph(3), td)
        self.assertEqual(cert.verdict, Verdict.FAIL)
        self.assertEqual(cert.witness['condition'], 'T2')
        self.assertEqual(cert.witness['vertex'], 0)

    def test_non_tree_is_rejected(self):
        td = TreeDecomposition.from_bags([(0, 1), (1, 2), (0, 2)], [{0}, {1}, {2}])
        with self.assertRaises(StructuralError):
            validate(path_graph(3), td)

    def test_width_and_induced_separation(self):
        td = path_decomposition(4)
        width, adhesions = width_and_adhesions(td)
        self.assertEqual(width, 1)
        self.assertEqual(adhesions[(0, 1)], frozenset({1}))

        separation = induced_separation(path_graph(4), td, (0, 1))
        self.assertEqual(separation.side_a, frozenset({0, 1}))
        self.assertEqual(separation.side_b, frozenset({1, 2, 3}))
        self.assertEqual(separation.order, 1)
        self.assertIsNone(separation.validate(path_graph(4)))

    def test_induced_separation_needs_tree_edge(self):
        with self.assertRaises(PreconditionError):
            induced_separation(path_graph(4), path_decomposition(4), (0, 2))

    def test_trap_finds_sink(self):
        outcome = trap(path_decomposition(4), {0, 1, 2, 3}, 3)
        self.assertEqual(outcome, Sink(node=1, bag=frozenset({1, 2}), hits=2, degree=2, bound=2))

    def test_trap_finds_balanced_edge(self):
        outcome = trap(path_decomposition(4), {0, 3}, 2)
        self.assertIsInstance(outcome, BalancedEdge)
        self.assertEqual(outcome.edge, (0, 1))
        self.assertEqual(outcome.adhesion, frozenset({1}))
        self.assertEqual(outcome.sides, (1, 1))

    def test_trap_threshold_must_exceed_half(self):
        with self.assertRaises(ThresholdError):
            trap(path_decomposition(4), {0, 1, 2, 3}, 2)
