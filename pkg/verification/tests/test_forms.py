from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase as HypothesisTestCase

from verification.forms import ConstructionParamsForm, ExtractionForm, QIForm, SearchOptionsForm


class FormPropertyTests(HypothesisTestCase):
    """Property-based tests for option validation"""

    @given(h=st.integers(1, 6), d=st.integers(1, 6), m=st.integers(2, 6))
    @settings(max_examples=30, deadline=None)
    def test_property_valid_parameters_accepted(self, h, d, m):
        """
        Property: any h >= 1, d >= 1, m >= 2 passes validation unchanged
        """
        form = ConstructionParamsForm(data={'h': h, 'd': d, 'm': m})
        self.assertTrue(form.is_valid())
        self.assertEqual((form.cleaned_data['h'], form.cleaned_data['d'], form.cleaned_data['m']), (h, d, m))

    @given(vertices=st.lists(st.integers(0, 500), min_size=1, max_size=8))
    @settings(max_examples=30, deadline=None)
    def test_property_vertex_lists_parse(self, vertices):
        """
        Property: comma-separated ids parse into a sorted list without duplicates
        """
        form = SearchOptionsForm(data={'a': ','.join(str(v) for v in vertices)})
        self.assertTrue(form.is_valid())
        self.assertEqual(form.cleaned_data['a'], sorted(set(vertices)))


class FormUnitTests(SimpleTestCase):
    """Unit tests for the command option forms"""

    def test_parameters_are_optional_together(self):
        self.assertTrue(ConstructionParamsForm(data={}).is_valid())
        form = ConstructionParamsForm(data={'h': 1, 'd': 2})
        self.assertFalse(form.is_valid())
        self.assertIn('__all__', form.errors)

    def test_invalid_parameters(self):
        self.assertFalse(ConstructionParamsForm(data={'h': 1, 'd': 2, 'm': 1}).is_valid())
        self.assertFalse(ConstructionParamsForm(data={'h': 0, 'd': 2, 'm': 2}).is_valid())
        self.assertFalse(ConstructionParamsForm(data={'h': 'x', 'd': 2, 'm': 2}).is_valid())

    def test_search_options(self):
        form = SearchOptionsForm(data={'K': 2, 'host': '', 'b': '3, 1', 'budget': 0})
        self.assertTrue(form.is_valid())
        self.assertIsNone(form.cleaned_data['host'])
        self.assertEqual(form.cleaned_data['b'], [1, 3])
        self.assertEqual(form.cleaned_data['budget'], 0)
        self.assertFalse(SearchOptionsForm(data={'K': -1}).is_valid())
        self.assertFalse(SearchOptionsForm(data={'w': '1,x'}).is_valid())
        self.assertFalse(SearchOptionsForm(data={'w': '-1'}).is_valid())

    def test_qi_defaults(self):
        form = QIForm(data={'M': 2})
        self.assertTrue(form.is_valid())
        self.assertEqual(form.cleaned_data['map'], 'identity')
        self.assertFalse(QIForm(data={'M': 0}).is_valid())
        self.assertFalse(QIForm(data={'map': 'rotation'}).is_valid())

    def test_map_file_options(self):
        self.assertTrue(QIForm(data={'map_file': 'f.json', 'target': 'cycle:3'}).is_valid())
        self.assertFalse(QIForm(data={'target': 'cycle:3'}).is_valid())
        self.assertFalse(QIForm(data={'map_file': 'f.json', 'map': 'subdivision'}).is_valid())

    def test_overrides(self):
        form = ExtractionForm(data={'override': ['q=1', 'root_radius=0']})
        self.assertTrue(form.is_valid())
        self.assertEqual(form.cleaned_data['override'], {'q': 1, 'root_radius': 0})
        empty = ExtractionForm(data={})
        self.assertTrue(empty.is_valid())
        self.assertEqual(empty.cleaned_data['override'], {})
        self.assertFalse(ExtractionForm(data={'override': ['K=1']}).is_valid())
        self.assertFalse(ExtractionForm(data={'override': ['q']}).is_valid())
        self.assertFalse(ExtractionForm(data={'override': ['q=x']}).is_valid())
        self.assertFalse(ExtractionForm(data={'override': ['q=-2']}).is_valid())
