import json
import tempfile
from io import StringIO
from pathlib import Path

from django.test import TestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.django import TestCase as HypothesisTestCase

from verification.cli import run
from verification.construction import ConstructionParams, count_vertices
from verification.models import CertificateRecord


def invoke(*argv):
    """Run a lab command in process; returns (exit code, stdout, stderr)"""
    out, err = StringIO(), StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class CommandLinePropertyTests(HypothesisTestCase):
    """Property-based tests for the command surface"""

    @given(h=st.integers(1, 2), d=st.integers(1, 3))
    @settings(max_examples=6, deadline=None)
    def test_property_build_reports_vertex_count(self, h, d):
        """
        Property: build prints a labeled graph whose vertex count matches the closed form
        """
        code, out, _ = invoke('build', '--h', str(h), '--d', str(d), '--m', '2')
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload['n'], count_vertices(ConstructionParams(h, d, 2)))
        self.assertEqual(payload['params'], {'h': h, 'd': d, 'm': 2})


class CommandLineTests(TestCase):
    """Exit codes and outputs of the lab commands"""

    def test_build(self):
        code, out, _ = invoke('build', '--h', '1', '--d', '2', '--m', '2')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['n'], 17)

    def test_inspect(self):
        code, out, _ = invoke('inspect', '--h', '1', '--d', '2', '--m', '2', 'root', 'leaf:2')
        self.assertEqual(code, 0)
        answers = json.loads(out)
        self.assertEqual(answers['root'], 0)
        self.assertEqual(answers['leaf:2'], 2)

    def test_inspect_unknown_landmark(self):
        code, _, err = invoke('inspect', '--h', '1', '--d', '2', '--m', '2', 'V:9,9')
        self.assertEqual(code, 3)
        self.assertTrue(err)

    def test_failing_claim_exits_one(self):
        code, out, _ = invoke('verify', 'obs32', '--h', '1', '--d', '2', '--m', '3')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(out)['verdict'], 'fail')

    def test_exhausted_search_exits_zero(self):
        code, out, _ = invoke('verify', 'menger-pair', '--h', '1', '--d', '2', '--m', '2', '--K', '3',
                              '--avoid-root')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['verdict'], 'exhausted_none')

    def test_recursive_decomposition(self):
        code, out, _ = invoke('verify', 'td', '--h', '1', '--d', '2', '--m', '3', '--recursive')
        self.assertEqual(code, 0)
        cert = json.loads(out)
        self.assertEqual(cert['verdict'], 'pass')
        self.assertTrue(cert['params']['recursive'])

    def test_budget_exceeded_exits_two(self):
        code, out, _ = invoke('search', 'fat-model', '--host', 'cycle:6', '--pattern', 'complete:3',
                              '--K', '1', '--budget', '0')
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)['mode'], {'kind': 'budgeted', 'node_limit': 0})

    def test_found_search(self):
        code, out, _ = invoke('search', 'fat-model', '--host', 'cycle:6', '--pattern', 'complete:3',
                              '--K', '1')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['verdict'], 'found')

    def test_sampled_run_prints_seed(self):
        code, out, err = invoke('verify', 'menger-sep', '--h', '1', '--d', '2', '--m', '2', '--l', '0',
                                '--samples', '5', '--seed', '11')
        self.assertIn(code, (0, 1))
        self.assertIn('seed: 11', err)
        self.assertEqual(json.loads(out)['mode'], {'kind': 'sampled', 'count': 5, 'seed': 11})

    def test_lemma_sweep(self):
        code, out, err = invoke('verify', 'lemma22', '--host', 'grid:3,3', '--map', 'subdivision',
                                '--M', '2', '--A', '1', '--samples', '5')
        self.assertIn(code, (0, 1))
        self.assertIn('seed: 20240611', err)
        self.assertEqual(json.loads(out)['mode']['kind'], 'sampled')

    def test_separator_sweep_tests_the_conclusion(self):
        code, out, _ = invoke('verify', 'lemma24', '--host', 'grid:8,8', '--map', 'identity',
                              '--M', '1', '--A', '0', '--samples', '10')
        self.assertEqual(code, 0)
        cert = json.loads(out)
        self.assertEqual(cert['verdict'], 'pass')
        self.assertEqual(cert['stats']['checked'], 10)
        self.assertEqual(cert['stats']['exercised'], 10)
        self.assertEqual(cert['notes'], [])

    def test_usage_errors_exit_three(self):
        self.assertEqual(invoke()[0], 3)
        self.assertEqual(invoke('frobnicate')[0], 3)
        self.assertEqual(invoke('verify', 'obs32')[0], 3)
        self.assertEqual(invoke('verify', 'obs32', '--h', '1', '--d', '2', '--m', '1')[0], 3)
        self.assertEqual(invoke('verify', 'nonsense')[0], 3)
        self.assertEqual(invoke('verify', 'menger-pair', '--h', '1', '--d', '2', '--m', '2')[0], 3)
        self.assertEqual(invoke('extract', 'kn', '--h', '2', '--d', '2', '--m', '2', '--n', '1',
                                '--override', 'K=2')[0], 3)

    def test_extraction(self):
        code, out, _ = invoke('extract', 'kn', '--h', '2', '--d', '2', '--m', '2', '--n', '1')
        self.assertEqual(code, 0)
        cert = json.loads(out)
        self.assertEqual(cert['verdict'], 'found')
        self.assertEqual(cert['witness']['pattern'], {'n': 1, 'edges': []})

    def test_failed_extraction_exits_one(self):
        code, out, _ = invoke('extract', 'kn', '--h', '1', '--d', '2', '--m', '2', '--n', '2')
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(out)['witness']['stage'], 'family')

    def test_extraction_with_oversize_derived_constants(self):
        code, out, _ = invoke('extract', 'kn', '--h', '2', '--d', '2', '--m', '4', '--n', '3',
                              '--M', '2', '--A', '1', '--assume-qi')
        self.assertIn(code, (0, 1))
        cert = json.loads(out)

        # Verify the implied instance is flagged with a bit length instead of its size
        self.assertTrue(cert['params']['oversize'])
        self.assertIsNone(cert['params']['implied_vertices'])
        self.assertGreater(cert['params']['bit_length'], (50_000).bit_length())
        self.assertEqual(cert['params']['instance'], {'h': 2, 'd': 2, 'm': 4})

    def test_revalidate_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            cert_path = Path(tmp) / 'cert.json'
            graph_path = Path(tmp) / 'graph.json'

            # Create a certificate and the graph it talks about
            code, _, _ = invoke('verify', 'obs32', '--h', '1', '--d', '2', '--m', '3', '--out', str(cert_path))
            self.assertEqual(code, 1)
            self.assertEqual(invoke('build', '--h', '1', '--d', '2', '--m', '3', '--out', str(graph_path))[0], 0)

            # Verify the witness holds up with and without the graph file
            code, out, _ = invoke('revalidate', str(cert_path))
            self.assertEqual(code, 0)
            self.assertEqual(json.loads(out)['params']['claim'], 'obs32')
            self.assertEqual(invoke('revalidate', str(cert_path), str(graph_path))[0], 0)

    def test_map_file_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            map_path = Path(tmp) / 'map.json'
            cert_path = Path(tmp) / 'cert.json'

            # Write the identity map of a path and check it from the file
            code, _, _ = invoke('export', '--host', 'path:5', '--format', 'map', '--out', str(map_path))
            self.assertEqual(code, 0)
            self.assertEqual(json.loads(map_path.read_text()), {'assignment': [0, 1, 2, 3, 4]})
            code, out, _ = invoke('verify', 'qi', '--host', 'path:5', '--map-file', str(map_path),
                                  '--target', 'path:5', '--out', str(cert_path))
            self.assertEqual(code, 0)
            cert = json.loads(cert_path.read_text())
            self.assertEqual(cert['verdict'], 'pass')
            self.assertEqual(cert['params']['map'], 'file')
            self.assertEqual(invoke('revalidate', str(cert_path))[0], 0)

            # Verify a map that does not fit its target is a usage error
            self.assertEqual(invoke('verify', 'qi', '--host', 'path:6', '--map-file', str(map_path))[0], 3)
        self.assertEqual(invoke('verify', 'qi', '--host', 'path:5', '--target', 'path:5')[0], 3)
        self.assertEqual(invoke('verify', 'qi', '--host', 'path:5', '--map-file', '/nonexistent/map.json')[0], 3)

    def test_revalidate_missing_file(self):
        self.assertEqual(invoke('revalidate', '/nonexistent/cert.json')[0], 3)

    def test_unwritable_output_exits_one(self):
        code, _, err = invoke('build', '--h', '1', '--d', '2', '--m', '2', '--out', '/nonexistent/dir/g.json')
        self.assertEqual(code, 1)
        self.assertIn('cannot write', err)

    def test_export_dot(self):
        code, out, _ = invoke('export', '--h', '1', '--d', '2', '--m', '2')
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith('graph G_1_2_2 {'))

        code, out, _ = invoke('export', '--host', 'cycle:4', '--format', 'json')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['n'], 4)

    def test_record_and_ledger(self):
        code, _, _ = invoke('verify', 'obs32', '--h', '2', '--d', '2', '--m', '2', '--record')
        self.assertEqual(code, 0)
        self.assertEqual(CertificateRecord.objects.count(), 1)

        code, out, _ = invoke('ledger', '--claim', 'obs32')
        self.assertEqual(code, 0)
        self.assertIn('obs32', out)
        self.assertIn('pass', out)
