import asyncio
import unittest
import logging
import tempfile
from pathlib import Path
from unittest.mock import patch

import pandas as pd

from src.python.cli.config_parser import parse_config
from src.python.cli.main import main
from src.python.cli.pipeline import EXIT_CHECK_FAILED, EXIT_FAILURE, EXIT_OK, PipelineRunner, run_sweep
from src.python.solver.cauchy_solver import CauchySolver
from src.python.utilities.errors import SolverError

class TestPipelineIntegration(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()
        logging.disable(logging.NOTSET)

    def _config(self, text: str, out: str):
        return parse_config(text + f"\nout_dir={self.root / out}")

    def _failed(self, report):
        return [c.name for c in report.checks if not c.passed]

    def test_radial_run(self):
        config = self._config(
            "mode=radial\nA=-0.25\nH=1\nn=32\nv_max=0.8\nformats=csv,obj,profile,graph,report", 'radial'
        )
        exit_code, report = PipelineRunner(config).run()

        self.assertEqual(exit_code, EXIT_OK, self._failed(report))
        self.assertEqual(report.artifacts, ['graph.csv', 'surface.csv', 'surface.obj', 'profile.csv'])
        for name in report.artifacts + ['report.txt']:
            self.assertTrue((self.root / 'radial' / name).exists(), name)
        self.assertEqual(report.solver['cone'], 'lower')
        self.assertLess(report.check('radial_residual').value, 1e-7)
        self.assertEqual(report.check('boundary_degree').value, 1.0)
        self.assertLess(report.check('gauss_normal').value, 1e-10)
        self.assertAlmostEqual(report.solver['A_mean'], -0.25, places=12)

        text = (self.root / 'radial' / 'report.txt').read_text(encoding='utf-8')
        self.assertTrue(text.startswith('report: conelike-diagnostics\nmode: radial\nverdict: pass\nexit_code: 0\n'))
        self.assertIn('config.A: -0.25\n', text)

    def test_solve_run(self):
        config = self._config("mode=solve\nA=-0.25\nn=32\nv_max=0.5", 'solve')
        exit_code, report = PipelineRunner(config).run()

        self.assertEqual(exit_code, EXIT_OK, self._failed(report))
        self.assertFalse(report.solver['degraded'])
        self.assertEqual(report.solver['degradation_reason'], 'none')
        self.assertLess(report.check('radial_agreement').value, 1e-6)
        self.assertLess(report.check('round_trip').value, 1e-10)
        self.assertLess(report.check('equivariance').value, 1e-9)
        self.assertEqual(len(report.solver['residual_history'].split(',')), 11)
        self.assertTrue(report.check('gauss_normal').passed)

    def test_short_solve_reports_missing_interior_rows(self):
        config = self._config("mode=solve\nA=-0.25\nH=1\nn=16\nv_max=0.04", 'short')
        exit_code, report = PipelineRunner(config).run()

        self.assertEqual(exit_code, EXIT_CHECK_FAILED)
        self.assertEqual(report.errors, [])
        for name in ('gauss_pde', 'weierstrass'):
            self.assertFalse(report.check(name).passed)
            self.assertEqual(report.check(name).code, 'no_interior_rows')
        self.assertTrue(report.check('conformality').passed)
        text = (self.root / 'short' / 'report.txt').read_text(encoding='utf-8')
        self.assertIn('check.gauss_pde.code: no_interior_rows\n', text)
        self.assertIn('exit_code: 2\n', text)

    def test_tampered_surface_fails_checks(self):
        config = self._config("mode=radial\nA=-0.25\nn=16\nv_max=0.3", 'source')
        self.assertEqual(PipelineRunner(config).run()[0], EXIT_OK)

        source = self.root / 'source' / 'surface.csv'
        frame = pd.read_csv(source, float_precision='round_trip')
        frame['z'] = frame['z'] * 1.05
        tampered = self.root / 'tampered.csv'
        frame.to_csv(tampered, index=False, float_format='%.17g')

        check = self._config(f"mode=check\nA=-0.25\ninput={tampered}", 'check')
        exit_code, report = PipelineRunner(check).run()
        self.assertEqual(exit_code, EXIT_CHECK_FAILED)
        self.assertFalse(report.check('boundary_null').passed)
        self.assertTrue((self.root / 'check' / 'report.txt').exists())

    def test_extract_and_export_from_surface(self):
        config = self._config("mode=radial\nA=-0.25\nn=16\nv_max=0.3", 'source')
        PipelineRunner(config).run()
        source = self.root / 'source' / 'surface.csv'

        exit_code, report = PipelineRunner(self._config(f"mode=extract\ninput={source}", 'extract')).run()
        self.assertNotEqual(exit_code, EXIT_FAILURE)
        self.assertEqual(report.solver['cone'], 'lower')
        self.assertTrue((self.root / 'extract' / 'null_curve.csv').exists())

        exit_code, report = PipelineRunner(
            self._config(f"mode=export\ninput={source}\nformats=csv,obj", 'export')
        ).run()
        self.assertEqual(exit_code, EXIT_OK)
        self.assertEqual(report.artifacts, ['surface.csv', 'surface.obj'])
        self.assertEqual((self.root / 'export' / 'surface.csv').read_bytes(), source.read_bytes())
        self.assertFalse((self.root / 'export' / 'report.txt').exists())

    def test_missing_input_is_a_run_failure(self):
        config = self._config(f"mode=check\ninput={self.root / 'absent.csv'}", 'missing')
        exit_code, report = PipelineRunner(config).run()
        self.assertEqual(exit_code, EXIT_FAILURE)
        self.assertEqual(report.errors[0]['code'], 'io_error')
        self.assertIn('verdict: fail', (self.root / 'missing' / 'report.txt').read_text(encoding='utf-8'))

    @patch.object(CauchySolver, 'march')
    def test_solver_failure_maps_to_exit_one(self, mock_march):
        mock_march.side_effect = SolverError("March degraded immediately", code='immediate_degradation')
        config = self._config("mode=solve\nA=0.25\nn=16", 'failed')
        exit_code, report = PipelineRunner(config).run()

        self.assertEqual(exit_code, EXIT_FAILURE)
        self.assertEqual(report.errors[0]['code'], 'immediate_degradation')
        self.assertEqual(report.checks, [])
        mock_march.assert_called_once()
        self.assertFalse((self.root / 'failed' / 'surface.csv').exists())

    def test_main_rejects_invalid_config(self):
        conf = self.root / 'bad.conf'
        out = self.root / 'never'
        conf.write_text(f"mode=solve\nA=0.25\nn=63\nout_dir={out}\n", encoding='utf-8')
        self.assertEqual(main(['solve', '--config', str(conf)]), EXIT_FAILURE)
        self.assertFalse(out.exists())
        self.assertEqual(main(['solve', '--A', '0.25', '--tol', 'maineq']), EXIT_FAILURE)
        self.assertEqual(main(['solve', '--config', str(self.root / 'absent.conf')]), EXIT_FAILURE)

    def test_main_with_flags(self):
        out = self.root / 'flags'
        code = main(['radial', '--A', '-0.25', '--n', '16', '--v-max', '0.3',
                     '--out-dir', str(out), '--tol', 'maineq=1e-3', '--log-level', 'CRITICAL'])
        self.assertEqual(code, EXIT_OK)
        text = (out / 'report.txt').read_text(encoding='utf-8')
        self.assertIn('config.tol.maineq: 0.001\n', text)

    def test_sweep(self):
        configs = [
            self._config("mode=radial\nA=-0.25\nn=16\nv_max=0.4", 'sweep_a'),
            self._config("mode=radial\nA=-0.25\nn=32\nv_max=0.4", 'sweep_b'),
            self._config("mode=radial\nA=-0.25\nn=16\nv_max=0.4\nformats=csv", 'sweep_c'),
        ]
        loop = asyncio.new_event_loop()
        try:
            results = loop.run_until_complete(run_sweep(configs))
        finally:
            loop.close()

        self.assertEqual([code for code, _ in results], [EXIT_OK, EXIT_OK, EXIT_OK])
        self.assertEqual(results[1][1].config_echo['n'], '32')

        single, report = PipelineRunner(configs[0]).run()
        self.assertEqual(report.render(single), results[0][1].render(results[0][0]))

if __name__ == '__main__':
    unittest.main()
