import unittest
import logging
from src.python.utilities.config_validator import ConfigValidator, load_default_tolerances
from src.python.utilities.errors import ConfigError

class TestConfigValidator(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.validator = ConfigValidator()

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_valid_config(self):
        self.assertTrue(self.validator.validate_config({'mode': 'solve', 'A': [0.25], 'n': 32}))

    def test_violation_reports_key_and_line(self):
        with self.assertRaises(ConfigError) as ctx:
            self.validator.validate_config({'mode': 'solve', 'v_max': -1.0}, lines={'mode': 1, 'v_max': 4})
        self.assertEqual(ctx.exception.code, 'schema_violation')
        self.assertEqual(ctx.exception.line, 4)
        self.assertIn('v_max', str(ctx.exception))

    def test_unknown_schema(self):
        with self.assertRaises(ConfigError):
            self.validator.validate_config({'mode': 'solve'}, 'routing')

    def test_defaults(self):
        defaults = self.validator.defaults()
        self.assertEqual(defaults['n'], 64)
        self.assertEqual(defaults['formats'], ['csv', 'report'])

    def test_template(self):
        template = self.validator.generate_config_template()
        self.assertIn("n=64\n", template)
        self.assertIn("# tol.conformality=1e-06\n", template)
        self.assertIn("A=<A>\n", template)
        self.assertIn("formats=csv,report\n", template)

    def test_default_tolerances(self):
        tolerances = load_default_tolerances()
        self.assertEqual(tolerances['equivariance'], 1e-9)
        self.assertEqual(tolerances['oracle_v'], 0.3)
        self.assertEqual(tolerances['gauss_normal'], 1e-4)
        self.assertIsNot(tolerances, load_default_tolerances())

if __name__ == '__main__':
    unittest.main()
