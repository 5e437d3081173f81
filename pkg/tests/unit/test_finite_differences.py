import unittest
import logging
import numpy as np
from src.python.analysis.finite_differences import derivative_at, derivative_rows, stencil_weights
from src.python.utilities.errors import DomainError

class TestFiniteDifferences(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_classic_stencils(self):
        np.testing.assert_allclose(stencil_weights((-1, 0, 1), 2), [1.0, -2.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(stencil_weights((-1, 0, 1), 1), [-0.5, 0.0, 0.5], atol=1e-14)
        np.testing.assert_allclose(stencil_weights((0, 1), 1), [-1.0, 1.0], atol=1e-14)

    def test_weights_are_read_only(self):
        weights = stencil_weights((-2, -1, 0, 1, 2), 1)
        with self.assertRaises(ValueError):
            weights[0] = 0.0

    def test_order_must_fit_the_stencil(self):
        with self.assertRaises(DomainError):
            stencil_weights((0, 1), 2)

    def test_fourth_order_accuracy_including_ends(self):
        h = 0.01
        x = np.arange(101) * h
        derivative = derivative_rows(np.sin(x), h, order=1, accuracy=4)
        self.assertLess(np.max(np.abs(derivative - np.cos(x))), 1e-7)

    def test_error_decreases_at_the_stencil_order(self):
        errors = []
        for h in (0.02, 0.01):
            x = np.arange(int(round(1 / h)) + 1) * h
            derivative = derivative_rows(np.exp(x), h, order=1, accuracy=4)
            errors.append(np.max(np.abs(derivative - np.exp(x))))
        self.assertGreater(np.log2(errors[0] / errors[1]), 3.5)

    def test_sixth_order_second_derivative_is_exact_on_quintics(self):
        h = 0.1
        x = np.arange(21) * h
        derivative = derivative_rows(x ** 5, h, order=2, accuracy=6)
        self.assertLess(np.max(np.abs(derivative - 20 * x ** 3)), 1e-8)

    def test_axis_and_selected_rows(self):
        values = np.tile(np.arange(8.0) ** 2, (3, 1))
        derivative = derivative_rows(values, 1.0, order=1, accuracy=4, axis=1)
        np.testing.assert_allclose(derivative, np.tile(2 * np.arange(8.0), (3, 1)), atol=1e-10)
        first = derivative_rows(values, 1.0, axis=1, rows=[0])
        self.assertEqual(first.shape, (3, 1))
        np.testing.assert_allclose(derivative_at(values, 3, 1.0, axis=1), [6.0, 6.0, 6.0], atol=1e-10)

    def test_too_few_samples(self):
        with self.assertRaises(DomainError):
            derivative_rows(np.arange(3.0), 1.0, order=1, accuracy=4)

if __name__ == '__main__':
    unittest.main()
