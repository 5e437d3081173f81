import unittest
import logging
import numpy as np
from src.python.solver.time_stepping import RK4, uniform_steps

class TestRK4(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.stepper = RK4(lambda v, y: y)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_exponential_growth(self):
        states = self.stepper.integrate(np.array([1.0]), 1.0, 10)
        self.assertEqual(states.shape, (11, 1))
        self.assertLess(abs(states[-1, 0] - np.e), 1e-5)

    def test_fourth_order_convergence(self):
        errors = [abs(self.stepper.integrate(np.array([1.0]), 1.0, steps)[-1, 0] - np.e)
                  for steps in (10, 20)]
        self.assertTrue(13 < errors[0] / errors[1] < 17)

    def test_step_returns_a_new_array(self):
        state = np.array([1.0, 2.0])
        result = self.stepper.step(0.0, state, 0.1)
        np.testing.assert_array_equal(state, [1.0, 2.0])
        self.assertIsNot(result, state)

    def test_time_dependent_right_hand_side(self):
        stepper = RK4(lambda v, y: np.cos(v) * np.ones_like(y))
        states = stepper.integrate(np.zeros(1), np.pi / 2, 50)
        self.assertAlmostEqual(states[-1, 0], 1.0, places=7)

    def test_uniform_steps(self):
        self.assertEqual(uniform_steps(0.8, 1e-3), 800)
        self.assertEqual(uniform_steps(0.1, 1.0), 1)

if __name__ == '__main__':
    unittest.main()
