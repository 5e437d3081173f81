import unittest
import logging
import numpy as np
from src.python.geometry.lorentz import (
    CausalClass, LVec3, classify, lorentz_cross, lorentz_norm_squared, minkowski_dot,
    rotate_vertical, stereographic, upward_normal_from_gradient
)
from src.python.utilities.errors import DomainError

class TestLorentzGeometry(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.rng = np.random.default_rng(7)

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_minkowski_dot_signature(self):
        self.assertEqual(minkowski_dot(LVec3(1, 2, 3), LVec3(4, 5, 6)), -4.0)
        self.assertEqual(lorentz_norm_squared(LVec3(0, 0, 1)), -1.0)

    def test_minkowski_dot_broadcasts_and_is_bilinear_on_complex(self):
        a = self.rng.normal(size=(5, 4, 3))
        self.assertEqual(minkowski_dot(a, a).shape, (5, 4))
        w = np.array([1.0, 1j, 0.0])
        # Bilinear, not Hermitian: 1 + i² = 0.
        self.assertEqual(minkowski_dot(w, w), 0)

    def test_cross_of_basis_vectors(self):
        e1, e2 = LVec3(1, 0, 0), LVec3(0, 1, 0)
        self.assertEqual(lorentz_cross(e1, e2), LVec3(0.0, 0.0, 1.0))

    def test_cross_is_orthogonal_and_matches_determinant(self):
        a, b, c = self.rng.normal(size=(3, 3))
        w = lorentz_cross(a, b)
        self.assertAlmostEqual(minkowski_dot(w, a), 0.0, places=12)
        self.assertAlmostEqual(minkowski_dot(w, b), 0.0, places=12)
        self.assertAlmostEqual(minkowski_dot(w, c), -np.linalg.det(np.vstack([a, b, c])), places=12)

    def test_cross_returns_array_for_array_input(self):
        w = lorentz_cross(np.array([1.0, 0, 0]), LVec3(0, 1, 0))
        self.assertIsInstance(w, np.ndarray)

    def test_stereographic_projection(self):
        self.assertEqual(stereographic(LVec3(0, 0, 1)), 0j)
        t = 0.8
        value = stereographic(LVec3(np.sinh(t), 0, np.cosh(t)))
        self.assertAlmostEqual(value.real, np.tanh(t / 2), places=14)
        with self.assertRaises(DomainError):
            stereographic(LVec3(0, 0, -1))

    def test_classify(self):
        self.assertEqual(classify(LVec3(1, 0, 1)), CausalClass.NULL)
        self.assertEqual(classify(LVec3(1, 0, 0)), CausalClass.SPACELIKE)
        self.assertEqual(classify(LVec3(0, 0, 1)), CausalClass.TIMELIKE)
        self.assertEqual(classify(LVec3(1, 0, 1 + 1e-3), tol=1e-2), CausalClass.NULL)
        with self.assertRaises(DomainError):
            classify(LVec3(1, 0, 0), tol=-1.0)

    def test_rotate_vertical_shifts_the_radial_ansatz(self):
        u = np.linspace(0, 2 * np.pi, 9)
        f, h, theta = 0.3, -0.2, 0.7
        p0 = np.array([1.0, -2.0, 0.5])

        def ansatz(angle):
            return p0 + np.stack([f * np.cos(angle), -f * np.sin(angle), np.full_like(angle, h)], axis=-1)

        rotated = rotate_vertical(ansatz(u), theta, p0)
        np.testing.assert_allclose(rotated, ansatz(u + theta), atol=1e-14)

    def test_rotate_vertical_is_an_isometry(self):
        v = self.rng.normal(size=(6, 3))
        rotated = rotate_vertical(v, 1.3)
        np.testing.assert_allclose(minkowski_dot(rotated, rotated), minkowski_dot(v, v), atol=1e-13)
        self.assertIsInstance(rotate_vertical(LVec3(1, 0, 0), np.pi / 2), LVec3)

    def test_upward_normal_from_gradient(self):
        self.assertEqual(upward_normal_from_gradient(0.0, 0.0), LVec3(0.0, 0.0, 1.0))
        normal = upward_normal_from_gradient(np.array([0.3, 0.1]), np.array([0.4, -0.2]))
        np.testing.assert_allclose(minkowski_dot(normal, normal), [-1.0, -1.0], atol=1e-14)
        with self.assertRaises(DomainError):
            upward_normal_from_gradient(1.0, 0.0)

    def test_lvec3_arithmetic(self):
        a, b = LVec3(1, 2, 3), LVec3(0.5, 0.5, 0.5)
        self.assertEqual(a - b + b, a)
        self.assertEqual(a.scale(2), LVec3(2, 4, 6))
        with self.assertRaises(ValueError):
            LVec3.from_array([1.0, 2.0])

if __name__ == '__main__':
    unittest.main()
