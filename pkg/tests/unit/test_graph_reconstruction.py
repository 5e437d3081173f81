import unittest
import logging
from dataclasses import replace
import numpy as np
from src.python.spectral.periodic_field import grid_nodes
from src.python.solver.cauchy_solver import SurfacePatch
from src.python.solver.curvature import PrescribedCurvature
from src.python.radial.radial_solutions import closed_form_profile, radial_surface
from src.python.analysis.gauss_map import gauss_map, gauss_normal_check
from src.python.graph.graph_reconstruction import GraphGrid, GraphReconstructor
from src.python.utilities.errors import EllipticityError, ReconstructionError

def polar_grid(radii, n=16):
    theta = grid_nodes(n)
    radii = np.asarray(radii, dtype=float)[:, None]
    return radii * np.cos(theta), radii * np.sin(theta)

def hyperboloid(radii):
    """z = √(1 + x² + y²), a graph of constant mean curvature 1."""
    x, y = polar_grid(radii)
    z = np.sqrt(1 + x ** 2 + y ** 2)
    return GraphGrid.from_samples(
        x, y, z, p=x / z, q=y / z,
        r=(1 + y ** 2) / z ** 3, s=-x * y / z ** 3, t=(1 + x ** 2) / z ** 3
    )

def upper_rows(gg, v_min):
    """Sub-grid of the rows at or above v_min."""
    keep = gg.v_levels >= v_min
    return replace(
        gg, x=gg.x[keep], y=gg.y[keep], z=gg.z[keep], p=gg.p[keep], q=gg.q[keep],
        r=gg.r[keep], s=gg.s[keep], t=gg.t[keep], v_levels=gg.v_levels[keep], rows=gg.rows[keep]
    )

class TestGraphGrid(unittest.TestCase):

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.reconstructor = GraphReconstructor()
        self.H = PrescribedCurvature.parse("1")

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_hyperboloid_solves_the_main_equation(self):
        gg = hyperboloid([0.1, 0.3, 0.5])
        self.assertLess(self.reconstructor.maineq_residual(gg, self.H), 1e-14)
        self.assertLess(gg.beltrami().identity_error(), 1e-15)
        self.assertGreater(self.reconstructor.maineq_residual(gg, PrescribedCurvature.parse("2")), 0.1)

    def test_ellipticity_violation(self):
        gg = replace(hyperboloid([0.1, 0.3]), p=np.full((2, 16), 0.8), q=np.full((2, 16), 0.8))
        with self.assertRaises(EllipticityError) as ctx:
            self.reconstructor.maineq_residual(gg, self.H)
        self.assertEqual(len(ctx.exception.offending), 32)

    def test_cone_ratio(self):
        x, y = polar_grid([0.1, 0.2])
        z = 0.99 * np.hypot(x, y)
        zeros = np.zeros_like(x)
        gg = GraphGrid.from_samples(x, y, z, zeros, zeros, zeros, zeros, zeros)
        np.testing.assert_allclose(self.reconstructor.cone_ratio(gg), [0.0199, 0.0199], atol=1e-12)

    def test_hyperboloid_stays_away_from_the_cone(self):
        # z² / (x² + y²) − 1 = 1 / ρ² for the hyperboloid over the origin.
        deviation = self.reconstructor.cone_ratio(hyperboloid([0.1, 0.3, 0.5]))
        np.testing.assert_allclose(deviation, [100.0, 1 / 0.09, 4.0], rtol=1e-12)
        self.assertTrue(np.all(np.diff(deviation) < 0))

    def test_planar_hessian_vanishes(self):
        x, y = polar_grid([0.1, 0.2])
        zeros = np.zeros_like(x)
        gg = GraphGrid.from_samples(x, y, 0.1 * x + 0.2 * y, np.full_like(x, 0.1), np.full_like(x, 0.2),
                                    zeros, zeros, zeros)
        report = self.reconstructor.hessian_sign(gg)
        self.assertTrue(report.vanishing)
        self.assertFalse(report.sign_constant)
        self.assertEqual(report.sign, 0)

    def test_mixed_sign_hessian(self):
        x, y = polar_grid([0.1, 0.2])
        zeros, ones = np.zeros_like(x), np.ones_like(x)
        r = np.where(np.arange(16) % 2 == 0, 1.0, -1.0) * ones
        gg = GraphGrid.from_samples(x, y, zeros, zeros, zeros, r, zeros, ones)
        report = self.reconstructor.hessian_sign(gg)
        self.assertFalse(report.vanishing)
        self.assertFalse(report.sign_constant)
        self.assertEqual(report.sign, 0)
        self.assertEqual(report.min_abs, 1.0)

    def test_gradient_map_winding(self):
        x, y = polar_grid([0.1, 0.2])
        # p - iq = (x - iy)/z turns clockwise as the polar angle grows.
        winding = self.reconstructor.gradient_map_winding(hyperboloid([0.1, 0.2]))
        np.testing.assert_array_equal(winding['winding'], [-1, -1])
        conjugate = GraphGrid.from_samples(x, y, x, x, -y, x, x, x)
        np.testing.assert_array_equal(self.reconstructor.gradient_map_winding(conjugate)['winding'], [1, 1])

    def test_overlapping_rows(self):
        x, y = polar_grid([1.0, 0.5])
        zeros = np.zeros_like(x)
        gg = GraphGrid.from_samples(x, y, zeros, zeros, zeros, zeros, zeros, zeros)
        with self.assertRaises(ReconstructionError) as ctx:
            self.reconstructor.injectivity(gg)
        self.assertEqual(ctx.exception.code, 'overlap')
        self.assertTrue(GraphReconstructor(debug_injectivity=True).injectivity(hyperboloid([0.1, 0.2, 0.4])))

    def test_row_must_be_a_simple_curve(self):
        theta = grid_nodes(16)
        x2, y2 = 0.5 * np.cos(2 * theta)[None, :], 0.5 * np.sin(2 * theta)[None, :]
        zeros = np.zeros_like(x2)
        gg = GraphGrid.from_samples(x2, y2, zeros, zeros, zeros, zeros, zeros, zeros)
        with self.assertRaises(ReconstructionError):
            self.reconstructor.injectivity(gg)

class TestGraphReconstructor(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        logging.disable(logging.CRITICAL)
        cls.patch = radial_surface(closed_form_profile(0.8, 1e-3), n=32)
        cls.reconstructor = GraphReconstructor()
        cls.gg = cls.reconstructor.reconstruct(cls.patch)
        logging.disable(logging.NOTSET)

    def setUp(self):
        logging.disable(logging.CRITICAL)
        self.H = PrescribedCurvature.parse("1")

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def test_grid_layout(self):
        self.assertEqual(self.gg.x.shape, (800, 32))
        self.assertEqual(self.gg.rows[0], 1)
        self.assertAlmostEqual(self.gg.v_levels[0], 1e-3)

    def test_gradient_matches_the_meridian_slope(self):
        # |∇z| = h'/f' = cos v on the radial solution.
        slope = np.hypot(self.gg.p, self.gg.q)
        np.testing.assert_allclose(slope, np.cos(self.gg.v_levels)[:, None] * np.ones((1, 32)), atol=1e-12)

    def test_main_equation_and_beltrami_system(self):
        self.assertLess(self.reconstructor.maineq_residual(self.gg, self.H), 1e-4)
        self.assertLess(self.reconstructor.beltrami_check(self.patch, self.gg), 1e-6)

    def test_perturbed_gradient_breaks_the_beltrami_system(self):
        perturbed = replace(self.gg, q=self.gg.q + 0.01)
        self.assertGreater(self.reconstructor.beltrami_check(self.patch, perturbed), 1e-3)

    def test_gauss_map_is_the_projected_normal(self):
        g = gauss_map(self.patch)
        self.assertLess(gauss_normal_check(g, self.gg.p, self.gg.q, self.gg.rows), 1e-10)
        self.assertGreater(gauss_normal_check(g, 0.99 * self.gg.p, 0.99 * self.gg.q, self.gg.rows), 1e-3)

    def test_residuals_under_refinement(self):
        # The Beltrami system has no v-differencing, so it stays at rounding level.
        maineq = []
        for dv in (0.04, 0.02, 0.01):
            patch = radial_surface(closed_form_profile(0.8, dv), n=32)
            gg = self.reconstructor.reconstruct(patch)
            maineq.append(self.reconstructor.maineq_residual(upper_rows(gg, 0.1), self.H))
            self.assertLess(self.reconstructor.beltrami_check(patch, gg), 1e-9)
        self.assertGreater(np.log2(maineq[0] / maineq[1]), 2.0)
        self.assertGreater(np.log2(maineq[1] / maineq[2]), 2.0)

    def test_hessian_and_gradient_map(self):
        report = self.reconstructor.hessian_sign(self.gg)
        self.assertTrue(report.sign_constant)
        self.assertGreater(report.min_abs, 1e-12)
        winding = self.reconstructor.gradient_map_winding(self.gg)
        self.assertTrue(np.all(winding['winding'] == 1))

    def test_cone_asymptotics(self):
        deviation = self.reconstructor.cone_ratio(self.gg)
        row = int(np.argmin(np.abs(self.gg.v_levels - 0.01)))
        self.assertLess(deviation[row], 1e-2)
        near = self.gg.v_levels <= 0.1
        self.assertTrue(np.all(np.diff(deviation[near]) > 0))

    def test_reversed_orientation_is_rejected(self):
        swapped = SurfacePatch(
            v_levels=self.patch.v_levels,
            psi=self.patch.psi[..., [1, 0, 2]],
            psi_v=self.patch.psi_v[..., [1, 0, 2]]
        )
        with self.assertRaises(ReconstructionError) as ctx:
            self.reconstructor.reconstruct(swapped)
        self.assertEqual(ctx.exception.code, 'nonpositive_jacobian')

    def test_too_few_rows(self):
        short = radial_surface(closed_form_profile(0.005, 1e-3), n=8)
        with self.assertRaises(ReconstructionError):
            self.reconstructor.reconstruct(short)

if __name__ == '__main__':
    unittest.main()
