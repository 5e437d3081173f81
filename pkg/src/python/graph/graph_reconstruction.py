# src/python/graph/graph_reconstruction.py

from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass
import logging
import numpy as np

from src.python.spectral.periodic_field import spectral_derivative
from src.python.solver.cauchy_solver import SurfacePatch
from src.python.solver.curvature import PrescribedCurvature
from src.python.analysis.finite_differences import derivative_rows
from src.python.utilities.errors import EllipticityError, ReconstructionError

STENCIL_ACCURACY = 4
# Rows with Σ = 1 − p² − q² below this are excluded where the equation degenerates.
SIGMA_MASK = 1e-8
HESSIAN_ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BeltramiCoeffs:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    sigma: np.ndarray

    def identity_error(self) -> float:
        """max |ac − b² − Σ|, zero up to rounding."""
        return float(np.max(np.abs(self.a * self.c - self.b ** 2 - self.sigma)))


@dataclass(frozen=True, eq=False)
class GraphGrid:
    """
    Samples of the graph z(x, y) and its derivatives p = z_x, q = z_y,
    r = z_xx, s = z_xy, t = z_yy, indexed by source (v-row, u-node).
    `rows` maps each sample row back to a patch row; `apex` is p0.
    """
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    t: np.ndarray
    v_levels: Optional[np.ndarray] = None
    rows: Optional[np.ndarray] = None
    apex: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    @classmethod
    def from_samples(cls, x, y, z, p, q, r, s, t, v_levels=None,
                     apex: Tuple[float, float, float] = (0.0, 0.0, 0.0)) -> 'GraphGrid':
        arrays = [np.atleast_2d(np.asarray(a, dtype=float)) for a in (x, y, z, p, q, r, s, t)]
        return cls(*arrays, v_levels=None if v_levels is None else np.asarray(v_levels, dtype=float),
                   apex=apex)

    @property
    def sigma(self) -> np.ndarray:
        return 1 - self.p ** 2 - self.q ** 2

    def beltrami(self) -> BeltramiCoeffs:
        return BeltramiCoeffs(a=1 - self.q ** 2, b=self.p * self.q, c=1 - self.p ** 2, sigma=self.sigma)


@dataclass
class HessianReport:
    min_abs: float
    sign: int
    sign_constant: bool
    vanishing: bool


def _chain(F_u, F_v, x_u, x_v, y_u, y_v, jac):
    """(F_x, F_y) through the inverse Jacobian of (u, v) ↦ (x, y)."""
    return (F_u * y_v - F_v * y_u) / jac, (x_u * F_v - x_v * F_u) / jac


class GraphReconstructor:
    """Rebuilds the graph z(x, y) over the punctured disk from a conformal patch."""

    def __init__(self, debug_injectivity: bool = False, sigma_mask: float = SIGMA_MASK):
        self.logger = logging.getLogger(__name__)
        self.debug_injectivity = debug_injectivity
        self.sigma_mask = sigma_mask

    def _first_derivatives(self, patch: SurfacePatch):
        psi_u = patch.u_derivative(1)[1:]
        psi_v = patch.velocity(STENCIL_ACCURACY)[1:]
        return psi_u, psi_v

    def reconstruct(self, patch: SurfacePatch) -> GraphGrid:
        """
        Chain rule through the per-node 2×2 Jacobian of (u, v) ↦ (x, y).
        Row 0 (the puncture) is dropped; v-derivatives of p and q use rows
        1..end only.
        """
        if patch.levels < STENCIL_ACCURACY + 3:
            raise ReconstructionError(f"Need at least {STENCIL_ACCURACY + 3} rows, got {patch.levels}")
        psi_u, psi_v = self._first_derivatives(patch)
        x_u, y_u, z_u = psi_u[..., 0], psi_u[..., 1], psi_u[..., 2]
        x_v, y_v, z_v = psi_v[..., 0], psi_v[..., 1], psi_v[..., 2]
        jac = x_u * y_v - x_v * y_u
        if np.any(jac <= 0):
            bad = np.argwhere(jac <= 0)
            raise ReconstructionError(
                f"Jacobian of (x, y) is nonpositive at {len(bad)} nodes (first at row {bad[0][0] + 1}, node {bad[0][1]})",
                code='nonpositive_jacobian'
            )

        p, q = _chain(z_u, z_v, x_u, x_v, y_u, y_v, jac)
        dv = patch.dv
        p_u = spectral_derivative(p, 1, axis=1)
        q_u = spectral_derivative(q, 1, axis=1)
        p_v = derivative_rows(p, dv, order=1, accuracy=STENCIL_ACCURACY, axis=0)
        q_v = derivative_rows(q, dv, order=1, accuracy=STENCIL_ACCURACY, axis=0)
        r, p_y = _chain(p_u, p_v, x_u, x_v, y_u, y_v, jac)
        q_x, t = _chain(q_u, q_v, x_u, x_v, y_u, y_v, jac)

        apex = tuple(float(c) for c in patch.p0)
        gg = GraphGrid(
            x=patch.psi[1:, :, 0], y=patch.psi[1:, :, 1], z=patch.psi[1:, :, 2],
            p=p, q=q, r=r, s=(p_y + q_x) / 2, t=t,
            v_levels=patch.v_levels[1:], rows=np.arange(1, patch.levels), apex=apex
        )
        self.injectivity(gg)
        self.logger.info(f"Reconstructed graph over {gg.x.shape[0]} rows of {gg.x.shape[1]} nodes")
        return gg

    def maineq_residual(self, gg: GraphGrid, H: PrescribedCurvature) -> float:
        """sup |(1−q²)r + 2pqs + (1−p²)t − 2𝓗 Σ^{3/2}| over samples with Σ ≥ the mask."""
        sigma = gg.sigma
        if np.any(sigma <= 0):
            offending = [tuple(int(i) for i in idx) for idx in np.argwhere(sigma <= 0)]
            raise EllipticityError(
                f"Ellipticity p² + q² < 1 fails at {len(offending)} samples", offending=offending
            )
        points = np.stack([gg.x, gg.y, gg.z], axis=-1)
        curv = H.evaluate(points)
        residual = np.abs(
            (1 - gg.q ** 2) * gg.r + 2 * gg.p * gg.q * gg.s + (1 - gg.p ** 2) * gg.t
            - 2 * curv * sigma ** 1.5
        )
        keep = sigma >= self.sigma_mask
        if not keep.all():
            self.logger.warning(f"Masked {int(np.sum(~keep))} samples with Σ < {self.sigma_mask}")
        return float(np.max(residual[keep])) if keep.any() else 0.0

    def beltrami_check(self, patch: SurfacePatch, gg: GraphGrid) -> float:
        """sup |(x_v, y_v) − (b x_u − a y_u, c x_u − b y_u)/√Σ| over unmasked samples."""
        rows = gg.rows if gg.rows is not None else np.arange(1, patch.levels)
        psi_u = patch.u_derivative(1)[rows]
        psi_v = patch.velocity(STENCIL_ACCURACY)[rows]
        coeffs = gg.beltrami()
        keep = coeffs.sigma >= self.sigma_mask
        with np.errstate(invalid='ignore', divide='ignore'):
            root = np.sqrt(np.where(keep, coeffs.sigma, np.nan))
            dx = psi_v[..., 0] - (coeffs.b * psi_u[..., 0] - coeffs.a * psi_u[..., 1]) / root
            dy = psi_v[..., 1] - (coeffs.c * psi_u[..., 0] - coeffs.b * psi_u[..., 1]) / root
        residual = np.hypot(dx, dy)
        return float(np.max(residual[keep])) if keep.any() else 0.0

    def hessian_sign(self, gg: GraphGrid) -> HessianReport:
        det = gg.r * gg.t - gg.s ** 2
        min_abs = float(np.min(np.abs(det)))
        signs = np.sign(det)
        vanishing = min_abs < HESSIAN_ZERO_TOL
        constant = bool(np.all(signs == signs.flat[0])) and not vanishing
        return HessianReport(
            min_abs=min_abs,
            sign=int(signs.flat[0]) if constant else 0,
            sign_constant=constant,
            vanishing=vanishing
        )

    def cone_ratio(self, gg: GraphGrid) -> np.ndarray:
        """Per-row max |z²/(x² + y²) − 1| with coordinates taken relative to the apex."""
        x0, y0, z0 = gg.apex
        radius2 = (gg.x - x0) ** 2 + (gg.y - y0) ** 2
        return np.max(np.abs((gg.z - z0) ** 2 / radius2 - 1), axis=1)

    def gradient_map_winding(self, gg: GraphGrid) -> Dict[str, np.ndarray]:
        """Per-row winding number of p − iq about 0 and min |(p, q)|."""
        closed = np.concatenate([gg.p - 1j * gg.q, (gg.p - 1j * gg.q)[:, :1]], axis=1)
        phase = np.unwrap(np.angle(closed), axis=1)
        winding = np.round((phase[:, -1] - phase[:, 0]) / (2 * np.pi)).astype(int)
        return {'winding': winding, 'min_norm': np.min(np.hypot(gg.p, gg.q), axis=1)}

    def _row_polar(self, gg: GraphGrid, k: int):
        x0, y0, _ = gg.apex
        w = (gg.x[k] - x0) + 1j * (gg.y[k] - y0)
        closed = np.append(w, w[0])
        phase = np.unwrap(np.angle(closed))
        steps = np.diff(phase)
        total = phase[-1] - phase[0]
        simple = (np.all(steps > 0) or np.all(steps < 0)) and abs(abs(total) - 2 * np.pi) < 1e-6
        return np.mod(phase[:-1], 2 * np.pi), np.abs(w), simple

    def injectivity(self, gg: GraphGrid) -> bool:
        """
        Each row must be a star-shaped simple closed curve around the apex, and
        rows must nest outward: adjacent pairs by default, all pairs in debug mode.
        """
        polar: List = []
        for k in range(gg.x.shape[0]):
            angle, radius, simple = self._row_polar(gg, k)
            if not simple:
                raise ReconstructionError(f"Row {k} of the graph is not a simple closed curve", code='overlap')
            polar.append((angle, radius))

        def radius_at(k, angles):
            angle, radius = polar[k]
            return np.interp(angles, angle, radius, period=2 * np.pi)

        rows = range(len(polar))
        pairs = ((i, j) for i in rows for j in rows if i < j) if self.debug_injectivity \
            else ((i, i + 1) for i in range(len(polar) - 1))
        for i, j in pairs:
            inner_at_outer = radius_at(i, polar[j][0])
            outer_at_inner = radius_at(j, polar[i][0])
            if np.any(polar[j][1] <= inner_at_outer) or np.any(outer_at_inner <= polar[i][1]):
                raise ReconstructionError(f"Rows {i} and {j} of the graph overlap", code='overlap')
        return True
