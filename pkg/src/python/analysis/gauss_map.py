# src/python/analysis/gauss_map.py

from typing import Optional
from dataclasses import dataclass
import logging
import numpy as np

from src.python.geometry.lorentz import (
    lorentz_cross, minkowski_dot, stereographic, upward_normal_from_gradient
)
from src.python.spectral.periodic_field import spectral_derivative
from src.python.solver.cauchy_solver import SurfacePatch
from src.python.solver.curvature import PrescribedCurvature
from src.python.utilities.errors import AnalysisError
from .finite_differences import derivative_at, derivative_rows

logger = logging.getLogger(__name__)

STENCIL_ACCURACY = 4
# |z_w| below this masks a node of the Gauss map.
Z_W_THRESHOLD = 1e-12
# |g_w̄| below this reports K as a blow-up marker.
BLOWUP_THRESHOLD = 1e-10
BLOWUP_MARKER = np.inf


@dataclass(frozen=True, eq=False)
class GaussField:
    """
    Gauss map g = (x_w − i y_w)/z_w on every patch row. Row 0 is the
    boundary trace (b1 − i b2)/b3. Masked nodes hold NaN.
    """
    values: np.ndarray
    g_w: np.ndarray
    g_wbar: np.ndarray
    g_wwbar: np.ndarray
    mask: np.ndarray
    v_levels: np.ndarray

    @property
    def boundary(self) -> np.ndarray:
        return self.values[0]

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:]

    def interior_rows(self, v_min: float = 0.0) -> np.ndarray:
        """Row indices strictly inside the strip with v ≥ v_min."""
        rows = np.arange(1, len(self.v_levels))
        return rows[self.v_levels[rows] >= v_min]

    def require_interior_rows(self, v_min: float = 0.0) -> np.ndarray:
        rows = self.interior_rows(v_min)
        if rows.size == 0:
            raise AnalysisError(
                f"No interior rows at or above v = {v_min:g} (patch ends at v = {self.v_levels[-1]:g})",
                code='no_interior_rows'
            )
        return rows


def complex_derivatives(patch: SurfacePatch):
    """ψ_u, ψ_v and ψ_w = (ψ_u − iψ_v)/2 on every row."""
    psi_u = patch.u_derivative(1)
    psi_v = patch.velocity(STENCIL_ACCURACY)
    return psi_u, psi_v, (psi_u - 1j * psi_v) / 2


def gauss_map(patch: SurfacePatch) -> GaussField:
    """
    g from the complex derivatives: spectral in u, fourth-order finite
    differences in v, with the boundary row taken from b(u) = ψ_v(u, 0).
    """
    _, psi_v, psi_w = complex_derivatives(patch)
    x_w, y_w, z_w = psi_w[..., 0], psi_w[..., 1], psi_w[..., 2]
    mask = np.abs(z_w) >= Z_W_THRESHOLD
    with np.errstate(divide='ignore', invalid='ignore'):
        g = np.where(mask, (x_w - 1j * y_w) / z_w, np.nan + 0j)
    b = psi_v[0]
    g[0] = (b[:, 0] - 1j * b[:, 1]) / b[:, 2]
    mask[0] = True
    if not mask.all():
        logger.warning(f"Gauss map masked {int(np.sum(~mask))} nodes with |z_w| < {Z_W_THRESHOLD}")

    dv = patch.dv
    g_u = spectral_derivative(g, 1, axis=1)
    g_uu = spectral_derivative(g, 2, axis=1)
    g_v = derivative_rows(g, dv, order=1, accuracy=STENCIL_ACCURACY, axis=0)
    g_vv = derivative_rows(g, dv, order=2, accuracy=STENCIL_ACCURACY, axis=0)
    return GaussField(
        values=g,
        g_w=(g_u - 1j * g_v) / 2,
        g_wbar=(g_u + 1j * g_v) / 2,
        g_wwbar=(g_uu + g_vv) / 4,
        mask=mask,
        v_levels=patch.v_levels
    )


def gauss_pde_residual(g: GaussField, H: PrescribedCurvature, patch: SurfacePatch,
                       v_min: float = 0.0) -> float:
    """
    sup over interior nodes of |𝓗(g_ww̄ + 2ḡ g_w g_w̄/(1−|g|²)) − 𝓗_w g_w̄|,
    with 𝓗_w = ∇𝓗 · ψ_w.
    """
    rows = g.require_interior_rows(v_min)
    _, _, psi_w = complex_derivatives(patch)
    psi = patch.psi[rows]
    curv = H.evaluate(psi)
    grad = H.gradient(psi)
    H_w = np.sum(grad * psi_w[rows], axis=-1)
    gv = g.values[rows]
    residual = np.abs(
        curv * (g.g_wwbar[rows] + 2 * np.conj(gv) * g.g_w[rows] * g.g_wbar[rows] / (1 - np.abs(gv) ** 2))
        - H_w * g.g_wbar[rows]
    )
    return float(np.nanmax(np.where(g.mask[rows], residual, np.nan)))


def weierstrass_check(patch: SurfacePatch, g: GaussField, H: PrescribedCurvature,
                      v_min: float = 0.0) -> float:
    """
    sup over interior nodes of the distance between ψ_w and the representation
    (ḡ_w(1+g²), −iḡ_w(1−g²), 2ḡ_w g)/(𝓗(1−|g|²)²).
    """
    rows = g.require_interior_rows(v_min)
    _, _, psi_w = complex_derivatives(patch)
    gv = g.values[rows]
    conj_g_w = np.conj(g.g_wbar[rows])
    denom = H.evaluate(patch.psi[rows]) * (1 - np.abs(gv) ** 2) ** 2
    represented = np.stack([
        conj_g_w * (1 + gv ** 2),
        -1j * conj_g_w * (1 - gv ** 2),
        2 * conj_g_w * gv,
    ], axis=-1) / denom[..., None]
    residual = np.linalg.norm(psi_w[rows] - represented, axis=-1)
    return float(np.nanmax(np.where(g.mask[rows], residual, np.nan)))


def gaussian_curvature(g: GaussField, H: PrescribedCurvature, patch: SurfacePatch) -> np.ndarray:
    """
    K = 𝓗²(|g_w|²/|g_w̄|² − 1) on every row; nodes with |g_w̄| below the
    blow-up threshold (the whole boundary row) carry +inf.
    """
    curv = H.evaluate(patch.psi)
    gw2 = np.abs(g.g_w) ** 2
    gwbar = np.abs(g.g_wbar)
    with np.errstate(divide='ignore', invalid='ignore'):
        K = curv ** 2 * (gw2 / gwbar ** 2 - 1)
    K = np.where(gwbar < BLOWUP_THRESHOLD, BLOWUP_MARKER, K)
    K[0] = BLOWUP_MARKER
    return np.where(g.mask, K, np.nan)


def fundamental_forms_curvature(patch: SurfacePatch) -> np.ndarray:
    """
    Independent curvature oracle K = −(LN − M²)/(EG − F²) with the second
    fundamental form taken against the unit timelike normal. Row 0 (where the
    immersion degenerates) is NaN.
    """
    psi_u = patch.u_derivative(1)
    psi_uu = patch.u_derivative(2)
    psi_v = patch.velocity(STENCIL_ACCURACY)
    psi_uv = spectral_derivative(psi_v, 1, axis=1)
    psi_vv = derivative_rows(psi_v, patch.dv, order=1, accuracy=STENCIL_ACCURACY, axis=0)
    normal = lorentz_cross(psi_u, psi_v)
    with np.errstate(divide='ignore', invalid='ignore'):
        unit = normal / np.sqrt(np.abs(minkowski_dot(normal, normal)))[..., None]
        E = minkowski_dot(psi_u, psi_u)
        F = minkowski_dot(psi_u, psi_v)
        G = minkowski_dot(psi_v, psi_v)
        L = minkowski_dot(psi_uu, unit)
        M = minkowski_dot(psi_uv, unit)
        N = minkowski_dot(psi_vv, unit)
        K = -(L * N - M ** 2) / (E * G - F ** 2)
    K[0] = np.nan
    return K


def boundary_normal_growth(patch: SurfacePatch) -> np.ndarray:
    """
    ∂n₃/∂v at v = 0, n₃ = x_u y_v − x_v y_u, by a one-sided fourth-order stencil.
    Equals A(u)² for a marched patch.
    """
    psi_u = patch.u_derivative(1)
    psi_v = patch.velocity(STENCIL_ACCURACY)
    n3 = psi_u[..., 0] * psi_v[..., 1] - psi_v[..., 0] * psi_u[..., 1]
    return derivative_at(n3, 0, patch.dv, order=1, accuracy=STENCIL_ACCURACY, axis=0)


def boundary_normal_check(patch: SurfacePatch) -> float:
    """sup over u of |∂n₃/∂v(u, 0) − b₃(u)²|."""
    b3 = patch.velocity(STENCIL_ACCURACY)[0, :, 2]
    return float(np.max(np.abs(boundary_normal_growth(patch) - b3 ** 2)))


def gz_identity_check(patch: SurfacePatch, g: GaussField) -> float:
    """sup over u of |4|g_w z_w|²(u, 0) − ⟨b′, b′⟩|."""
    _, _, psi_w = complex_derivatives(patch)
    b = patch.velocity(STENCIL_ACCURACY)[0]
    b_prime = spectral_derivative(b, 1, axis=0)
    lhs = 4 * np.abs(g.g_w[0] * psi_w[0, :, 2]) ** 2
    return float(np.max(np.abs(lhs - minkowski_dot(b_prime, b_prime))))


def boundary_degree(g_boundary: np.ndarray) -> int:
    """Winding number of the closed boundary trace about the origin."""
    closed = np.append(g_boundary, g_boundary[0])
    phase = np.unwrap(np.angle(closed))
    return int(np.round((phase[-1] - phase[0]) / (2 * np.pi)))


def disk_margins(g: GaussField) -> dict:
    """max |g| over the interior and max ||g| − 1| over the boundary trace."""
    interior = np.abs(g.interior[g.mask[1:]])
    return {
        'interior_max_abs': float(np.max(interior)) if interior.size else float('nan'),
        'boundary_unit_error': float(np.max(np.abs(np.abs(g.boundary) - 1)))
    }


def gauss_normal_check(g: GaussField, p: np.ndarray, q: np.ndarray, rows: np.ndarray) -> float:
    """
    sup over unmasked nodes of |g − π(N)|, N the upward normal (p, q, 1)/√σ of
    the reconstructed graph and π the stereographic projection. `rows` maps
    the graph rows back to patch rows.
    """
    projected = stereographic(upward_normal_from_gradient(p, q))
    residual = np.abs(g.values[rows] - projected)
    keep = g.mask[rows]
    if not keep.any():
        raise AnalysisError("Every node of the Gauss map is masked", code='no_interior_rows')
    return float(np.max(residual[keep]))
