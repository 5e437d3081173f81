# src/python/radial/radial_solutions.py

from typing import Optional, Tuple
from dataclasses import dataclass
import logging
import numpy as np

from src.python.geometry.lorentz import LVec3
from src.python.spectral.periodic_field import grid_nodes, is_power_of_two
from src.python.solver.cauchy_solver import SolverConfig, SurfacePatch
from src.python.solver.curvature import PrescribedCurvature
from src.python.solver.time_stepping import RK4, uniform_steps
from src.python.analysis.finite_differences import derivative_rows
from src.python.utilities.errors import DomainError

logger = logging.getLogger(__name__)

# Distance to the tangent pole at v = ±π below which the closed form is refused.
POLE_MARGIN = 1e-6
# Stencil accuracy for the substitution oracle.
ORACLE_ACCURACY = 6


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Radial solution ψ = p0 + (f cos u, −f sin u, h). `fp` and `hp` hold exact
    derivative samples when the generator knows them.
    """
    v_grid: np.ndarray
    f: np.ndarray
    h: np.ndarray
    fp: Optional[np.ndarray] = None
    hp: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ('v_grid', 'f', 'h', 'fp', 'hp'):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float)
                value.setflags(write=False)
                object.__setattr__(self, name, value)
        if self.v_grid[0] != 0.0 or np.any(np.diff(self.v_grid) <= 0):
            raise DomainError("v grid must start at 0 and increase")
        if abs(self.f[0]) > 1e-14 or abs(self.h[0]) > 1e-14:
            raise DomainError("Radial profile must start at f(0) = h(0) = 0")

    @property
    def dv(self) -> float:
        return float(self.v_grid[1] - self.v_grid[0])

    def derivatives(self, accuracy: int = ORACLE_ACCURACY) -> Tuple[np.ndarray, np.ndarray]:
        if self.fp is not None and self.hp is not None:
            return self.fp, self.hp
        fp = derivative_rows(self.f, self.dv, order=1, accuracy=accuracy)
        hp = derivative_rows(self.h, self.dv, order=1, accuracy=accuracy)
        return fp, hp

    def perturbed(self, df: np.ndarray) -> 'RadialProfile':
        """Same grid with f ← f + df and derivative samples dropped."""
        return RadialProfile(self.v_grid, self.f + df, self.h)


def _grid(v_max: float, dv: float) -> np.ndarray:
    if v_max <= 0 or dv <= 0:
        raise DomainError("v_max and dv must be positive")
    steps = uniform_steps(v_max, dv)
    return v_max * np.arange(steps + 1) / steps


def closed_form_neg_quarter(v):
    """
    Radial solution for A = −1/4 and 𝓗 ≡ 1:
    f = −tan(v/2)/2, h = −(v − tan(v/2))/2, valid for |v| < π.
    """
    v_arr = np.asarray(v, dtype=float)
    if np.any(np.abs(v_arr) >= np.pi - POLE_MARGIN):
        raise DomainError("Closed form is singular at v = ±π")
    t = np.tan(v_arr / 2)
    f = -t / 2
    h = -(v_arr - t) / 2
    if f.ndim == 0:
        return float(f), float(h)
    return f, h


def closed_form_profile(v_max: float, dv: float) -> RadialProfile:
    v_grid = _grid(v_max, dv)
    f, h = closed_form_neg_quarter(v_grid)
    t = np.tan(v_grid / 2)
    return RadialProfile(v_grid, f, h, fp=-(1 + t ** 2) / 4, hp=-(1 - t ** 2) / 4)


def integrate_pos_quarter(v_max: float, dv: float) -> RadialProfile:
    """RK4 for f′ = √(1/16 + 3f²/2 + f⁴), h′ = 1/4 + f², f(0) = h(0) = 0."""
    v_grid = _grid(v_max, dv)

    def rhs(v, y):
        f = y[0]
        return np.array([np.sqrt(1.0 / 16 + 1.5 * f ** 2 + f ** 4), 0.25 + f ** 2])

    states = RK4(rhs).integrate(np.zeros(2), v_grid[-1], len(v_grid) - 1)
    f, h = states[:, 0], states[:, 1]
    return RadialProfile(v_grid, f, h, fp=np.sqrt(1.0 / 16 + 1.5 * f ** 2 + f ** 4), hp=0.25 + f ** 2)


def _axis_points(p0: LVec3, f, h) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return np.stack([p0.x + f, np.full_like(f, p0.y), p0.z + np.asarray(h, dtype=float)], axis=-1)


def integrate_radial(A: float, H: PrescribedCurvature, v_max: float, dv: float,
                     p0: LVec3 = LVec3(0.0, 0.0, 0.0)) -> RadialProfile:
    """
    Radial reduction for constant A and rotationally symmetric 𝓗:
    f″ = f + 2𝓗 f h′, h″ = 2𝓗 f f′ with f(0) = h(0) = 0, f′(0) = h′(0) = A,
    𝓗 evaluated on the meridian p0 + (f, 0, h).
    """
    if A == 0:
        raise DomainError("A must be nonzero")
    if not H.is_rotationally_symmetric(about=p0):
        raise DomainError(f"Curvature {H.text!r} is not rotationally symmetric about p0")
    v_grid = _grid(v_max, dv)

    def rhs(v, y):
        f, h, fp, hp = y
        curv = float(H.evaluate(_axis_points(p0, f, h)))
        return np.array([fp, hp, f + 2 * curv * f * hp, 2 * curv * f * fp])

    states = RK4(rhs).integrate(np.array([0.0, 0.0, A, A]), v_grid[-1], len(v_grid) - 1)
    logger.info(f"Integrated radial profile A={A} to v={v_grid[-1]:.6g} in {len(v_grid) - 1} steps")
    return RadialProfile(v_grid, states[:, 0], states[:, 1], fp=states[:, 2], hp=states[:, 3])


def radial_surface(p: RadialProfile, n: int = 64, p0: LVec3 = LVec3(0.0, 0.0, 0.0)) -> SurfacePatch:
    """Patch of ψ(u_j, v_k) = p0 + (cos u_j f(v_k), −sin u_j f(v_k), h(v_k)) with ψ_v from (f′, h′)."""
    if not is_power_of_two(n) or n < 8:
        raise DomainError(f"n must be a power of two >= 8, got {n}")
    u = grid_nodes(n)
    fp, hp = p.derivatives()

    def ansatz(f, h):
        f = f[:, None]
        return np.stack([
            np.cos(u)[None, :] * f,
            -np.sin(u)[None, :] * f,
            np.broadcast_to(h[:, None], (len(h), n)),
        ], axis=-1)

    psi = ansatz(p.f, p.h) + p0.to_array()
    psi_v = ansatz(fp, hp)
    config = SolverConfig(n=n, dv=p.dv, v_max=float(p.v_grid[-1]), p0=p0)
    return SurfacePatch(v_levels=p.v_grid, psi=psi, psi_v=psi_v, config=config)


def radial_residual(p: RadialProfile, H: PrescribedCurvature,
                    p0: LVec3 = LVec3(0.0, 0.0, 0.0)) -> float:
    """
    sup over the grid of |Δψ − 2𝓗(ψ) ψ_u × ψ_v| on the radial ansatz, with
    f′, f″, h′, h″ from sixth-order finite differences of the samples.
    The u-dependence factors out: the residual is
    (cos u e_f, −sin u e_f, e_h) with e_f = f″ − f − 2𝓗 f h′, e_h = h″ − 2𝓗 f f′.
    """
    if not H.is_rotationally_symmetric(about=p0):
        raise DomainError(f"Curvature {H.text!r} is not rotationally symmetric about p0")
    dv = p.dv
    fp = derivative_rows(p.f, dv, order=1, accuracy=ORACLE_ACCURACY)
    fpp = derivative_rows(p.f, dv, order=2, accuracy=ORACLE_ACCURACY)
    hp = derivative_rows(p.h, dv, order=1, accuracy=ORACLE_ACCURACY)
    hpp = derivative_rows(p.h, dv, order=2, accuracy=ORACLE_ACCURACY)
    curv = H.evaluate(_axis_points(p0, p.f, p.h))
    e_f = fpp - p.f - 2 * curv * p.f * hp
    e_h = hpp - 2 * curv * p.f * fp
    return float(np.max(np.hypot(e_f, e_h)))
