# src/python/solver/cauchy_solver.py

from typing import Dict, List, Optional, Sequence
from dataclasses import dataclass, field, asdict
import time
import logging
import numpy as np

from src.python.geometry.lorentz import LVec3, lorentz_cross, minkowski_dot
from src.python.spectral.periodic_field import (
    PeriodicField, grid_nodes, is_power_of_two, spectral_derivative, spectral_filter
)
from src.python.analysis.finite_differences import derivative_rows
from src.python.utilities.errors import (
    CurvatureEvaluationError, DomainError, SolverError, SpecError
)
from .curvature import PrescribedCurvature
from .monitoring import SolverMonitoring
from .time_stepping import RK4, uniform_steps

# Nodes with |A| below this are treated as zeros of the height function.
MIN_ABS_A = 1e-12


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class NullCurveSpec:
    """Height function A(u) of the null curve b(u) = A(u)(cos u, −sin u, 1)."""
    A: PeriodicField

    def __post_init__(self):
        if not self.A.real or self.A.samples.ndim != 1:
            raise SpecError("A must be a real scalar periodic field")
        values = self.A.samples
        if np.min(np.abs(values)) <= MIN_ABS_A:
            raise SpecError(
                f"A vanishes at a grid node (min |A| = {np.min(np.abs(values)):.3e})", code='vanishing_A'
            )
        if not (np.all(values > 0) or np.all(values < 0)):
            raise SpecError("A changes sign", code='vanishing_A')

    @classmethod
    def from_coefficients(cls, cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = (),
                          n: int = 64) -> 'NullCurveSpec':
        return cls(PeriodicField.from_coefficients(cos_coeffs, sin_coeffs, n))

    @classmethod
    def constant(cls, value: float, n: int = 64) -> 'NullCurveSpec':
        return cls(PeriodicField(np.full(n, float(value))))

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def cone(self) -> str:
        return 'upper' if self.A.samples[0] > 0 else 'lower'

    def is_constant(self, tol: float = 1e-14) -> bool:
        values = self.A.samples
        return float(np.max(values) - np.min(values)) <= tol * max(1.0, float(np.max(np.abs(values))))

    def curve(self, n: Optional[int] = None) -> np.ndarray:
        """Samples of b(u), shape (n, 3)."""
        field_ = self.A if n is None or n == self.A.n else self.A.resample(n)
        u = field_.nodes
        a = field_.samples
        return np.stack([a * np.cos(u), -a * np.sin(u), a], axis=-1)


@dataclass(frozen=True)
class SolverConfig:
    n: int = 64
    dv: float = 1e-3
    v_max: float = 0.8
    filter_strength: float = 36.0
    residual_budget: float = 1e-6
    p0: LVec3 = LVec3(0.0, 0.0, 0.0)

    def __post_init__(self):
        if not is_power_of_two(self.n) or self.n < 8:
            raise DomainError(f"n must be a power of two >= 8, got {self.n}")
        if self.dv <= 0 or self.v_max <= 0 or self.residual_budget <= 0:
            raise DomainError("dv, v_max and residual_budget must be positive")
        if self.filter_strength < 0:
            raise DomainError("filter_strength must be nonnegative")

    @property
    def steps(self) -> int:
        return uniform_steps(self.v_max, self.dv)

    @property
    def effective_dv(self) -> float:
        return self.v_max / self.steps

    def echo(self) -> Dict:
        values = asdict(self)
        values['p0'] = (self.p0.x, self.p0.y, self.p0.z)
        return values


@dataclass(frozen=True, eq=False)
class CauchyState:
    v: float
    psi: np.ndarray
    psi_v: np.ndarray
    degraded: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'psi', _frozen(self.psi))
        object.__setattr__(self, 'psi_v', _frozen(self.psi_v))

    @property
    def n(self) -> int:
        return self.psi.shape[0]


@dataclass(frozen=True, eq=False)
class SurfacePatch:
    """
    Samples ψ(u_j, v_k) on the strip, shape (levels, n, 3). `psi_v` holds the
    marched velocity rows when known; patches loaded from a surface CSV carry
    None and rebuild ψ_v by finite differences.
    """
    v_levels: np.ndarray
    psi: np.ndarray
    psi_v: Optional[np.ndarray] = None
    config: Optional[SolverConfig] = None
    degraded: bool = False
    degradation_reason: Optional[str] = None
    residual_history: Optional[np.ndarray] = None
    summary: Dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'v_levels', _frozen(self.v_levels))
        object.__setattr__(self, 'psi', _frozen(self.psi))
        if self.psi_v is not None:
            object.__setattr__(self, 'psi_v', _frozen(self.psi_v))
        if self.psi.ndim != 3 or self.psi.shape[2] != 3:
            raise DomainError(f"Patch samples must have shape (levels, n, 3), got {self.psi.shape}")
        if self.psi.shape[0] != self.v_levels.shape[0]:
            raise DomainError("One v level per row is required")
        if self.v_levels[0] != 0.0 or np.any(np.diff(self.v_levels) <= 0):
            raise DomainError("v levels must start at 0 and increase")

    @property
    def n(self) -> int:
        return self.psi.shape[1]

    @property
    def levels(self) -> int:
        return self.psi.shape[0]

    @property
    def u(self) -> np.ndarray:
        return grid_nodes(self.n)

    @property
    def v_ok(self) -> float:
        return float(self.v_levels[-1])

    @property
    def dv(self) -> float:
        spacing = np.diff(self.v_levels)
        if spacing.size == 0:
            raise DomainError("Patch has a single row")
        if np.max(np.abs(spacing - spacing[0])) > 1e-9 * spacing[0]:
            raise DomainError("v levels are not uniformly spaced")
        return float(spacing[0])

    @property
    def p0(self) -> np.ndarray:
        return np.mean(self.psi[0], axis=0)

    def velocity(self, accuracy: int = 4) -> np.ndarray:
        """ψ_v rows: the stored ones, otherwise finite differences in v."""
        if self.psi_v is not None:
            return self.psi_v
        return derivative_rows(self.psi, self.dv, order=1, accuracy=accuracy, axis=0)

    def u_derivative(self, order: int = 1) -> np.ndarray:
        return spectral_derivative(self.psi, order, axis=1)

    def row_index(self, v: float) -> int:
        return int(np.argmin(np.abs(self.v_levels - v)))


def build_initial_data(spec: NullCurveSpec, p0: LVec3 = LVec3(0.0, 0.0, 0.0),
                       n: Optional[int] = None) -> CauchyState:
    """ψ ≡ p0 and ψ_v = b(u) at v = 0."""
    n = spec.n if n is None else n
    if not is_power_of_two(n) or n < 8:
        raise DomainError(f"n must be a power of two >= 8, got {n}")
    b = spec.curve(n)
    psi = np.tile(p0.to_array(), (n, 1))
    return CauchyState(v=0.0, psi=psi, psi_v=b)


def conformality_residual(state: CauchyState) -> float:
    """sup |⟨ψ_w, ψ_w⟩| with ψ_w = (ψ_u − iψ_v)/2."""
    return float(np.max(conformality_field(state.psi, state.psi_v)))


def conformality_field(psi: np.ndarray, psi_v: np.ndarray, axis: int = 0) -> np.ndarray:
    psi_u = spectral_derivative(psi, 1, axis=axis)
    E = minkowski_dot(psi_u, psi_u)
    G = minkowski_dot(psi_v, psi_v)
    F = minkowski_dot(psi_u, psi_v)
    return np.hypot((E - G) / 4, F / 2)


class CauchySolver:
    """
    Marches ψ_vv = −ψ_uu + 2𝓗(ψ) ψ_u × ψ_v from the null curve in the v
    direction with explicit RK4, spectral u-derivatives and an exponential
    filter after every step.
    """

    def __init__(self, curvature: PrescribedCurvature, config: SolverConfig = SolverConfig(),
                 monitoring: Optional[SolverMonitoring] = None):
        self.logger = logging.getLogger(__name__)
        self.curvature = curvature
        self.config = config
        self.monitoring = monitoring if monitoring is not None else SolverMonitoring()
        self._stepper = RK4(self._rhs)

    def _curvature_at(self, psi: np.ndarray) -> np.ndarray:
        values = self.curvature.evaluate(psi)
        if not np.all(np.isfinite(values)):
            raise CurvatureEvaluationError(f"Curvature {self.curvature.text!r} is not finite on the march")
        if np.any(values <= 0):
            raise CurvatureEvaluationError(
                f"Curvature {self.curvature.text!r} is nonpositive at {int(np.sum(values <= 0))} nodes",
                code='nonpositive_curvature'
            )
        return values

    def _rhs(self, v: float, y: np.ndarray) -> np.ndarray:
        psi, psi_v = y[0], y[1]
        psi_u = spectral_derivative(psi, 1, axis=0)
        psi_uu = spectral_derivative(psi, 2, axis=0)
        H = self._curvature_at(psi)
        accel = -psi_uu + 2.0 * H[:, None] * lorentz_cross(psi_u, psi_v)
        return np.stack([psi_v, accel], axis=0)

    def build_initial_data(self, spec: NullCurveSpec) -> CauchyState:
        return build_initial_data(spec, self.config.p0, self.config.n)

    def step(self, state: CauchyState, dv: Optional[float] = None) -> CauchyState:
        if state.degraded:
            raise SolverError("Cannot step a degraded state")
        dv = self.config.effective_dv if dv is None else dv
        y = np.stack([state.psi, state.psi_v], axis=0)
        y = self._stepper.step(state.v, y, dv)
        y = spectral_filter(y, self.config.filter_strength, axis=1)
        return CauchyState(v=state.v + dv, psi=y[0], psi_v=y[1])

    def _degradation(self, state: CauchyState) -> Optional[str]:
        if not (np.all(np.isfinite(state.psi)) and np.all(np.isfinite(state.psi_v))):
            return 'non_finite'
        if conformality_residual(state) > self.config.residual_budget:
            return 'residual_budget'
        psi_u = spectral_derivative(state.psi, 1, axis=0)
        if np.min(minkowski_dot(psi_u, psi_u)) <= 0:
            return 'spacelike_failure'
        return None

    def march(self, spec: NullCurveSpec) -> SurfacePatch:
        """
        March from v = 0 towards v_max. Stops at the first state that breaks
        the residual budget, loses the spacelike condition or turns non-finite,
        and returns the valid prefix (v_ok ≤ v_max).
        """
        cfg = self.config
        steps = cfg.steps
        dv = cfg.effective_dv
        if abs(dv - cfg.dv) > 1e-12 * cfg.dv:
            self.logger.warning(f"Adjusted dv from {cfg.dv} to {dv} for {steps} uniform steps")
        self.logger.info(f"Marching n={cfg.n} to v_max={cfg.v_max} in {steps} steps, H={self.curvature.text!r}")

        state = self.build_initial_data(spec)
        psi_rows: List[np.ndarray] = [state.psi]
        velocity_rows: List[np.ndarray] = [state.psi_v]
        levels = [0.0]
        residuals = [conformality_residual(state)]
        reason = None

        for k in range(1, steps + 1):
            started = time.perf_counter()
            try:
                candidate = self.step(state, dv)
            except CurvatureEvaluationError as e:
                self.logger.error(f"March aborted at v={state.v:.6g}: {str(e)}")
                raise
            # Exact level avoids drift from repeated addition.
            candidate = CauchyState(v=k * dv, psi=candidate.psi, psi_v=candidate.psi_v)
            reason = self._degradation(candidate)
            if reason is not None:
                self.monitoring.record_degradation(reason, candidate.v)
                break
            state = candidate
            residual = conformality_residual(state)
            psi_u = spectral_derivative(state.psi, 1, axis=0)
            self.monitoring.record_step(
                state.v,
                residual,
                float(np.min(minkowski_dot(psi_u, psi_u))),
                float(np.max(np.abs(state.psi))),
                elapsed=time.perf_counter() - started
            )
            psi_rows.append(state.psi)
            velocity_rows.append(state.psi_v)
            levels.append(state.v)
            residuals.append(residual)

        if len(levels) == 1:
            raise SolverError(
                f"March degraded immediately ({reason}); n={cfg.n}, dv={dv}, v_max={cfg.v_max}, "
                f"filter_strength={cfg.filter_strength}, residual_budget={cfg.residual_budget}",
                code='immediate_degradation'
            )

        self.logger.info(f"March finished with v_ok={levels[-1]:.6g}")
        return SurfacePatch(
            v_levels=np.array(levels),
            psi=np.stack(psi_rows),
            psi_v=np.stack(velocity_rows),
            config=cfg,
            degraded=reason is not None,
            degradation_reason=reason,
            residual_history=np.array(residuals),
            summary=self.monitoring.generate_summary()
        )


def step(state: CauchyState, H: PrescribedCurvature, cfg: SolverConfig) -> CauchyState:
    return CauchySolver(H, cfg).step(state)


def march(spec: NullCurveSpec, H: PrescribedCurvature, cfg: SolverConfig) -> SurfacePatch:
    return CauchySolver(H, cfg).march(spec)
