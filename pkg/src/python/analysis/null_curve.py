# src/python/analysis/null_curve.py

from typing import Optional
from dataclasses import dataclass
import logging
import numpy as np

from src.python.geometry.lorentz import minkowski_dot, rotate_vertical
from src.python.spectral.periodic_field import PeriodicField, spectral_derivative
from src.python.solver.cauchy_solver import (
    CauchySolver, NullCurveSpec, SolverConfig, SurfacePatch
)
from src.python.solver.curvature import PrescribedCurvature
from src.python.utilities.errors import NullCurveError, SpecError

logger = logging.getLogger(__name__)

# Euclidean size below which b(u) counts as vanishing.
MIN_CURVE_NORM = 1e-12
NEWTON_TOL = 1e-14
NEWTON_MAX_ITER = 50
# A is analytic-grade when the energy in the top quarter of its modes stays below this.
RESOLVED_TAIL_ENERGY = 1e-10


@dataclass(frozen=True, eq=False)
class LimitNullCurve:
    """b(u) = ψ_v(u, 0) with its height function A and cone ('upper' or 'lower')."""
    A: PeriodicField
    cone: str
    b: np.ndarray
    canonical: bool = False

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def gauss_trace(self) -> np.ndarray:
        return (self.b[:, 0] - 1j * self.b[:, 1]) / self.b[:, 2]


def _validate_curve(b: np.ndarray) -> str:
    if np.min(np.linalg.norm(b, axis=-1)) < MIN_CURVE_NORM:
        raise NullCurveError("Limit null curve vanishes at a node", code='vanishing_curve')
    b3 = b[:, 2]
    if not (np.all(b3 > 0) or np.all(b3 < 0)):
        raise NullCurveError("Limit null curve crosses the vertex plane", code='cone_sign')
    b_prime = spectral_derivative(b, 1, axis=0)
    if np.min(minkowski_dot(b_prime, b_prime)) <= 0:
        raise NullCurveError("Limit null curve is not spacelike", code='not_spacelike')
    return 'upper' if b3[0] > 0 else 'lower'


def extract_null_curve(patch: SurfacePatch, canonical: bool = True) -> LimitNullCurve:
    """Boundary row of ψ_v, normalized to the canonical parametrization by default."""
    b = np.array(patch.velocity()[0])
    cone = _validate_curve(b)
    curve = LimitNullCurve(A=PeriodicField(b[:, 2]), cone=cone, b=b)
    return canonical_phase(curve) if canonical else curve


def canonical_phase(curve: LimitNullCurve) -> LimitNullCurve:
    """
    Reparametrize so the boundary Gauss trace becomes e^{is}.

    The unwrapped phase φ of g(u, 0) must increase strictly by exactly 2π.
    Writing φ(u) = u + d(u) with d periodic, each canonical node s_k is pulled
    back by Newton on u + d(u) = s_k. The boundary velocity picks up the
    conformal weight u′(s) = 1/φ′(u(s)), so b̃(s) = b(u(s)) u′(s) and
    A(s) = b̃₃(s).
    """
    n = curve.n
    g = curve.gauss_trace()
    phase = np.unwrap(np.angle(np.append(g, g[0])))
    total = phase[-1] - phase[0]
    degree = int(np.round(total / (2 * np.pi)))
    if degree != 1:
        raise NullCurveError(f"Boundary Gauss trace has degree {degree}, expected 1", code='degree')
    if np.any(np.diff(phase) <= 0):
        raise NullCurveError("Boundary phase is not strictly increasing", code='non_monotone_phase')

    u = curve.A.nodes
    d = PeriodicField(phase[:-1] - u)
    d_prime = d.differentiate(1)
    s = u.copy()
    # Start from the inverse of the linear part; d varies slowly on resolved data.
    guess = s - d.evaluate(s)
    for _ in range(NEWTON_MAX_ITER):
        update = (guess + d.evaluate(guess) - s) / (1 + d_prime.evaluate(guess))
        guess = guess - update
        if np.max(np.abs(update)) < NEWTON_TOL:
            break
    else:
        logger.warning(f"Phase inversion stopped after {NEWTON_MAX_ITER} Newton steps")

    weight = 1.0 / (1 + d_prime.evaluate(guess))
    b_field = PeriodicField(curve.b)
    b_new = b_field.evaluate(guess) * weight[:, None]
    return LimitNullCurve(A=PeriodicField(b_new[:, 2]), cone=curve.cone, b=b_new, canonical=True)


def canonical_trace_error(curve: LimitNullCurve) -> float:
    return float(np.max(np.abs(curve.gauss_trace() - np.exp(1j * curve.A.nodes))))


def round_trip(A: PeriodicField, H: PrescribedCurvature, cfg: SolverConfig,
               solver: Optional[CauchySolver] = None) -> float:
    """march → extract_null_curve → canonical_phase; returns sup |A_extracted − A|."""
    tail = A.tail_energy(3 * A.n // 8)
    if tail > RESOLVED_TAIL_ENERGY:
        raise SpecError(f"A is not spectrally resolved (top-quarter energy {tail:.3e})", code='unresolved_A')
    spec = NullCurveSpec(A)
    solver = solver if solver is not None else CauchySolver(H, cfg)
    patch = solver.march(spec)
    extracted = extract_null_curve(patch)
    reference = A if A.n == extracted.n else A.resample(extracted.n)
    return float(np.max(np.abs(extracted.A.samples - reference.samples)))


def equivariance_error(patch: SurfacePatch, shift: int) -> float:
    """
    sup |I_θ ψ(u, v) − ψ(u + θ, v)| for the grid-aligned angle θ = 2π·shift/n,
    the rotation taken about the vertical axis through p0.
    """
    theta = 2 * np.pi * shift / patch.n
    rotated = rotate_vertical(patch.psi, theta, patch.p0)
    shifted = np.roll(patch.psi, -shift, axis=1)
    return float(np.max(np.abs(rotated - shifted)))
