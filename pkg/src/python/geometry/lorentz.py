# src/python/geometry/lorentz.py

from typing import Optional, Union
from dataclasses import dataclass
from enum import Enum
import numpy as np

from src.python.utilities.errors import DomainError

VectorLike = Union['LVec3', np.ndarray]

# Absolute tolerance used for null classification at unit scale.
DEFAULT_NULL_TOL = 1e-12


@dataclass(frozen=True)
class LVec3:
    """Point or vector of Minkowski 3-space, metric dx² + dy² − dz²."""
    x: float
    y: float
    z: float

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values) -> 'LVec3':
        values = np.asarray(values, dtype=float)
        if values.shape != (3,):
            raise ValueError(f"Expected three components, got shape {values.shape}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def __add__(self, other: 'LVec3') -> 'LVec3':
        return LVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: 'LVec3') -> 'LVec3':
        return LVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, factor: float) -> 'LVec3':
        return LVec3(factor * self.x, factor * self.y, factor * self.z)


class CausalClass(Enum):
    SPACELIKE = 'spacelike'
    NULL = 'null'
    TIMELIKE = 'timelike'


def _components(v: VectorLike) -> np.ndarray:
    if isinstance(v, LVec3):
        return v.to_array()
    arr = np.asarray(v)
    if arr.shape[-1] != 3:
        raise ValueError(f"Last axis must have three components, got shape {arr.shape}")
    return arr


def _wrap(result: np.ndarray, *inputs) -> VectorLike:
    # Return LVec3 only when every input was an LVec3.
    if all(isinstance(v, LVec3) for v in inputs):
        return LVec3.from_array(np.real(result))
    return result


def minkowski_dot(a: VectorLike, b: VectorLike):
    """
    Lorentzian inner product a1 b1 + a2 b2 − a3 b3.

    Accepts LVec3 values or arrays of shape (..., 3), real or complex; complex
    inputs are not conjugated (the bilinear extension). Arrays broadcast.
    """
    a = _components(a)
    b = _components(b)
    result = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]
    if np.ndim(result) == 0:
        return result.item()
    return result


def lorentz_norm_squared(v: VectorLike):
    return minkowski_dot(v, v)


def lorentz_cross(a: VectorLike, b: VectorLike) -> VectorLike:
    """
    Lorentzian cross product: the unique w with ⟨w, c⟩ = −det(a, b, c) for
    every c, the determinant taking a, b, c as rows. Equals the Euclidean
    cross product with its first two components negated.
    """
    a_arr = _components(a)
    b_arr = _components(b)
    euclid = np.cross(a_arr, b_arr)
    result = np.stack([-euclid[..., 0], -euclid[..., 1], euclid[..., 2]], axis=-1)
    return _wrap(result, a, b)


def stereographic(G: VectorLike):
    """
    Stereographic projection of the upper sheet of the hyperboloid ⟨G,G⟩ = −1
    into the unit disk, (Gx − i Gy)/(1 + Gz).
    """
    arr = _components(G).astype(float)
    denom = 1.0 + arr[..., 2]
    if np.any(denom <= 0):
        raise DomainError("Stereographic projection undefined for 1 + G.z <= 0")
    result = (arr[..., 0] - 1j * arr[..., 1]) / denom
    if np.ndim(result) == 0:
        return complex(result)
    return result


def classify(v: VectorLike, tol: float = DEFAULT_NULL_TOL) -> CausalClass:
    """Causal character of a single vector by the sign of ⟨v, v⟩."""
    if tol < 0:
        raise DomainError(f"Tolerance must be nonnegative, got {tol}")
    norm = float(lorentz_norm_squared(v))
    if abs(norm) <= tol:
        return CausalClass.NULL
    return CausalClass.SPACELIKE if norm > 0 else CausalClass.TIMELIKE


def rotate_vertical(v: VectorLike, theta: float, p0: Optional[VectorLike] = None) -> VectorLike:
    """
    Rotation I_θ about the vertical line through p0 (origin by default):
    (x, y, z) ↦ (x cos θ + y sin θ, −x sin θ + y cos θ, z).

    With this sign I_θ ψ(u, v) = ψ(u + θ, v) for surfaces of the form
    p0 + (f cos u, −f sin u, h).
    """
    arr = _components(v).astype(float)
    center = np.zeros(3) if p0 is None else _components(p0).astype(float)
    shifted = arr - center
    c, s = np.cos(theta), np.sin(theta)
    rotated = np.stack([
        c * shifted[..., 0] + s * shifted[..., 1],
        -s * shifted[..., 0] + c * shifted[..., 1],
        shifted[..., 2],
    ], axis=-1) + center
    return _wrap(rotated, v)


def upward_normal_from_gradient(p, q) -> VectorLike:
    """Unit timelike upward normal (p, q, 1)/√(1 − p² − q²) of a spacelike graph."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    sigma = 1.0 - p ** 2 - q ** 2
    if np.any(sigma <= 0):
        raise DomainError("Gradient outside the unit disk: graph is not spacelike")
    root = np.sqrt(sigma)
    normal = np.stack([p / root, q / root, 1.0 / root], axis=-1)
    if normal.ndim == 1:
        return LVec3.from_array(normal)
    return normal
