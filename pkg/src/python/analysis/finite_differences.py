# src/python/analysis/finite_differences.py

from typing import Sequence, Tuple
from functools import lru_cache
from math import factorial
import numpy as np

from src.python.utilities.errors import DomainError


@lru_cache(maxsize=None)
def stencil_weights(offsets: Tuple[int, ...], order: int) -> np.ndarray:
    """
    Weights w_j with Σ w_j f(x + s_j h) / h^order ≈ f^(order)(x), obtained by
    matching Taylor coefficients through a Vandermonde solve.
    """
    offsets_arr = np.asarray(offsets, dtype=float)
    size = len(offsets)
    if order >= size:
        raise DomainError(f"Stencil of {size} points cannot resolve derivative order {order}")
    vander = np.vstack([offsets_arr ** i / factorial(i) for i in range(size)])
    rhs = np.zeros(size)
    rhs[order] = 1.0
    weights = np.linalg.solve(vander, rhs)
    weights.setflags(write=False)
    return weights


def _window(index: int, size: int, order: int, accuracy: int) -> Tuple[int, ...]:
    half = (accuracy + order - 1) // 2
    if index - half >= 0 and index + half <= size - 1:
        return tuple(range(-half, half + 1))
    width = accuracy + order
    if width > size:
        raise DomainError(
            f"Need at least {width} samples for order {order} at accuracy {accuracy}, got {size}"
        )
    start = min(max(index - width // 2, 0), size - width)
    return tuple(range(start - index, start - index + width))


def derivative_rows(values: np.ndarray, spacing: float, order: int = 1, accuracy: int = 4,
                    axis: int = 0, rows: Sequence[int] = None) -> np.ndarray:
    """
    Finite-difference derivative along `axis` of a uniformly spaced array.

    Centered stencils in the interior; windows of accuracy + order points
    slide inward at the ends (one-sided at the first and last sample).
    Returns the derivative at `rows` (all indices by default), stacked along
    `axis`.
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    size = values.shape[0]
    indices = range(size) if rows is None else rows
    out = []
    for index in indices:
        offsets = _window(index, size, order, accuracy)
        weights = stencil_weights(offsets, order)
        window = values[index + offsets[0]: index + offsets[-1] + 1]
        out.append(np.tensordot(weights, window, axes=(0, 0)) / spacing ** order)
    return np.moveaxis(np.stack(out, axis=0), 0, axis)


def derivative_at(values: np.ndarray, index: int, spacing: float, order: int = 1,
                  accuracy: int = 4, axis: int = 0) -> np.ndarray:
    result = derivative_rows(values, spacing, order, accuracy, axis, rows=[index])
    return np.take(result, 0, axis=axis)
