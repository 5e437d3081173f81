# src/python/spectral/periodic_field.py

from typing import Optional, Sequence
import warnings
import logging
import numpy as np
from scipy import fft as sfft

from src.python.utilities.errors import DomainError

logger = logging.getLogger(__name__)

FILTER_ORDER = 16
ALIASING_ENERGY_THRESHOLD = 1e-24


class AliasingWarning(UserWarning):
    """Downsampling discarded modes that carried energy."""


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


def grid_nodes(n: int) -> np.ndarray:
    """Uniform nodes u_j = 2πj/n on [0, 2π)."""
    return 2.0 * np.pi * np.arange(n) / n


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order; index n/2 holds the Nyquist mode (−n/2)."""
    return sfft.fftfreq(n, d=1.0 / n)


def _along(multiplier: np.ndarray, ndim: int, axis: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = multiplier.shape[0]
    return multiplier.reshape(shape)


def _apply_multiplier(samples: np.ndarray, multiplier: np.ndarray, axis: int) -> np.ndarray:
    samples = np.asarray(samples)
    modes = sfft.fft(samples, axis=axis)
    modes = modes * _along(multiplier, samples.ndim, axis)
    result = sfft.ifft(modes, axis=axis)
    if not np.iscomplexobj(samples):
        return result.real
    return result


def derivative_multiplier(n: int, order: int) -> np.ndarray:
    if order not in (1, 2):
        raise DomainError(f"Spectral derivative order must be 1 or 2, got {order}")
    k = wavenumbers(n)
    if order == 1:
        multiplier = 1j * k
        # Odd derivatives of the Nyquist mode are not representable on the grid.
        multiplier[n // 2] = 0.0
        return multiplier
    return -(k ** 2) + 0j


def filter_multiplier(n: int, strength: float) -> np.ndarray:
    if strength < 0:
        raise DomainError(f"Filter strength must be nonnegative, got {strength}")
    k = np.abs(wavenumbers(n))
    return np.exp(-strength * (k / (n / 2)) ** FILTER_ORDER)


def shift_multiplier(n: int, theta: float) -> np.ndarray:
    k = wavenumbers(n)
    multiplier = np.exp(1j * k * theta)
    # The Nyquist mode samples as cos(n u / 2); its shift keeps only the cosine part.
    multiplier[n // 2] = np.cos(n * theta / 2)
    return multiplier


def spectral_derivative(samples: np.ndarray, order: int = 1, axis: int = 0) -> np.ndarray:
    samples = np.asarray(samples)
    return _apply_multiplier(samples, derivative_multiplier(samples.shape[axis], order), axis)


def spectral_filter(samples: np.ndarray, strength: float, axis: int = 0) -> np.ndarray:
    samples = np.asarray(samples)
    if strength == 0:
        return samples.copy()
    return _apply_multiplier(samples, filter_multiplier(samples.shape[axis], strength), axis)


def spectral_shift(samples: np.ndarray, theta: float, axis: int = 0) -> np.ndarray:
    samples = np.asarray(samples)
    return _apply_multiplier(samples, shift_multiplier(samples.shape[axis], theta), axis)


class PeriodicField:
    """
    Real or complex 2π-periodic field sampled at u_j = 2πj/n.

    Samples have shape (n,) or (n, ...) with trailing component axes; every
    transform acts along axis 0. A real field stays real through all
    operations (imaginary round-off is discarded).
    """

    def __init__(self, samples, real: Optional[bool] = None):
        samples = np.asarray(samples)
        if samples.ndim == 0:
            raise DomainError("PeriodicField needs at least one sample axis")
        n = samples.shape[0]
        if not is_power_of_two(n) or n < 8:
            raise DomainError(f"Grid size must be a power of two >= 8, got {n}")
        self.real = (not np.iscomplexobj(samples)) if real is None else bool(real)
        if self.real:
            samples = np.real(samples).astype(float)
        else:
            samples = samples.astype(complex)
        samples.setflags(write=False)
        self.samples = samples
        self.n = n

    @classmethod
    def from_function(cls, func, n: int) -> 'PeriodicField':
        return cls(func(grid_nodes(n)))

    @classmethod
    def from_coefficients(cls, cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = (),
                          n: int = 64) -> 'PeriodicField':
        """
        Finite series a_0 + Σ a_k cos(k u) + Σ b_k sin(k u); cos_coeffs start at
        k = 0 and sin_coeffs at k = 1.
        """
        degree = max(len(cos_coeffs) - 1, len(sin_coeffs))
        if degree >= n // 2:
            raise DomainError(f"Series degree {degree} is not resolved on an n={n} grid")
        u = grid_nodes(n)
        values = np.zeros(n)
        for k, a in enumerate(cos_coeffs):
            values += a * np.cos(k * u)
        for k, b in enumerate(sin_coeffs, start=1):
            values += b * np.sin(k * u)
        return cls(values)

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.n)

    def _new(self, samples) -> 'PeriodicField':
        return PeriodicField(samples, real=self.real)

    def modes(self) -> np.ndarray:
        """Fourier coefficients c_k = fft(samples)/n in FFT order."""
        return sfft.fft(self.samples, axis=0) / self.n

    @classmethod
    def from_modes(cls, modes: np.ndarray, real: bool = False) -> 'PeriodicField':
        modes = np.asarray(modes)
        return cls(sfft.ifft(modes * modes.shape[0], axis=0), real=real)

    def differentiate(self, order: int = 1) -> 'PeriodicField':
        return self._new(spectral_derivative(self.samples, order))

    def shift(self, theta: float) -> 'PeriodicField':
        """Samples of u ↦ f(u + θ) by phase rotation in mode space."""
        return self._new(spectral_shift(self.samples, theta))

    def filter(self, strength: float) -> 'PeriodicField':
        return self._new(spectral_filter(self.samples, strength))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def integrate_mean(self):
        mean = self.modes()[0]
        return mean.real if self.real else mean

    def mode_energy(self, k: int) -> float:
        """|c_k|² + |c_−k|² with c = fft/n, summed over component axes."""
        k = abs(int(k))
        if k > self.n // 2:
            return 0.0
        c = self.modes()
        energy = np.abs(c[k]) ** 2
        if 0 < k < self.n // 2:
            energy = energy + np.abs(c[-k]) ** 2
        return float(np.sum(energy))

    def tail_energy(self, start: int) -> float:
        return float(sum(self.mode_energy(k) for k in range(start, self.n // 2 + 1)))

    def resample(self, m: int) -> 'PeriodicField':
        """
        Trigonometric interpolation onto an m-point grid. Upsampling zero-pads
        the spectrum (the Nyquist mode is split evenly between ±n/2);
        downsampling folds modes |k| ≥ m/2 onto the coarse grid and warns
        when they carry energy.
        """
        if not is_power_of_two(m) or m < 8:
            raise DomainError(f"Target grid size must be a power of two >= 8, got {m}")
        n = self.n
        if m == n:
            return self._new(self.samples.copy())
        if m < n:
            lost = self.tail_energy(m // 2)
            if lost > ALIASING_ENERGY_THRESHOLD:
                message = f"Resampling {n} -> {m} aliases mode energy {lost:.3e}"
                logger.warning(message)
                warnings.warn(message, AliasingWarning, stacklevel=2)
            return self._new(self.samples[::n // m].copy())

        c = self.modes()
        padded = np.zeros((m,) + c.shape[1:], dtype=complex)
        half = n // 2
        padded[:half] = c[:half]
        padded[m - half + 1:] = c[half + 1:]
        padded[half] = c[half] / 2
        padded[m - half] = c[half] / 2
        return PeriodicField.from_modes(padded, real=self.real)

    def evaluate(self, points) -> np.ndarray:
        """Evaluate the trigonometric interpolant at arbitrary points."""
        points = np.asarray(points, dtype=float)
        k = wavenumbers(self.n)
        basis = np.exp(1j * np.multiply.outer(points, k))
        basis[..., self.n // 2] = np.cos(np.multiply.outer(points, self.n / 2.0))
        values = np.tensordot(basis, self.modes(), axes=([-1], [0]))
        return values.real if self.real else values

    def __add__(self, other: 'PeriodicField') -> 'PeriodicField':
        return PeriodicField(self.samples + other.samples, real=self.real and other.real)

    def __sub__(self, other: 'PeriodicField') -> 'PeriodicField':
        return PeriodicField(self.samples - other.samples, real=self.real and other.real)

    def __repr__(self) -> str:
        kind = 'real' if self.real else 'complex'
        return f"PeriodicField(n={self.n}, {kind}, shape={self.samples.shape})"


def differentiate(f: PeriodicField, order: int = 1) -> PeriodicField:
    return f.differentiate(order)


def shift(f: PeriodicField, theta: float) -> PeriodicField:
    return f.shift(theta)


def filter_field(f: PeriodicField, strength: float) -> PeriodicField:
    return f.filter(strength)


def max_abs(f: PeriodicField) -> float:
    return f.max_abs()


def mode_energy(f: PeriodicField, k: int) -> float:
    return f.mode_energy(k)


def resample(f: PeriodicField, m: int) -> PeriodicField:
    return f.resample(m)
