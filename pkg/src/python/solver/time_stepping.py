# src/python/solver/time_stepping.py

from typing import Callable
import numpy as np


class RK4:
    """
    Classical fourth-order Runge-Kutta stepping of dY/dv = rhs(v, Y).

    The state is never mutated; `step` returns a new array.
    """

    def __init__(self, rhs_func: Callable[[float, np.ndarray], np.ndarray]):
        self.rhs_func = rhs_func

    def step(self, v: float, state: np.ndarray, dv: float) -> np.ndarray:
        k1 = self.rhs_func(v, state)
        k2 = self.rhs_func(v + dv / 2, state + (dv / 2) * k1)
        k3 = self.rhs_func(v + dv / 2, state + (dv / 2) * k2)
        k4 = self.rhs_func(v + dv, state + dv * k3)
        return state + (dv / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

    def integrate(self, state: np.ndarray, v_max: float, steps: int) -> np.ndarray:
        """Fixed-step integration from 0 to v_max; returns all states, shape (steps + 1, ...)."""
        dv = v_max / steps
        states = [np.asarray(state, dtype=float)]
        for k in range(steps):
            states.append(self.step(k * dv, states[-1], dv))
        return np.stack(states, axis=0)


def uniform_steps(v_max: float, dv: float) -> int:
    """Number of equal steps covering [0, v_max] closest to spacing dv."""
    return max(1, int(round(v_max / dv)))
