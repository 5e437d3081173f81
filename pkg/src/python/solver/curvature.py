# src/python/solver/curvature.py

from typing import Dict, Optional
from enum import Enum
import re
import logging
import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    parse_expr, standard_transformations, convert_xor
)

from src.python.geometry.lorentz import rotate_vertical
from src.python.utilities.errors import DomainError

logger = logging.getLogger(__name__)

ROTATIONAL_PREFIX = 'rot:'
_FUNCTIONS = {'exp': sp.exp, 'sin': sp.sin, 'cos': sp.cos, 'sqrt': sp.sqrt, 'pi': sp.pi}
_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")

X, Y, Z = sp.symbols('x y z', real=True)
R2 = sp.Symbol('r2', real=True)


class CurvatureKind(Enum):
    CONSTANT = 'constant'
    ROTATIONALLY_SYMMETRIC = 'rotationally-symmetric'
    GENERAL = 'general-expression'


def _check_tokens(text: str, allowed: Dict[str, object]):
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if not match or match.end() == position:
            if text[position:].strip() == '':
                return
            raise DomainError(f"Unexpected character in curvature expression at {position}: {text[position:]!r}")
        name = match.group(2)
        if name is not None and name not in allowed:
            raise DomainError(f"Unknown name {name!r} in curvature expression")
        position = match.end()


class PrescribedCurvature:
    """
    Prescribed mean curvature 𝓗(x, y, z) built from a small expression language:
    numbers, + − * / ^ **, parentheses, exp, sin, cos, sqrt, pi and the
    coordinates x, y, z. Text prefixed with "rot:" is read as φ(r2, z) with
    r2 = x² + y².
    """

    def __init__(self, expression: sp.Expr, kind: CurvatureKind, text: Optional[str] = None):
        self.expression = sp.sympify(expression)
        self.kind = kind
        self.text = text if text is not None else str(self.expression)
        self._func = sp.lambdify((X, Y, Z), self.expression, 'numpy')
        self._gradient = [
            sp.lambdify((X, Y, Z), sp.diff(self.expression, s), 'numpy') for s in (X, Y, Z)
        ]

    @classmethod
    def constant(cls, value: float) -> 'PrescribedCurvature':
        return cls(sp.Float(value), CurvatureKind.CONSTANT, text=repr(float(value)))

    @classmethod
    def parse(cls, text: str) -> 'PrescribedCurvature':
        text = text.strip()
        if not text:
            raise DomainError("Empty curvature expression")
        try:
            return cls.constant(float(text))
        except ValueError:
            pass

        rotational = text.startswith(ROTATIONAL_PREFIX)
        body = text[len(ROTATIONAL_PREFIX):] if rotational else text
        names = dict(_FUNCTIONS)
        names.update({'r2': R2, 'z': Z} if rotational else {'x': X, 'y': Y, 'z': Z})
        _check_tokens(body, names)
        try:
            expr = parse_expr(
                body,
                local_dict=names,
                transformations=standard_transformations + (convert_xor,),
            )
        except Exception as e:
            raise DomainError(f"Cannot parse curvature expression {text!r}: {str(e)}")
        if rotational:
            expr = expr.subs(R2, X ** 2 + Y ** 2)

        if not expr.free_symbols:
            kind = CurvatureKind.CONSTANT
        elif rotational:
            kind = CurvatureKind.ROTATIONALLY_SYMMETRIC
        else:
            kind = CurvatureKind.GENERAL
        curvature = cls(expr, kind, text=text)
        if kind is CurvatureKind.GENERAL and curvature.is_rotationally_symmetric():
            curvature.kind = CurvatureKind.ROTATIONALLY_SYMMETRIC
            logger.info(f"Curvature {text!r} detected as rotationally symmetric")
        return curvature

    def evaluate(self, points) -> np.ndarray:
        """𝓗 at points of shape (..., 3); constant expressions broadcast."""
        points = np.asarray(points, dtype=float)
        with np.errstate(all='ignore'):
            values = self._func(points[..., 0], points[..., 1], points[..., 2])
        return np.broadcast_to(np.asarray(values, dtype=float), points.shape[:-1]).copy()

    __call__ = evaluate

    def gradient(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        with np.errstate(all='ignore'):
            parts = [
                np.broadcast_to(
                    np.asarray(g(points[..., 0], points[..., 1], points[..., 2]), dtype=float),
                    points.shape[:-1]
                )
                for g in self._gradient
            ]
        return np.stack(parts, axis=-1)

    def is_rotationally_symmetric(self, about=None, radius: float = 1.0, tol: float = 1e-10) -> bool:
        """Numerical probe: 𝓗 ∘ I_θ = 𝓗 on random points near the vertical axis through `about`."""
        if self.kind is CurvatureKind.CONSTANT:
            return True
        center = np.zeros(3) if about is None else np.asarray(
            about.to_array() if hasattr(about, 'to_array') else about, dtype=float
        )
        rng = np.random.default_rng(0)
        points = center + rng.uniform(-radius, radius, size=(64, 3))
        base = self.evaluate(points)
        for theta in (0.3, 1.1, 2.5):
            rotated = self.evaluate(rotate_vertical(points, theta, center))
            finite = np.isfinite(base) & np.isfinite(rotated)
            if not finite.any():
                return False
            scale = max(1.0, float(np.max(np.abs(base[finite]))))
            if np.max(np.abs(base[finite] - rotated[finite])) > tol * scale:
                return False
        return True

    def __repr__(self) -> str:
        return f"PrescribedCurvature({self.text!r}, kind={self.kind.value})"
