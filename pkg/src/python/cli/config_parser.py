# src/python/cli/config_parser.py

from typing import Dict, Optional, Tuple
from dataclasses import dataclass, field
import re
import logging

from src.python.geometry.lorentz import LVec3
from src.python.spectral.periodic_field import is_power_of_two
from src.python.solver.cauchy_solver import NullCurveSpec, SolverConfig
from src.python.solver.curvature import PrescribedCurvature
from src.python.utilities.config_validator import ConfigValidator, load_default_tolerances
from src.python.utilities.errors import ConelikeError, ConfigError

logger = logging.getLogger(__name__)

MODES = ('solve', 'radial', 'extract', 'check', 'export')
INPUT_MODES = ('extract', 'check', 'export')
_LINE = re.compile(r'^\s*([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$')

_FLOAT_LIST_KEYS = ('A', 'A_sin', 'p0')
_FLOAT_KEYS = ('dv', 'v_max', 'filter_strength', 'residual_budget')
_LIST_KEYS = ('formats',)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    A: Tuple[float, ...] = ()
    A_sin: Tuple[float, ...] = ()
    H: str = '1'
    n: int = 64
    dv: float = 1e-3
    v_max: float = 0.8
    filter_strength: float = 36.0
    residual_budget: float = 1e-6
    p0: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    input: Optional[str] = None
    out_dir: str = 'out'
    formats: Tuple[str, ...] = ('csv', 'report')
    debug_injectivity: bool = False
    tolerances: Dict[str, float] = field(default_factory=load_default_tolerances)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            n=self.n, dv=self.dv, v_max=self.v_max, filter_strength=self.filter_strength,
            residual_budget=self.residual_budget, p0=LVec3(*self.p0)
        )

    def null_curve_spec(self) -> NullCurveSpec:
        return NullCurveSpec.from_coefficients(self.A, self.A_sin, self.n)

    def curvature(self) -> PrescribedCurvature:
        return PrescribedCurvature.parse(self.H)

    def tolerance(self, name: str) -> float:
        return self.tolerances[name]

    def echo(self) -> Dict[str, str]:
        """Provenance: every setting as the text a config file would carry."""
        values = {
            'mode': self.mode,
            'A': ','.join(repr(a) for a in self.A),
            'A_sin': ','.join(repr(a) for a in self.A_sin),
            'H': self.H,
            'n': str(self.n),
            'dv': repr(self.dv),
            'v_max': repr(self.v_max),
            'filter_strength': repr(self.filter_strength),
            'residual_budget': repr(self.residual_budget),
            'p0': ','.join(repr(c) for c in self.p0),
            'input': self.input or '',
            'out_dir': self.out_dir,
            'formats': ','.join(self.formats),
            'debug_injectivity': str(self.debug_injectivity).lower(),
        }
        for name in sorted(self.tolerances):
            values[f"tol.{name}"] = repr(self.tolerances[name])
        return values


def _read_lines(text: str) -> Dict[str, Tuple[str, int]]:
    entries: Dict[str, Tuple[str, int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0]
        if not line.strip():
            continue
        match = _LINE.match(line)
        if not match:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=number, code='syntax')
        key, value = match.group(1), match.group(2)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", line=number, code='duplicate_key')
        entries[key] = (value, number)
    return entries


def _convert(key: str, value: str, line: Optional[int]):
    try:
        if key in _FLOAT_LIST_KEYS:
            return [float(v) for v in value.split(',') if v.strip()]
        if key in _LIST_KEYS:
            return [v.strip() for v in value.split(',') if v.strip()]
        if key in _FLOAT_KEYS or key.startswith('tol.'):
            return float(value)
        if key == 'n':
            return int(value)
        if key == 'debug_injectivity':
            lowered = value.lower()
            if lowered not in ('true', 'false', '1', '0', 'yes', 'no'):
                raise ValueError(f"not a boolean: {value!r}")
            return lowered in ('true', '1', 'yes')
        return value
    except ValueError as e:
        raise ConfigError(f"{key}: {str(e)}", line=line, code='bad_value')


def parse_config(text: str, overrides: Optional[Dict[str, str]] = None,
                 validator: Optional[ConfigValidator] = None) -> RunConfig:
    """
    Parse key=value lines ('#' starts a comment) into a validated RunConfig.
    `overrides` (command-line flags) replace file values. Errors carry the
    line number of the offending key; flags carry none.
    """
    entries = _read_lines(text)
    for key, value in (overrides or {}).items():
        entries[key] = (value, None)

    validator = validator or ConfigValidator()
    typed: Dict = {}
    lines: Dict[str, Optional[int]] = {}
    tolerances = load_default_tolerances()
    tol_values: Dict[str, float] = {}
    for key, (value, line) in entries.items():
        lines[key] = line
        converted = _convert(key, value, line)
        if key.startswith('tol.'):
            name = key[len('tol.'):]
            if name not in tolerances:
                raise ConfigError(f"unknown tolerance {key!r}", line=line, code='unknown_key')
            tol_values[name] = converted
        else:
            typed[key] = converted
    if tol_values:
        typed['tol'] = tol_values

    if 'mode' not in typed:
        raise ConfigError("missing mode", line=None, code='missing_mode')
    unknown = [k for k in typed if k not in validator.schemas['run_config']['properties']]
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", line=lines.get(unknown[0]), code='unknown_key')
    validator.validate_config(typed, 'run_config', lines)

    if 'n' in typed and not is_power_of_two(typed['n']):
        raise ConfigError(f"n must be a power of two, got {typed['n']}", line=lines.get('n'), code='bad_value')
    mode = typed['mode']
    if mode in ('solve', 'radial') and not typed.get('A'):
        raise ConfigError(f"A is required for mode={mode}", line=lines.get('A', lines.get('mode')),
                          code='missing_A')
    if mode == 'radial' and (len(typed['A']) > 1 or typed.get('A_sin')):
        raise ConfigError("radial mode needs a constant A", line=lines.get('A'), code='bad_value')
    if mode in INPUT_MODES and not typed.get('input'):
        raise ConfigError(f"input is required for mode={mode}", line=lines.get('mode'), code='missing_input')

    tolerances.update(tol_values)
    config = RunConfig(
        mode=mode,
        A=tuple(typed.get('A', ())),
        A_sin=tuple(typed.get('A_sin', ())),
        H=typed.get('H', '1'),
        n=typed.get('n', 64),
        dv=typed.get('dv', 1e-3),
        v_max=typed.get('v_max', 0.8),
        filter_strength=typed.get('filter_strength', 36.0),
        residual_budget=typed.get('residual_budget', 1e-6),
        p0=tuple(typed.get('p0', (0.0, 0.0, 0.0))),
        input=typed.get('input'),
        out_dir=typed.get('out_dir', 'out'),
        formats=tuple(typed.get('formats', ('csv', 'report'))),
        debug_injectivity=typed.get('debug_injectivity', False),
        tolerances=tolerances
    )

    # Fail on A and H here, before any computation starts.
    checks = [('H', config.curvature)]
    if mode in ('solve', 'radial'):
        checks.insert(0, ('A', config.null_curve_spec))
    for key, build in checks:
        try:
            build()
        except ConelikeError as e:
            raise ConfigError(f"{key}: {str(e)}", line=lines.get(key), code=e.code)
    return config
