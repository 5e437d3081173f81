# src/python/cli/pipeline.py

from typing import Callable, Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass, field
from pathlib import Path
import asyncio
import logging
import numpy as np

from src.python.geometry.lorentz import LVec3, minkowski_dot
from src.python.spectral.periodic_field import PeriodicField
from src.python.solver.cauchy_solver import CauchySolver, SurfacePatch, conformality_field
from src.python.solver.curvature import CurvatureKind, PrescribedCurvature
from src.python.radial.radial_solutions import (
    RadialProfile, closed_form_profile, integrate_pos_quarter, integrate_radial,
    radial_residual, radial_surface
)
from src.python.analysis.gauss_map import (
    boundary_degree, boundary_normal_check, disk_margins, fundamental_forms_curvature,
    gauss_map, gauss_normal_check, gauss_pde_residual, gaussian_curvature, gz_identity_check,
    weierstrass_check
)
from src.python.analysis.null_curve import (
    canonical_trace_error, equivariance_error, extract_null_curve
)
from src.python.graph.graph_reconstruction import GraphGrid, GraphReconstructor
from src.python.utilities.errors import ConelikeError
from .config_parser import RunConfig
from .exporters import (
    export_csv, export_graph_csv, export_null_curve_csv, export_obj,
    export_profile_csv, load_surface_csv, write_artifact
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CHECK_FAILED = 2

BLOWUP_LEVELS = (0.3, 0.2, 0.1, 0.05)
# Rows at or below this height must show the cone deviation shrinking with v.
CONE_MONOTONE_V = 0.1


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return '%.17g' % value
    return str(value)


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    code: Optional[str] = None


@dataclass
class DiagnosticsReport:
    mode: str
    config_echo: Dict[str, str] = field(default_factory=dict)
    checks: List[CheckResult] = field(default_factory=list)
    solver: Dict = field(default_factory=dict)
    errors: List[Dict[str, str]] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tolerance: float, passed: bool, code: Optional[str] = None):
        if any(c.name == name for c in self.checks):
            raise ValueError(f"Check {name!r} recorded twice")
        self.checks.append(CheckResult(name, float(value), float(tolerance), bool(passed), code))

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def render(self, exit_code: int) -> str:
        """Structured key: value text; no timestamps, so identical runs give identical bytes."""
        lines = [
            'report: conelike-diagnostics',
            f"mode: {self.mode}",
            f"verdict: {'pass' if self.passed else 'fail'}",
            f"exit_code: {exit_code}",
        ]
        lines += [f"config.{key}: {value}" for key, value in self.config_echo.items()]
        lines += [f"solver.{key}: {_fmt(value)}" for key, value in self.solver.items()]
        for c in self.checks:
            prefix = f"check.{c.name}"
            lines += [
                f"{prefix}.value: {_fmt(c.value)}",
                f"{prefix}.tolerance: {_fmt(c.tolerance)}",
                f"{prefix}.passed: {_fmt(c.passed)}",
            ]
            if c.code:
                lines.append(f"{prefix}.code: {c.code}")
        for i, error in enumerate(self.errors):
            lines += [f"error.{i}.code: {error['code']}", f"error.{i}.message: {error['message']}"]
        lines += [f"artifact: {name}" for name in self.artifacts]
        return '\n'.join(lines) + '\n'


class PipelineRunner:
    """
    Runs one configuration: solve or load → analyze → reconstruct → check →
    export. Exit codes: 0 all checks pass, 2 some check failed, 1 the run
    itself failed (solver, input or output).
    """

    def __init__(self, config: RunConfig):
        self.logger = logging.getLogger(__name__)
        self.config = config
        self.report = DiagnosticsReport(mode=config.mode, config_echo=config.echo())
        self.out_dir = Path(config.out_dir)

    def run(self) -> Tuple[int, DiagnosticsReport]:
        handlers = {
            'solve': self._run_solve,
            'radial': self._run_radial,
            'extract': self._run_extract,
            'check': self._run_check,
            'export': self._run_export,
        }
        exit_code = EXIT_OK
        try:
            handlers[self.config.mode]()
        except ConelikeError as e:
            self.logger.error(f"Run failed: {str(e)}")
            self.report.errors.append({'code': e.code, 'message': str(e)})
            exit_code = EXIT_FAILURE

        if exit_code == EXIT_OK and not self.report.passed:
            exit_code = EXIT_CHECK_FAILED
        if 'report' in self.config.formats:
            try:
                self._write('report.txt', self.report.render(exit_code), record=False)
            except ConelikeError as e:
                self.logger.error(f"Report not written: {str(e)}")
                exit_code = EXIT_FAILURE
        self.logger.info(f"Run finished with exit code {exit_code}")
        return exit_code, self.report

    # Stages

    def _run_solve(self):
        cfg = self.config
        H = cfg.curvature()
        spec = cfg.null_curve_spec()
        patch = CauchySolver(H, cfg.solver_config()).march(spec)
        self._record_solver(patch)
        self._analyze(patch, H, reference_A=spec.A, constant_A=spec.is_constant())
        self._export_patch(patch)

    def _run_radial(self):
        cfg = self.config
        H = cfg.curvature()
        A = cfg.A[0]
        profile = self._radial_profile(A, H)
        residual = radial_residual(profile, H, LVec3(*cfg.p0))
        self._add('radial_residual', residual)
        patch = radial_surface(profile, cfg.n, LVec3(*cfg.p0))
        self.report.solver.update({'v_ok': patch.v_ok, 'rows': patch.levels})
        self._analyze(patch, H, reference_A=PeriodicField(np.full(cfg.n, A)), constant_A=True)
        self._export_patch(patch)
        if 'profile' in cfg.formats:
            self._write('profile.csv', export_profile_csv(profile))

    def _run_extract(self):
        patch = load_surface_csv(self.config.input)
        curve = self._guarded('null_curve', lambda: extract_null_curve(patch))
        if curve is None:
            return
        b = patch.velocity()[0]
        self._add('boundary_null', float(np.max(np.abs(minkowski_dot(b, b)))))
        self._add('canonical_trace', canonical_trace_error(curve))
        self.report.solver.update({
            'cone': curve.cone, 'rows': patch.levels, 'A_mean': float(curve.A.integrate_mean())
        })
        self._write('null_curve.csv', export_null_curve_csv(curve))

    def _run_check(self):
        cfg = self.config
        patch = load_surface_csv(cfg.input)
        H = cfg.curvature()
        reference = None
        if cfg.A:
            reference = PeriodicField.from_coefficients(cfg.A, cfg.A_sin, patch.n)
        self.report.solver.update({'v_ok': patch.v_ok, 'rows': patch.levels})
        self._analyze(patch, H, reference_A=reference,
                      constant_A=bool(cfg.A) and len(cfg.A) == 1 and not cfg.A_sin)

    def _run_export(self):
        patch = load_surface_csv(self.config.input)
        self.report.solver.update({'v_ok': patch.v_ok, 'rows': patch.levels})
        self._export_patch(patch)

    # Helpers

    def _radial_profile(self, A: float, H: PrescribedCurvature) -> RadialProfile:
        cfg = self.config
        unit_curvature = H.kind is CurvatureKind.CONSTANT and float(H.evaluate(np.zeros(3))) == 1.0
        if unit_curvature and A == -0.25:
            return closed_form_profile(cfg.v_max, cfg.dv)
        if unit_curvature and A == 0.25:
            return integrate_pos_quarter(cfg.v_max, cfg.dv)
        return integrate_radial(A, H, cfg.v_max, cfg.dv, LVec3(*cfg.p0))

    def _record_solver(self, patch: SurfacePatch):
        history = patch.residual_history
        picks = np.unique(np.linspace(0, len(history) - 1, 11).round().astype(int))
        self.report.solver.update({
            'v_ok': patch.v_ok,
            'v_max': patch.config.v_max,
            'rows': patch.levels,
            'degraded': patch.degraded,
            'degradation_reason': patch.degradation_reason or 'none',
            'max_residual': float(np.max(history)),
            'anomalies': len(patch.summary.get('anomalies', [])),
            'residual_history': ','.join(
                f"{_fmt(patch.v_levels[i])}:{_fmt(history[i])}" for i in picks
            ),
        })

    def _tol(self, name: str) -> float:
        return self.config.tolerance(name)

    def _add(self, name: str, value: float, tolerance: Optional[float] = None, passed: Optional[bool] = None):
        tolerance = self._tol(name) if tolerance is None else tolerance
        if passed is None:
            passed = bool(np.isfinite(value) and value <= tolerance)
        self.report.add(name, value, tolerance, passed)

    def _guarded(self, name: str, func: Callable):
        """Run an analysis; a library error becomes a failed check with its code."""
        try:
            return func()
        except ConelikeError as e:
            self.logger.warning(f"Check {name} failed: {str(e)}")
            self.report.add(name, float('nan'), 0.0, False, code=e.code)
        except (ValueError, FloatingPointError) as e:
            self.logger.warning(f"Check {name} failed: {str(e)}")
            self.report.add(name, float('nan'), 0.0, False, code='analysis_error')
        return None

    def _add_guarded(self, name: str, func: Callable):
        value = self._guarded(name, func)
        if value is not None:
            self._add(name, value)

    def _analyze(self, patch: SurfacePatch, H: PrescribedCurvature,
                 reference_A: Optional[PeriodicField], constant_A: bool):
        cfg = self.config
        p0 = LVec3(*cfg.p0)
        v_min = self._tol('interior_v_min')

        residual = conformality_field(patch.psi, patch.velocity(), axis=1)
        self._add('conformality', float(np.max(residual)))
        b = patch.velocity()[0]
        self._add('boundary_null', float(np.max(np.abs(minkowski_dot(b, b)))))

        rotational = H.is_rotationally_symmetric(about=p0)
        if constant_A and rotational and reference_A is not None and cfg.mode != 'radial':
            A = float(reference_A.samples[0])
            comparison = self._guarded(
                'radial_agreement',
                lambda: integrate_radial(A, H, patch.v_ok, patch.dv, p0)
            )
            if comparison is not None:
                expected = radial_surface(comparison, patch.n, p0)
                self._add('radial_agreement', float(np.max(np.abs(expected.psi - patch.psi))))
        if constant_A and rotational:
            self._add('equivariance', equivariance_error(patch, max(1, patch.n // 8)))

        curve = self._guarded('null_curve', lambda: extract_null_curve(patch))
        if curve is not None:
            if reference_A is not None:
                reference = reference_A if reference_A.n == curve.n else reference_A.resample(curve.n)
                self._add('round_trip', float(np.max(np.abs(curve.A.samples - reference.samples))))
            self._add('canonical_trace', canonical_trace_error(curve))
            self.report.solver['cone'] = curve.cone
            self.report.solver['A_mean'] = float(curve.A.integrate_mean())
        self._add('boundary_normal', boundary_normal_check(patch))

        g = self._guarded('gauss_map', lambda: gauss_map(patch))
        if g is not None:
            margins = disk_margins(g)
            self._add('gauss_disk', margins['interior_max_abs'], 1.0,
                      passed=margins['interior_max_abs'] < 1.0)
            self._add('gauss_boundary_unit', margins['boundary_unit_error'], self._tol('boundary_null'))
            self._add('boundary_degree', boundary_degree(g.boundary), 1.0,
                      passed=boundary_degree(g.boundary) == 1)
            self._add('gz_identity', gz_identity_check(patch, g))
            self._add_guarded('gauss_pde', lambda: gauss_pde_residual(g, H, patch, v_min))
            self._add_guarded('weierstrass', lambda: weierstrass_check(patch, g, H, v_min))
            self._curvature_checks(patch, g, H)

        reconstructor = GraphReconstructor(debug_injectivity=cfg.debug_injectivity)
        gg = self._guarded('graph_reconstruction', lambda: reconstructor.reconstruct(patch))
        if gg is not None:
            self._graph_checks(patch, gg, H, reconstructor)
            if g is not None:
                self._add_guarded('gauss_normal', lambda: gauss_normal_check(g, gg.p, gg.q, gg.rows))
            if 'graph' in cfg.formats:
                self._write('graph.csv', export_graph_csv(gg))
        if curve is not None and 'null_curve' in cfg.formats:
            self._write('null_curve.csv', export_null_curve_csv(curve))

    def _curvature_checks(self, patch: SurfacePatch, g, H: PrescribedCurvature):
        K = gaussian_curvature(g, H, patch)
        levels = [v for v in BLOWUP_LEVELS if v <= patch.v_ok]
        rows = [patch.row_index(v) for v in levels]
        violations = 0
        for upper, lower in zip(rows, rows[1:]):
            if not np.all(K[lower] > K[upper]):
                violations += 1
        if rows and not np.all(K[rows[0]] > 0):
            violations += 1
        self._add('curvature_blowup', violations, 0.0, passed=violations == 0)

        oracle_v = self._tol('oracle_v')
        if patch.v_ok >= oracle_v:
            row = patch.row_index(oracle_v)
            oracle = fundamental_forms_curvature(patch)[row]
            relative = np.abs(K[row] - oracle) / np.abs(oracle)
            self._add('curvature_oracle', float(np.max(relative)))

    def _graph_checks(self, patch: SurfacePatch, gg: GraphGrid, H: PrescribedCurvature,
                      reconstructor: GraphReconstructor):
        sigma = gg.sigma
        self._add('ellipticity', float(np.min(sigma)), 0.0, passed=bool(np.min(sigma) > 0))
        self._add_guarded('maineq', lambda: reconstructor.maineq_residual(gg, H))
        self._add('beltrami', reconstructor.beltrami_check(patch, gg))

        hessian = reconstructor.hessian_sign(gg)
        self._add('hessian_min', hessian.min_abs, self._tol('hessian_min'),
                  passed=hessian.sign_constant and hessian.min_abs > self._tol('hessian_min'))

        winding = reconstructor.gradient_map_winding(gg)
        bad_rows = int(np.sum(winding['winding'] != 1))
        self._add('gradient_winding', bad_rows, 0.0, passed=bad_rows == 0)

        deviation = reconstructor.cone_ratio(gg)
        cone_row = int(np.argmin(np.abs(gg.v_levels - self._tol('cone_v'))))
        self._add('cone_ratio', float(deviation[cone_row]))
        near = gg.v_levels <= CONE_MONOTONE_V
        increasing = bool(np.all(np.diff(deviation[near]) > 0))
        self._add('cone_monotone', 0.0 if increasing else 1.0, 0.0, passed=increasing)

    def _export_patch(self, patch: SurfacePatch):
        formats = self.config.formats
        if 'csv' in formats:
            self._write('surface.csv', export_csv(patch))
        if 'obj' in formats:
            self._write('surface.obj', export_obj(patch))

    def _write(self, name: str, text: str, record: bool = True):
        write_artifact(self.out_dir / name, text)
        if record:
            self.report.artifacts.append(name)


async def run_sweep(configs: Sequence[RunConfig]) -> List[Tuple[int, DiagnosticsReport]]:
    """Independent runs on worker threads; results in input order."""
    logger = logging.getLogger(__name__)
    logger.info(f"Dispatching sweep of {len(configs)} runs")
    return list(await asyncio.gather(
        *(asyncio.to_thread(PipelineRunner(config).run) for config in configs)
    ))
