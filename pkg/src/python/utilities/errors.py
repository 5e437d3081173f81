# src/python/utilities/errors.py

from typing import Optional


class ConelikeError(Exception):
    """Base error for the toolkit. `code` is the machine-readable tag written to reports."""

    code = 'error'

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DomainError(ConelikeError, ValueError):
    code = 'domain_error'


class ConfigError(ConelikeError):
    code = 'config_error'

    def __init__(self, message: str, line: Optional[int] = None, code: Optional[str] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, code)
        self.line = line


class SpecError(ConelikeError):
    """Rejected null curve data (vanishing or sign-changing A)."""

    code = 'invalid_spec'


class SolverError(ConelikeError):
    code = 'solver_failure'


class CurvatureEvaluationError(SolverError):
    code = 'curvature_evaluation'


class NullCurveError(ConelikeError):
    code = 'invalid_null_curve'


class ReconstructionError(ConelikeError):
    code = 'reconstruction_failure'


class EllipticityError(ConelikeError):
    code = 'ellipticity_violation'

    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = [] if offending is None else list(offending)


class AnalysisError(ConelikeError):
    """A diagnostic that cannot be evaluated on the given patch."""

    code = 'analysis_error'
