# src/python/solver/monitoring.py

from typing import Dict, List, Optional
import logging
import pandas as pd
import numpy as np
from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram


class SolverMonitoring:
    """Per-march diagnostics: prometheus instruments plus a per-step history."""

    def __init__(self, registry: Optional[CollectorRegistry] = None, jump_factor: float = 100.0):
        """
        Sets up a private CollectorRegistry (so several marches can be
        monitored in one process) and the per-step record list.

        Key attributes:
        - `step_data` (List[Dict]): one record per accepted step with `v`,
          `residual`, `spacelike_margin` and `max_abs_psi`.
        - `jump_factor` (float): a residual growing by more than this factor
          between consecutive steps is reported as an anomaly.
        """
        self.logger = logging.getLogger(__name__)
        self.registry = registry if registry is not None else CollectorRegistry()
        self.jump_factor = jump_factor
        self._initialize_metrics()
        self.step_data: List[Dict] = []

    def _initialize_metrics(self):
        """Initialize Prometheus metrics."""
        self.steps_total = Counter(
            'cauchy_march_steps_total',
            'Accepted march steps',
            registry=self.registry
        )
        self.degradations = Counter(
            'cauchy_march_degradations_total',
            'Marches stopped before v_max',
            ['reason'],
            registry=self.registry
        )
        self.residual = Gauge(
            'cauchy_march_conformality_residual',
            'Conformality residual of the latest state',
            registry=self.registry
        )
        self.height = Gauge(
            'cauchy_march_height',
            'Strip height v of the latest state',
            registry=self.registry
        )
        self.step_time = Histogram(
            'cauchy_march_step_seconds',
            'Wall time per march step',
            registry=self.registry
        )

    def record_step(self, v: float, residual: float, spacelike_margin: float,
                    max_abs_psi: float, elapsed: Optional[float] = None):
        self.steps_total.inc()
        self.residual.set(residual)
        self.height.set(v)
        if elapsed is not None:
            self.step_time.observe(elapsed)

        self.step_data.append({
            'v': v,
            'residual': residual,
            'spacelike_margin': spacelike_margin,
            'max_abs_psi': max_abs_psi
        })

    def record_degradation(self, reason: str, v: float):
        self.degradations.labels(reason=reason).inc()
        self.logger.warning(f"March degraded at v={v:.6g}: {reason}")

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.step_data, columns=['v', 'residual', 'spacelike_margin', 'max_abs_psi'])

    def generate_summary(self) -> Dict:
        """
        Deterministic summary of the march for reports. Timings stay in the
        registry only.
        """
        df = self.history_frame()
        if df.empty:
            return {'steps': 0, 'anomalies': []}
        return {
            'steps': len(df),
            'final_v': float(df['v'].iloc[-1]),
            'max_residual': float(df['residual'].max()),
            'final_residual': float(df['residual'].iloc[-1]),
            'min_spacelike_margin': float(df['spacelike_margin'].min()),
            'max_abs_psi': float(df['max_abs_psi'].max()),
            'anomalies': self._detect_anomalies(df)
        }

    def _detect_anomalies(self, df: pd.DataFrame) -> List[Dict]:
        """Residual jumps between consecutive steps."""
        anomalies = []
        previous = df['residual'].shift(1)
        floor = np.finfo(float).eps
        ratio = df['residual'] / previous.clip(lower=floor)
        jumps = df[(ratio > self.jump_factor) & (df['residual'] > floor * 1e3)]
        for _, row in jumps.iterrows():
            anomalies.append({
                'type': 'residual_jump',
                'v': float(row['v']),
                'value': float(row['residual']),
                'threshold': self.jump_factor
            })
        return anomalies
