"""
Diagnostics Recorder Module
Collects per-step metrics as long-form rows (step, time, metric, value)
"""

import logging
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from .metrics import total_variation_by_axis, conserved_sum, h_monitor

logger = logging.getLogger(__name__)

COLUMNS = ['step', 'time', 'metric', 'value']


class DiagnosticsRecorder:
    """Accumulates diagnostics rows in insertion order"""

    def __init__(self, periodic: bool = False, cell_volume: float = 1.0):
        self.periodic = periodic
        self.cell_volume = cell_volume
        self.rows: List[Dict] = []

    def record(self, step: int, time: float, metric: str, value: float):
        self.rows.append({'step': int(step), 'time': float(time),
                          'metric': metric, 'value': float(value)})

    def record_state(self, state, extra: Optional[Dict[str, float]] = None):
        """Standard per-step metrics of a solver state"""
        U = state.U
        tv = total_variation_by_axis(U, periodic=self.periodic)
        if len(tv) == 1:
            self.record(state.n, state.t, 'total_variation', tv[0])
        else:
            for axis, value in enumerate(tv):
                self.record(state.n, state.t, f'total_variation_axis{axis + 1}', value)
        self.record(state.n, state.t, 'mass', conserved_sum(U, self.cell_volume))
        self.record(state.n, state.t, 'min_U', float(np.min(U)))
        self.record(state.n, state.t, 'max_U', float(np.max(U)))
        if state.subcharacteristic_margin is not None:
            self.record(state.n, state.t, 'subcharacteristic_margin', state.subcharacteristic_margin)
        if state.last_collision is not None:
            f, f_eq, f_star, omega_hat = state.last_collision
            report = h_monitor(f, f_eq, f_star, omega_hat, 'square')
            self.record(state.n, state.t, 'h_violation', report['max_violation'])
        for metric, value in (extra or {}).items():
            self.record(state.n, state.t, metric, value)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=COLUMNS)

    def latest(self, metric: str) -> Optional[float]:
        for row in reversed(self.rows):
            if row['metric'] == metric:
                return row['value']
        return None
