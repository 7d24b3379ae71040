"""Parameter sweeps behind the figure-producing CLI commands.

Each builder returns a SweepResult: one x axis plus a set of named columns,
evaluated in a fixed row-major order so the emitted CSV is byte-identical
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .analytic import molecular_probability
from .model import PhysicalParams
from .tdse import VerifyPoint

__all__ = [
    "SweepResult",
    "axis_grid",
    "production_vs_time",
    "production_vs_amplitude",
    "entropy_vs_time",
    "default_verify_points",
]


@dataclass(frozen=True)
class SweepResult:
    x_name: str
    x: np.ndarray
    labels: tuple[str, ...]
    columns: tuple[np.ndarray, ...]

    def rows(self):
        """Row-major iteration matching the CSV layout."""
        for i, xv in enumerate(self.x):
            yield (float(xv), *(float(col[i]) for col in self.columns))


def axis_grid(start: float, stop: float, count: int, spacing: str = "linear") -> np.ndarray:
    if count < 2:
        raise ValueError("sweep needs at least 2 points")
    if not start < stop:
        raise ValueError(f"sweep needs start < stop, got [{start}, {stop}]")
    if spacing == "linear":
        return np.linspace(start, stop, count)
    if spacing == "log":
        if start <= 0.0:
            raise ValueError("log spacing needs a positive start")
        return np.geomspace(start, stop, count)
    raise ValueError(f"spacing must be 'linear' or 'log', got {spacing!r}")


def production_vs_time(params: PhysicalParams, t_grid: np.ndarray,
                       n_b_values: tuple[int, ...]) -> SweepResult:
    """Molecule-production probability P against the sweep timescale T."""
    columns = []
    for n_b in n_b_values:
        col = np.array([
            molecular_probability(n_b, replace(params, t_ramp=float(t))).p_mol
            for t in t_grid
        ])
        columns.append(col)
    labels = tuple(f"P_nb{n_b}" for n_b in n_b_values)
    return SweepResult(x_name="T", x=np.asarray(t_grid, dtype=float),
                       labels=labels, columns=tuple(columns))


def production_vs_amplitude(params: PhysicalParams, k_grid: np.ndarray,
                            n_b: int, m_values: tuple[float, ...]) -> SweepResult:
    """P against the sweep amplitude k, one column per scattering strength."""
    columns = []
    for m in m_values:
        col = np.array([
            molecular_probability(
                n_b, replace(params, k=float(k), u_x=float(m), u_b=0.0)).p_mol
            for k in k_grid
        ])
        columns.append(col)
    labels = tuple(f"P_m{m:g}" for m in m_values)
    return SweepResult(x_name="k", x=np.asarray(k_grid, dtype=float),
                       labels=labels, columns=tuple(columns))


def entropy_vs_time(params: PhysicalParams, t_grid: np.ndarray,
                    n_b_values: tuple[int, ...],
                    entropy_mode: str = "amplitude") -> SweepResult:
    """Entanglement entropy S of the final state against the sweep timescale."""
    columns = []
    for n_b in n_b_values:
        col = np.array([
            molecular_probability(n_b, replace(params, t_ramp=float(t)),
                                  entropy_mode=entropy_mode).entropy
            for t in t_grid
        ])
        columns.append(col)
    labels = tuple(f"S_nb{n_b}" for n_b in n_b_values)
    return SweepResult(x_name="T", x=np.asarray(t_grid, dtype=float),
                       labels=labels, columns=tuple(columns))


VERIFY_K_VALUES = (10.0, 32.5, 55.0, 77.5, 100.0)
VERIFY_T_VALUES = (0.01, 1.2575, 2.505, 3.7525, 5.0)
VERIFY_NB_VALUES = (0, 1, 2, 5)
VERIFY_M_VALUES = (0.0, 0.5)


def default_verify_points(k_values=VERIFY_K_VALUES, t_values=VERIFY_T_VALUES,
                          n_b_values=VERIFY_NB_VALUES,
                          m_values=VERIFY_M_VALUES) -> list[VerifyPoint]:
    """Verification grid for the oracle run; defaults give the 200-point
    regime grid (5 amplitudes x 5 timescales x 4 molecule numbers x 2
    scattering strengths, row-major).

    Points outside the regime k +- a >= 10 c are kept so the verifier can
    flag them as skipped rather than dropping them silently.
    """
    points = []
    for k in k_values:
        for t_ramp in t_values:
            for n_b in n_b_values:
                for m_scatter in m_values:
                    params = PhysicalParams(k=float(k), t_ramp=float(t_ramp),
                                            u_x=float(m_scatter), u_b=0.0)
                    points.append(VerifyPoint(params=params, n_b=int(n_b)))
    return points
