"""Time propagation of the amplitude vector under the sector generator.

The generator is time independent within one realization, so the default
method exponentiates it once per run (scaling-and-squaring Pade) and reuses
the step propagator across the whole grid.  A classical fixed-substep RK4
integrator is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

import numpy as np
import scipy.linalg

from . import basis
from .errors import IntegratorError, NumericsError, ParameterError

# RK4 substeps are chosen so that ||V||_1 * h stays below this.
RK4_NORM_STEP = 0.1
CROSS_CHECK_RTOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid {0, dt, ..., t_max} in units of 1/gamma."""

    t_max: float = 100.0
    n_steps: int = 400

    def __post_init__(self):
        if self.t_max <= 0 or self.n_steps < 1:
            raise ParameterError(
                f"need t_max > 0 and n_steps >= 1, got {self.t_max}, {self.n_steps}"
            )

    @property
    def dt(self) -> float:
        return self.t_max / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


@dataclass
class Trajectory:
    """Amplitudes a_q(t_k) on the grid plus the per-step squared norm."""

    grid: TimeGrid
    amplitudes: np.ndarray  # (n_steps + 1, dim) complex
    norms: np.ndarray = field(init=False)  # ||a(t_k)||^2

    def __post_init__(self):
        self.norms = np.einsum(
            "ij,ij->i", self.amplitudes, self.amplitudes.conj()
        ).real

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def initial_state(excited_sites, n_sites: int, n_excited: int) -> np.ndarray:
    """Unit amplitude on the bare state with the given excited sites."""
    q = basis.rank(excited_sites, n_sites, n_excited)
    a0 = np.zeros(basis.dimension(n_sites, n_excited), dtype=complex)
    a0[q] = 1.0
    return a0


def checkpoint_norm(traj: Trajectory) -> np.ndarray:
    """Per-step ||a||^2; feeds the sum-of-populations identity."""
    return traj.norms


def step_propagator(v: np.ndarray, dt: float) -> np.ndarray:
    """exp(V * dt), with exact triangular structure preserved.

    A triangular generator (cascaded coupling, D = +-1) has a triangular
    exponential; projecting out roundoff there keeps causality exact.
    """
    if not np.all(np.isfinite(v)):
        raise NumericsError("generator contains non-finite entries")
    p = scipy.linalg.expm(v * dt)
    strict_upper = np.triu(v, 1)
    strict_lower = np.tril(v, -1)
    if not strict_upper.any():
        p = np.tril(p)
    elif not strict_lower.any():
        p = np.triu(p)
    return p


def _propagate_expm(v: np.ndarray, a0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    p = step_propagator(v, grid.dt)
    out = np.empty((grid.n_steps + 1, a0.size), dtype=complex)
    out[0] = a0
    a = a0
    for k in range(grid.n_steps):
        a = p @ a
        out[k + 1] = a
    return out


def _propagate_rk4(v: np.ndarray, a0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    if not np.all(np.isfinite(v)):
        raise NumericsError("generator contains non-finite entries")
    n_sub = max(1, ceil(np.linalg.norm(v, 1) * grid.dt / RK4_NORM_STEP))
    h = grid.dt / n_sub
    out = np.empty((grid.n_steps + 1, a0.size), dtype=complex)
    out[0] = a0
    a = a0.astype(complex)
    for k in range(grid.n_steps):
        for _ in range(n_sub):
            k1 = v @ a
            k2 = v @ (a + 0.5 * h * k1)
            k3 = v @ (a + 0.5 * h * k2)
            k4 = v @ (a + h * k3)
            a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = a
    return out


def propagate(
    v: np.ndarray,
    a0: np.ndarray,
    grid: TimeGrid,
    method: str = "expm",
    cross_check: bool = False,
) -> Trajectory:
    """Solve da/dt = V a on the grid; returns the full amplitude history."""
    a0 = np.asarray(a0, dtype=complex)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or a0.shape != (v.shape[0],):
        raise ParameterError(
            f"shape mismatch: V {v.shape} vs amplitude vector {a0.shape}"
        )
    if method not in ("expm", "rk4"):
        raise ParameterError(f"unknown method {method!r}")
    runner = _propagate_expm if method == "expm" else _propagate_rk4
    amplitudes = runner(v, a0, grid)
    if cross_check:
        other = _propagate_rk4 if method == "expm" else _propagate_expm
        alt = other(v, a0, grid)
        scale = max(np.max(np.linalg.norm(amplitudes, axis=1)), 1e-300)
        err = np.max(np.linalg.norm(amplitudes - alt, axis=1)) / scale
        if err > CROSS_CHECK_RTOL:
            raise IntegratorError(
                f"expm and rk4 trajectories disagree: relative error {err:.3e}"
            )
    return Trajectory(grid=grid, amplitudes=amplitudes)
