"""Populations, occupation moments, cumulant correlations, crossing times.

All expectation values are evaluated from the unnormalized amplitudes by
default: the sustained long-time signals under disorder are a subradiance
effect that renormalizing by the decayed norm would wash out.  Pass
normalize=True to divide every moment by ||a(t)||^2 before cumulants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import basis
from .errors import ParameterError
from .evolve import Trajectory


def default_r_max(n_sites: int) -> int:
    """Largest correlation distance reported by default."""
    return min(6, n_sites - 1)


def _weights(traj: Trajectory, normalize: bool) -> np.ndarray:
    w = np.abs(traj.amplitudes) ** 2
    if normalize:
        norms = traj.norms
        w = np.divide(w, norms[:, None], out=np.zeros_like(w), where=norms[:, None] > 0)
    return w


def populations(
    traj: Trajectory, n_sites: int, n_excited: int, normalize: bool = False
) -> np.ndarray:
    """(T, N) array of per-site excitation probabilities P_m(t_k)."""
    occ = basis.occupancy_matrix(n_sites, n_excited)
    if traj.amplitudes.shape[1] != occ.shape[0]:
        raise ParameterError("trajectory dimension does not match (N, M)")
    return _weights(traj, normalize) @ occ


def moment(
    traj: Trajectory, sites, n_sites: int, n_excited: int, normalize: bool = False
) -> np.ndarray:
    """Time series of <prod_j n_j> over the given distinct sites.

    Identically zero when more sites are requested than there are excitations.
    """
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ParameterError(f"sites {sites} are not distinct")
    if any(s < 1 or s > n_sites for s in sites):
        raise ParameterError(f"sites {sites} outside 1..{n_sites}")
    occ = basis.occupancy_matrix(n_sites, n_excited)
    mask = np.ones(occ.shape[0])
    for s in sites:
        mask = mask * occ[:, s - 1]
    return _weights(traj, normalize) @ mask


def pair_moments(
    traj: Trajectory, n_sites: int, n_excited: int, r: int, normalize: bool = False
) -> np.ndarray:
    """(T, N-r) array of <n_j n_{j+r}> for j = 1..N-r."""
    if not 1 <= r <= n_sites - 1:
        raise ParameterError(f"need 1 <= r <= N-1, got r={r}")
    occ = basis.occupancy_matrix(n_sites, n_excited)
    mask = occ[:, : n_sites - r] * occ[:, r:]
    return _weights(traj, normalize) @ mask


def triple_moments(
    traj: Trajectory, n_sites: int, n_excited: int, normalize: bool = False
) -> np.ndarray:
    """(T, N-2) array of <n_j n_{j+1} n_{j+2}>."""
    if n_sites < 3:
        raise ParameterError(f"need N >= 3, got N={n_sites}")
    occ = basis.occupancy_matrix(n_sites, n_excited)
    mask = occ[:, :-2] * occ[:, 1:-1] * occ[:, 2:]
    return _weights(traj, normalize) @ mask


def g2(pops: np.ndarray, pair_m: np.ndarray, r: int) -> np.ndarray:
    """Bulk-averaged connected two-point cumulant at distance r.

    sum_j (<n_j n_{j+r}> - <n_j><n_{j+r}>) / (N - r), j = 1..N-r.
    """
    n_sites = pops.shape[1]
    if not 1 <= r <= n_sites - 1:
        raise ParameterError(f"need 1 <= r <= N-1, got r={r}")
    if pair_m.shape != (pops.shape[0], n_sites - r):
        raise ParameterError(
            f"pair moments have shape {pair_m.shape}, expected "
            f"({pops.shape[0]}, {n_sites - r})"
        )
    connected = pair_m - pops[:, : n_sites - r] * pops[:, r:]
    return connected.sum(axis=1) / (n_sites - r)


def g3(pops: np.ndarray, triple_m: np.ndarray) -> np.ndarray:
    """Modified third-order correlation: full triple moment minus the product
    of the three populations, bulk-averaged over the N-2 consecutive triples.
    """
    n_sites = pops.shape[1]
    if n_sites < 3:
        raise ParameterError(f"need N >= 3, got N={n_sites}")
    if triple_m.shape != (pops.shape[0], n_sites - 2):
        raise ParameterError(
            f"triple moments have shape {triple_m.shape}, expected "
            f"({pops.shape[0]}, {n_sites - 2})"
        )
    product = pops[:, :-2] * pops[:, 1:-1] * pops[:, 2:]
    return (triple_m - product).sum(axis=1) / (n_sites - 2)


def crossing_time(disordered, clean, times, t_min: float = 1.0):
    """Earliest time where the disordered series overtakes the clean one.

    Looks for a sign change of d = disordered - clean from negative to
    nonnegative whose tail stays nonnegative on the rest of the grid, and
    interpolates linearly between the bracketing grid points.  Returns None
    when no such crossing exists.
    """
    disordered = np.asarray(disordered, dtype=float)
    clean = np.asarray(clean, dtype=float)
    times = np.asarray(times, dtype=float)
    if disordered.shape != clean.shape or disordered.shape != times.shape:
        raise ParameterError(
            f"series/grid shapes differ: {disordered.shape}, {clean.shape}, {times.shape}"
        )
    d = disordered - clean
    for k in range(d.size - 1):
        if d[k] < 0.0 <= d[k + 1] and np.all(d[k + 1 :] >= 0.0):
            frac = -d[k] / (d[k + 1] - d[k])
            t_star = times[k] + frac * (times[k + 1] - times[k])
            if t_star > t_min:
                return float(t_star)
    return None


@dataclass
class TrajectoryObservables:
    """Per-realization bundle of everything the ensemble aggregates."""

    times: np.ndarray
    populations: np.ndarray  # (T, N)
    pair_moments: dict[int, np.ndarray]  # r -> (T, N-r)
    triple_moments: np.ndarray | None  # (T, N-2), None when N < 3
    norms: np.ndarray  # raw ||a||^2, never normalized

    def g2(self, r: int) -> np.ndarray:
        return g2(self.populations, self.pair_moments[r], r)

    def g2_block(self) -> np.ndarray:
        """(T, r_max) matrix; column r-1 is the g2 series at distance r."""
        return np.column_stack([self.g2(r) for r in sorted(self.pair_moments)])

    def g3(self) -> np.ndarray:
        if self.triple_moments is None:
            raise ParameterError("g3 needs N >= 3")
        return g3(self.populations, self.triple_moments)


def measure(
    traj: Trajectory,
    n_sites: int,
    n_excited: int,
    r_max: int | None = None,
    normalize: bool = False,
) -> TrajectoryObservables:
    """Compute the full observable bundle of one trajectory."""
    if r_max is None:
        r_max = default_r_max(n_sites)
    if not 1 <= r_max <= n_sites - 1:
        raise ParameterError(f"need 1 <= r_max <= N-1, got {r_max}")
    occ = basis.occupancy_matrix(n_sites, n_excited)
    if traj.amplitudes.shape[1] != occ.shape[0]:
        raise ParameterError("trajectory dimension does not match (N, M)")
    w = _weights(traj, normalize)
    pops = w @ occ
    pairs = {
        r: w @ (occ[:, : n_sites - r] * occ[:, r:]) for r in range(1, r_max + 1)
    }
    triples = None
    if n_sites >= 3:
        triples = w @ (occ[:, :-2] * occ[:, 1:-1] * occ[:, 2:])
    return TrajectoryObservables(
        times=traj.times,
        populations=pops,
        pair_moments=pairs,
        triple_moments=triples,
        norms=traj.norms.copy(),
    )
