"""Single-excitation interaction kernel of the chirally coupled chain.

The N x N complex kernel combines the coherent spin-exchange and the
collective dissipation mediated by the guided modes: left-moving photons
couple site pairs mu < nu at rate gamma_L, right-moving ones mu > nu at
gamma_R, and every diagonal entry is -gamma/2.  Phase disorder enters as a
random shift of each site's accumulated propagation phase, i.e. the clean
phase xi*|mu - nu| picks up the difference of the onsite phases with the
sign set by the site ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .basis import dimension
from .errors import ParameterError


@dataclass(frozen=True)
class SystemParams:
    """One physical configuration of the chain.

    Rates are in units of the total decay rate gamma (default 1, so times are
    gamma*t); `phase` is the dimensionless lattice phase k_s * spacing;
    `disorder_width` is the half-width W of the uniform onsite phase disorder.
    """

    n_sites: int
    n_excited: int
    gamma: float = 1.0
    directionality: float = 0.0
    phase: float = 0.0
    disorder_width: float = 0.0

    def __post_init__(self):
        dimension(self.n_sites, self.n_excited)  # validates N, M
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if not -1.0 <= self.directionality <= 1.0:
            raise ParameterError(
                f"directionality must lie in [-1, 1], got {self.directionality}"
            )
        if not np.isfinite(self.phase):
            raise ParameterError(f"phase must be finite, got {self.phase}")
        if not 0.0 <= self.disorder_width <= pi:
            raise ParameterError(
                f"disorder_width must lie in [0, pi], got {self.disorder_width}"
            )

    @property
    def gamma_left(self) -> float:
        return self.gamma * (1.0 - self.directionality) / 2.0

    @property
    def gamma_right(self) -> float:
        return self.gamma * (1.0 + self.directionality) / 2.0

    @property
    def dim(self) -> int:
        return dimension(self.n_sites, self.n_excited)


def validate_disorder(phases, params: SystemParams) -> np.ndarray:
    """Check a disorder realization against the params and return it as an array."""
    w = np.asarray(phases, dtype=float)
    if w.shape != (params.n_sites,):
        raise ParameterError(
            f"disorder has shape {w.shape}, expected ({params.n_sites},)"
        )
    if not np.all(np.isfinite(w)):
        raise ParameterError("disorder phases must be finite")
    if np.any(np.abs(w) > params.disorder_width + 1e-12):
        raise ParameterError(
            f"disorder phases exceed the configured width {params.disorder_width}"
        )
    return w


def build_kernel(params: SystemParams, phases) -> np.ndarray:
    """N x N kernel for one disorder realization.

    Off-diagonal moduli are exactly gamma_L (upper triangle) and gamma_R
    (lower); all position and disorder dependence sits in the phases.
    """
    w = validate_disorder(phases, params)
    n = params.n_sites
    idx = np.arange(n)
    theta = params.phase * idx + w  # accumulated phase coordinate per site
    # Propagation phase over |r_mu - r_nu| keeps the clean site ordering, so
    # the disorder difference enters with the sign of nu - mu.
    order = np.sign(idx[None, :] - idx[:, None])
    arg = order * (theta[None, :] - theta[:, None])
    ph = np.exp(-1j * arg)
    vbar = np.where(
        idx[:, None] < idx[None, :],
        -params.gamma_left * ph,
        -params.gamma_right * ph,
    )
    np.fill_diagonal(vbar, -params.gamma / 2.0)
    return vbar


def decay_matrix(vbar: np.ndarray) -> np.ndarray:
    """Collective decay matrix Gamma = -(V + V^dagger); Hermitian PSD, rank <= 2."""
    return -(vbar + vbar.conj().T)
