"""Dissipative excitation dynamics of a chirally coupled, disordered atomic chain."""

__version__ = "0.1.0"

from .basis import dimension, enumerate_states, neighbors, rank, unrank
from .coupling import assemble, row_structure
from .ensemble import (
    DEFAULT_MASTER_SEED,
    EnsembleConfig,
    EnsembleResult,
    convergence_check,
    draw_disorder,
    g2_of_averaged_moments,
    g3_of_averaged_moments,
    run_clean_reference,
    run_ensemble,
)
from .errors import (
    CapacityError,
    ChainError,
    ConfigError,
    IntegratorError,
    NumericsError,
    ParameterError,
)
from .evolve import TimeGrid, Trajectory, checkpoint_norm, initial_state, propagate
from .kernel import SystemParams, build_kernel, decay_matrix
from .observables import (
    crossing_time,
    g2,
    g3,
    measure,
    moment,
    pair_moments,
    populations,
    triple_moments,
)

__all__ = [
    "__version__",
    "dimension",
    "enumerate_states",
    "neighbors",
    "rank",
    "unrank",
    "assemble",
    "row_structure",
    "DEFAULT_MASTER_SEED",
    "EnsembleConfig",
    "EnsembleResult",
    "convergence_check",
    "draw_disorder",
    "g2_of_averaged_moments",
    "g3_of_averaged_moments",
    "run_clean_reference",
    "run_ensemble",
    "CapacityError",
    "ChainError",
    "ConfigError",
    "IntegratorError",
    "NumericsError",
    "ParameterError",
    "TimeGrid",
    "Trajectory",
    "checkpoint_norm",
    "initial_state",
    "propagate",
    "SystemParams",
    "build_kernel",
    "decay_matrix",
    "crossing_time",
    "g2",
    "g3",
    "measure",
    "moment",
    "pair_moments",
    "populations",
    "triple_moments",
]
