"""Disorder ensemble driver: reproducible draws, parallel runs, averaging.

Each realization owns an independent counter-based random stream keyed by
(master_seed, realization_index), so any single realization can be recomputed
in isolation and the ensemble result does not depend on how realizations are
scheduled across workers.  Reduction always happens in ascending realization
order, which makes the floating-point output bit-reproducible.
"""

from __future__ import annotations

import dataclasses
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .basis import validate_state
from .coupling import DEFAULT_DIM_CAP, SparsityPattern, assemble, row_structure
from .errors import ChainError, ParameterError
from .evolve import TimeGrid, initial_state, propagate
from .kernel import SystemParams, build_kernel
from .observables import default_r_max, measure

MODE_CUMULANT_FIRST = "cumulant-then-average"
MODE_AVERAGE_FIRST = "average-then-cumulant"
AVERAGING_MODES = (MODE_CUMULANT_FIRST, MODE_AVERAGE_FIRST)

DEFAULT_MASTER_SEED = 8675309


@dataclass(frozen=True)
class EnsembleConfig:
    """How many realizations to run, how to seed them, how to average."""

    n_realizations: int = 400
    master_seed: int = DEFAULT_MASTER_SEED
    averaging_mode: str = MODE_CUMULANT_FIRST
    workers: int = 1
    r_max: int | None = None
    normalize: bool = False

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ParameterError(
                f"n_realizations must be >= 1, got {self.n_realizations}"
            )
        if self.averaging_mode not in AVERAGING_MODES:
            raise ParameterError(
                f"averaging_mode must be one of {AVERAGING_MODES}, "
                f"got {self.averaging_mode!r}"
            )
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ParameterError("master_seed must fit in an unsigned 64-bit int")


def draw_disorder(
    width: float, n_sites: int, realization_index: int, master_seed: int
) -> np.ndarray:
    """N uniform phases in [-width, width] from a per-realization stream."""
    if not 0.0 <= width <= np.pi:
        raise ParameterError(f"disorder width must lie in [0, pi], got {width}")
    seq = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(int(realization_index),)
    )
    rng = np.random.Generator(np.random.Philox(seq))
    return rng.uniform(-width, width, n_sites)


@dataclass
class EnsembleResult:
    """Disorder-averaged series plus enough metadata to reproduce the run."""

    params: SystemParams
    quench: tuple[int, ...]
    grid: TimeGrid
    config: EnsembleConfig
    times: np.ndarray
    r_values: list[int]
    mean_populations: np.ndarray  # (T, N)
    se_populations: np.ndarray
    g2: np.ndarray  # (T, r_max); column r-1 is distance r
    se_g2: np.ndarray
    g3: np.ndarray | None  # (T,), None when N < 3
    se_g3: np.ndarray | None
    mean_norms: np.ndarray
    se_norms: np.ndarray
    mean_pair_moments: dict[int, np.ndarray]
    mean_triple_moments: np.ndarray | None
    n_completed: int
    complete: bool
    max_norm_increase: float
    checkpoints: dict[int, "EnsembleResult"] = field(default_factory=dict)


# Worker-side immutable inputs, installed once per process by the pool
# initializer (or set inline for single-worker runs).
_WORKER_STATE: dict = {}


def _init_worker(state: dict) -> None:
    _WORKER_STATE.clear()
    _WORKER_STATE.update(state)


def _realization_payload(
    index: int,
    params: SystemParams,
    grid: TimeGrid,
    a0: np.ndarray,
    pattern: SparsityPattern,
    cfg: EnsembleConfig,
    r_max: int,
):
    phases = draw_disorder(
        params.disorder_width, params.n_sites, index, cfg.master_seed
    )
    vbar = build_kernel(params, phases)
    v = assemble(params, vbar, pattern)
    traj = propagate(v, a0, grid)
    obs = measure(
        traj, params.n_sites, params.n_excited, r_max=r_max, normalize=cfg.normalize
    )
    g2_block = obs.g2_block()
    g3_series = obs.g3() if params.n_sites >= 3 else None
    norm_increase = float(np.max(np.diff(traj.norms))) if grid.n_steps else 0.0
    pairs = [obs.pair_moments[r] for r in sorted(obs.pair_moments)]
    return (
        obs.populations,
        pairs,
        obs.triple_moments,
        traj.norms,
        g2_block,
        g3_series,
        norm_increase,
    )


def _simulate_one(index: int):
    s = _WORKER_STATE
    try:
        return _realization_payload(
            index, s["params"], s["grid"], s["a0"], s["pattern"], s["cfg"], s["r_max"]
        )
    except Exception as exc:  # noqa: BLE001 - re-raise with the failing index
        raise ChainError(f"realization {index} failed: {exc}") from exc


class _Accumulator:
    """Fixed-order running sums and sums of squares for every series."""

    def __init__(self, n_sites, n_steps, r_values, has_triples):
        t = n_steps + 1
        self.n = 0
        self.r_values = r_values
        self.pop_sum = np.zeros((t, n_sites))
        self.pop_sq = np.zeros((t, n_sites))
        self.g2_sum = np.zeros((t, len(r_values)))
        self.g2_sq = np.zeros((t, len(r_values)))
        self.g3_sum = np.zeros(t) if has_triples else None
        self.g3_sq = np.zeros(t) if has_triples else None
        self.norm_sum = np.zeros(t)
        self.norm_sq = np.zeros(t)
        self.pair_sums = {r: np.zeros((t, n_sites - r)) for r in r_values}
        self.triple_sum = np.zeros((t, n_sites - 2)) if has_triples else None
        self.max_norm_increase = -np.inf

    def add(self, payload) -> None:
        pops, pairs, triples, norms, g2_block, g3_series, norm_increase = payload
        self.n += 1
        self.pop_sum += pops
        self.pop_sq += pops**2
        self.g2_sum += g2_block
        self.g2_sq += g2_block**2
        if g3_series is not None:
            self.g3_sum += g3_series
            self.g3_sq += g3_series**2
            self.triple_sum += triples
        self.norm_sum += norms
        self.norm_sq += norms**2
        for r, block in zip(self.r_values, pairs):
            self.pair_sums[r] += block
        self.max_norm_increase = max(self.max_norm_increase, norm_increase)


def _standard_error(total, total_sq, n):
    if n < 2:
        return np.zeros_like(total)
    mean = total / n
    var = np.maximum(total_sq - n * mean**2, 0.0) / (n - 1)
    return np.sqrt(var / n)


def _cumulants_from_moments(n_sites, r_values, mean_pops, mean_pairs, mean_triples):
    """Connected correlations of the averaged moments (mode b)."""
    cols = []
    for r in r_values:
        connected = mean_pairs[r] - mean_pops[:, : n_sites - r] * mean_pops[:, r:]
        cols.append(connected.sum(axis=1) / (n_sites - r))
    g2_out = np.column_stack(cols)
    g3_out = None
    if mean_triples is not None:
        product = mean_pops[:, :-2] * mean_pops[:, 1:-1] * mean_pops[:, 2:]
        g3_out = (mean_triples - product).sum(axis=1) / (n_sites - 2)
    return g2_out, g3_out


def g2_of_averaged_moments(result: "EnsembleResult") -> np.ndarray:
    """Mode-(b) two-point cumulants from a result's stored averaged moments.

    Available for any result regardless of its configured averaging mode;
    includes the disorder-induced covariance of the populations.
    """
    g2_out, _ = _cumulants_from_moments(
        result.params.n_sites,
        result.r_values,
        result.mean_populations,
        result.mean_pair_moments,
        None,
    )
    return g2_out


def g3_of_averaged_moments(result: "EnsembleResult"):
    """Mode-(b) third-order correlation from the stored averaged moments."""
    _, g3_out = _cumulants_from_moments(
        result.params.n_sites,
        result.r_values,
        result.mean_populations,
        result.mean_pair_moments,
        result.mean_triple_moments,
    )
    return g3_out


def _finalize(
    acc: _Accumulator,
    params: SystemParams,
    quench,
    grid: TimeGrid,
    cfg: EnsembleConfig,
    complete: bool,
) -> EnsembleResult:
    n = acc.n
    mean_pops = acc.pop_sum / n
    mean_pairs = {r: s / n for r, s in acc.pair_sums.items()}
    mean_triples = None if acc.triple_sum is None else acc.triple_sum / n
    if cfg.averaging_mode == MODE_CUMULANT_FIRST:
        g2_out = acc.g2_sum / n
        g3_out = None if acc.g3_sum is None else acc.g3_sum / n
    else:
        g2_out, g3_out = _cumulants_from_moments(
            params.n_sites, acc.r_values, mean_pops, mean_pairs, mean_triples
        )
    return EnsembleResult(
        params=params,
        quench=tuple(quench),
        grid=grid,
        config=dataclasses.replace(cfg, n_realizations=n),
        times=grid.times,
        r_values=list(acc.r_values),
        mean_populations=mean_pops,
        se_populations=_standard_error(acc.pop_sum, acc.pop_sq, n),
        g2=g2_out,
        se_g2=_standard_error(acc.g2_sum, acc.g2_sq, n),
        g3=g3_out,
        se_g3=(
            None
            if acc.g3_sum is None
            else _standard_error(acc.g3_sum, acc.g3_sq, n)
        ),
        mean_norms=acc.norm_sum / n,
        se_norms=_standard_error(acc.norm_sum, acc.norm_sq, n),
        mean_pair_moments=mean_pairs,
        mean_triple_moments=mean_triples,
        n_completed=n,
        complete=complete,
        max_norm_increase=acc.max_norm_increase,
    )


def run_ensemble(
    params: SystemParams,
    quench,
    grid: TimeGrid,
    cfg: EnsembleConfig,
    progress=None,
    checkpoint_at=(),
    dim_cap: int = DEFAULT_DIM_CAP,
) -> EnsembleResult:
    """Average the per-realization pipeline over cfg.n_realizations draws.

    The SE of the correlation series always quantifies the spread of the
    per-realization cumulants, whichever averaging mode produced the mean.
    A KeyboardInterrupt (or an exception raised by the progress callback)
    stops the run after the current realization and returns a partial result
    with complete=False.  `checkpoint_at` snapshots intermediate aggregates,
    e.g. for convergence studies, at the given realization counts.
    """
    quench = validate_state(quench, params.n_sites, params.n_excited)
    checkpoints = sorted(set(int(c) for c in checkpoint_at))
    if any(c < 1 or c > cfg.n_realizations for c in checkpoints):
        raise ParameterError(
            f"checkpoints {checkpoints} outside 1..{cfg.n_realizations}"
        )
    r_max = cfg.r_max if cfg.r_max is not None else default_r_max(params.n_sites)
    if not 1 <= r_max <= params.n_sites - 1:
        raise ParameterError(f"need 1 <= r_max <= N-1, got {r_max}")
    pattern = row_structure(params.n_sites, params.n_excited)
    if params.dim > dim_cap:
        # surface the capacity error before any work
        assemble(params, np.zeros((params.n_sites, params.n_sites)), pattern, dim_cap)
    a0 = initial_state(quench, params.n_sites, params.n_excited)
    r_values = list(range(1, r_max + 1))
    acc = _Accumulator(
        params.n_sites, grid.n_steps, r_values, has_triples=params.n_sites >= 3
    )
    state = {
        "params": params,
        "grid": grid,
        "a0": a0,
        "pattern": pattern,
        "cfg": cfg,
        "r_max": r_max,
    }
    n_total = cfg.n_realizations
    snapshots: dict[int, EnsembleResult] = {}
    complete = False

    def _reduce(payload_iter):
        nonlocal complete
        for payload in payload_iter:
            acc.add(payload)
            if acc.n in checkpoints and acc.n < n_total:
                snapshots[acc.n] = _finalize(acc, params, quench, grid, cfg, True)
            if progress is not None:
                progress(acc.n, n_total)
        complete = True

    try:
        if cfg.workers == 1:
            _init_worker(state)
            _reduce(_simulate_one(i) for i in range(n_total))
        else:
            with multiprocessing.Pool(
                processes=cfg.workers, initializer=_init_worker, initargs=(state,)
            ) as pool:
                _reduce(pool.imap(_simulate_one, range(n_total), chunksize=4))
    except KeyboardInterrupt:
        if acc.n == 0:
            raise
    result = _finalize(acc, params, quench, grid, cfg, complete)
    result.checkpoints = snapshots
    return result


def run_clean_reference(
    params: SystemParams, quench, grid: TimeGrid, cfg: EnsembleConfig
) -> EnsembleResult:
    """Single disorder-free run with otherwise identical settings."""
    clean_params = dataclasses.replace(params, disorder_width=0.0)
    clean_cfg = dataclasses.replace(cfg, n_realizations=1, workers=1)
    return run_ensemble(clean_params, quench, grid, clean_cfg)


def convergence_check(result_a: EnsembleResult, result_b: EnsembleResult) -> float:
    """Max relative deviation of the total population between two runs.

    The runs must be identical apart from their realization counts.
    """
    def _normalized(cfg):
        # worker count cannot change the numbers, so ignore it here too
        return dataclasses.replace(cfg, n_realizations=1, workers=1)

    if (
        result_a.params != result_b.params
        or result_a.quench != result_b.quench
        or result_a.grid != result_b.grid
        or _normalized(result_a.config) != _normalized(result_b.config)
    ):
        raise ParameterError("results differ in more than n_realizations")
    total_a = result_a.mean_populations.sum(axis=1)
    total_b = result_b.mean_populations.sum(axis=1)
    return float(np.max(np.abs(total_a - total_b) / total_b))
