"""Run configuration: YAML schema, validation, sweep expansion.

A run file is a nested key-value document; angle-valued fields accept plain
numbers or strings like "pi/8" and "0.8*pi".  See `presets` for complete
examples of the schema:

    system:   n_atoms, n_excitations, gamma, directionality, phase,
              disorder_width
    quench:   sites (list of M site labels, 1-based)
    grid:     t_max, n_steps
    ensemble: n_realizations, master_seed, averaging_mode, workers
              (workers 0 = CHIRALCHAIN_WORKERS env var, else 1)
    output:   directory, observables, r_max, normalize, crossing_times,
              crossing_t_min
    sweep:    axis (directionality | phase | disorder_width |
              quench_separation), values   [optional section]
"""

from __future__ import annotations

import dataclasses
import os
import re
from dataclasses import dataclass
from math import pi

import yaml

from .basis import validate_state
from .ensemble import AVERAGING_MODES, DEFAULT_MASTER_SEED, EnsembleConfig
from .errors import ConfigError, ParameterError
from .evolve import TimeGrid
from .kernel import SystemParams

WORKERS_ENV_VAR = "CHIRALCHAIN_WORKERS"
OBSERVABLE_NAMES = ("populations", "g2", "g3", "norms")
SWEEP_AXES = ("directionality", "phase", "disorder_width", "quench_separation")

_PI_PATTERN = re.compile(
    r"\s*([+-])?\s*(\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*",
    re.IGNORECASE,
)


def parse_angle(value, where: str) -> float:
    """Accept a number or a 'pi' expression such as pi/8, 0.8*pi, -pi."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _PI_PATTERN.fullmatch(value)
        if m:
            sign = -1.0 if m.group(1) == "-" else 1.0
            coef = float(m.group(2)) if m.group(2) else 1.0
            div = float(m.group(3)) if m.group(3) else 1.0
            return sign * coef * pi / div
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"{where}: expected a number or a pi expression, got {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description (except the worker count, see below)."""

    params: SystemParams
    quench: tuple[int, ...]
    grid: TimeGrid
    n_realizations: int
    master_seed: int
    averaging_mode: str
    workers: int  # 0 = resolve from environment at run time
    r_max: int | None
    normalize: bool
    out_dir: str
    observables: tuple[str, ...]
    crossing_times: bool
    crossing_t_min: float
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] | None = None

    def resolved_workers(self, override: int | None = None) -> int:
        if override is not None:
            return max(1, int(override))
        if self.workers > 0:
            return self.workers
        env = os.environ.get(WORKERS_ENV_VAR, "")
        if env.strip():
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise ConfigError(f"{WORKERS_ENV_VAR}={env!r} is not an integer") from exc
        return 1

    def ensemble_config(self, workers_override: int | None = None) -> EnsembleConfig:
        return EnsembleConfig(
            n_realizations=self.n_realizations,
            master_seed=self.master_seed,
            averaging_mode=self.averaging_mode,
            workers=self.resolved_workers(workers_override),
            r_max=self.r_max,
            normalize=self.normalize,
        )

    def variants(self):
        """Expand the sweep into (label, value, per-run config) triples.

        A config without a sweep expands to a single unlabeled variant.
        """
        if self.sweep_axis is None:
            return [(None, None, self)]
        out = []
        for i, value in enumerate(self.sweep_values):
            params = self.params
            quench = self.quench
            if self.sweep_axis == "quench_separation":
                quench = (self.quench[0], self.quench[0] + int(value))
                label = f"{i:02d}-quench_separation-{int(value)}"
            else:
                params = dataclasses.replace(params, **{self.sweep_axis: float(value)})
                label = f"{i:02d}-{self.sweep_axis}-{float(value):.6g}"
            cfg = dataclasses.replace(
                self,
                params=params,
                quench=quench,
                sweep_axis=None,
                sweep_values=None,
                out_dir=os.path.join(self.out_dir, label),
            )
            out.append((label, value, cfg))
        return out

    def to_dict(self) -> dict:
        """Canonical echo of the configuration; re-loading it reproduces the run."""
        doc = {
            "system": {
                "n_atoms": self.params.n_sites,
                "n_excitations": self.params.n_excited,
                "gamma": self.params.gamma,
                "directionality": self.params.directionality,
                "phase": self.params.phase,
                "disorder_width": self.params.disorder_width,
            },
            "quench": {"sites": list(self.quench)},
            "grid": {"t_max": self.grid.t_max, "n_steps": self.grid.n_steps},
            "ensemble": {
                "n_realizations": self.n_realizations,
                "master_seed": self.master_seed,
                "averaging_mode": self.averaging_mode,
                "workers": self.workers,
            },
            "output": {
                "directory": self.out_dir,
                "observables": list(self.observables),
                "r_max": self.r_max,
                "normalize": self.normalize,
                "crossing_times": self.crossing_times,
                "crossing_t_min": self.crossing_t_min,
            },
        }
        if self.sweep_axis is not None:
            doc["sweep"] = {
                "axis": self.sweep_axis,
                "values": [
                    int(v) if self.sweep_axis == "quench_separation" else float(v)
                    for v in self.sweep_values
                ],
            }
        return doc


class _Reader:
    """Pulls typed fields out of the nested document, collecting errors."""

    def __init__(self, doc: dict):
        self.doc = doc
        self.errors: list[str] = []

    def section(self, name: str, required: bool = True) -> dict:
        sec = self.doc.get(name)
        if sec is None:
            if required:
                self.errors.append(f"{name}: missing section")
            return {}
        if not isinstance(sec, dict):
            self.errors.append(f"{name}: expected a mapping")
            return {}
        return sec

    def get(self, sec: dict, path: str, default=None, required: bool = False):
        key = path.split(".")[-1]
        if key not in sec:
            if required:
                self.errors.append(f"{path}: missing required field")
            return default
        return sec[key]

    def number(self, sec, path, default=None, required=False, integer=False):
        key = path.split(".")[-1]
        if key not in sec:
            if required:
                self.errors.append(f"{path}: missing required field")
            return default
        raw = sec[key]
        if raw is None:
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.errors.append(f"{path}: expected a number, got {raw!r}")
            return default
        if integer and int(raw) != raw:
            self.errors.append(f"{path}: expected an integer, got {raw!r}")
            return default
        return int(raw) if integer else float(raw)

    def angle(self, sec, path, default=0.0):
        raw = self.get(sec, path, default=None)
        if raw is None:
            return default
        try:
            return parse_angle(raw, path)
        except ConfigError as exc:
            self.errors.append(str(exc))
            return default


def config_from_dict(doc: dict) -> RunConfig:
    """Build and validate a RunConfig; raises ConfigError listing all problems."""
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a mapping of sections")
    unknown = set(doc) - {"system", "quench", "grid", "ensemble", "output", "sweep"}
    r = _Reader(doc)
    if unknown:
        r.errors.append(f"unknown sections: {', '.join(sorted(unknown))}")

    sys_sec = r.section("system")
    n_atoms = r.number(sys_sec, "system.n_atoms", required=True, integer=True)
    n_exc = r.number(sys_sec, "system.n_excitations", required=True, integer=True)
    gamma = r.number(sys_sec, "system.gamma", default=1.0)
    direction = r.number(sys_sec, "system.directionality", default=0.0)
    phase = r.angle(sys_sec, "system.phase", default=0.0)
    width = r.angle(sys_sec, "system.disorder_width", default=0.0)

    quench_sec = r.section("quench")
    sites = r.get(quench_sec, "quench.sites", required=True)

    grid_sec = r.section("grid", required=False)
    t_max = r.number(grid_sec, "grid.t_max", default=100.0)
    n_steps = r.number(grid_sec, "grid.n_steps", default=400, integer=True)

    ens_sec = r.section("ensemble", required=False)
    n_real = r.number(ens_sec, "ensemble.n_realizations", default=400, integer=True)
    seed = r.number(
        ens_sec, "ensemble.master_seed", default=DEFAULT_MASTER_SEED, integer=True
    )
    mode = r.get(ens_sec, "ensemble.averaging_mode", default=AVERAGING_MODES[0])
    workers = r.number(ens_sec, "ensemble.workers", default=0, integer=True)
    if mode not in AVERAGING_MODES:
        r.errors.append(
            f"ensemble.averaging_mode: must be one of {AVERAGING_MODES}, got {mode!r}"
        )
    if workers is not None and workers < 0:
        r.errors.append(f"ensemble.workers: must be >= 0, got {workers}")

    out_sec = r.section("output")
    out_dir = r.get(out_sec, "output.directory", required=True)
    observables = r.get(out_sec, "output.observables", default=list(OBSERVABLE_NAMES))
    r_max = r.number(out_sec, "output.r_max", default=None, integer=True)
    normalize = bool(r.get(out_sec, "output.normalize", default=False))
    crossing = bool(r.get(out_sec, "output.crossing_times", default=False))
    t_min = r.number(out_sec, "output.crossing_t_min", default=1.0)
    if not isinstance(observables, list) or not observables:
        r.errors.append("output.observables: expected a non-empty list")
        observables = list(OBSERVABLE_NAMES)
    bad = [o for o in observables if o not in OBSERVABLE_NAMES]
    if bad:
        r.errors.append(
            f"output.observables: unknown names {bad}; valid: {list(OBSERVABLE_NAMES)}"
        )

    sweep_sec = r.section("sweep", required=False)
    sweep_axis = None
    sweep_values = None
    if sweep_sec:
        sweep_axis = r.get(sweep_sec, "sweep.axis", required=True)
        raw_values = r.get(sweep_sec, "sweep.values", required=True)
        if sweep_axis is not None and sweep_axis not in SWEEP_AXES:
            r.errors.append(f"sweep.axis: must be one of {SWEEP_AXES}, got {sweep_axis!r}")
            sweep_axis = None
        if not isinstance(raw_values, list) or not raw_values:
            r.errors.append("sweep.values: expected a non-empty list")
            sweep_axis = None
        elif sweep_axis is not None:
            try:
                if sweep_axis == "quench_separation":
                    sweep_values = tuple(int(v) for v in raw_values)
                else:
                    sweep_values = tuple(
                        parse_angle(v, f"sweep.values[{i}]")
                        for i, v in enumerate(raw_values)
                    )
            except (ConfigError, TypeError, ValueError) as exc:
                r.errors.append(f"sweep.values: {exc}")
                sweep_axis = None

    params = None
    if not r.errors:
        try:
            params = SystemParams(
                n_sites=n_atoms,
                n_excited=n_exc,
                gamma=gamma,
                directionality=direction,
                phase=phase,
                disorder_width=width,
            )
        except ParameterError as exc:
            r.errors.append(f"system: {exc}")

    quench = None
    if params is not None:
        try:
            quench = validate_state(sites, params.n_sites, params.n_excited)
        except (ParameterError, TypeError) as exc:
            r.errors.append(f"quench.sites: {exc}")

    grid = None
    if not r.errors:
        try:
            grid = TimeGrid(t_max=t_max, n_steps=n_steps)
        except ParameterError as exc:
            r.errors.append(f"grid: {exc}")

    if params is not None and r_max is not None:
        if not 1 <= r_max <= params.n_sites - 1:
            r.errors.append(f"output.r_max: need 1 <= r_max <= N-1, got {r_max}")
    if not r.errors and n_real < 1:
        r.errors.append(f"ensemble.n_realizations: must be >= 1, got {n_real}")
    if not r.errors and not 0 <= seed < 2**64:
        r.errors.append("ensemble.master_seed: must fit in an unsigned 64-bit int")
    if not r.errors and t_min < 0:
        r.errors.append(f"output.crossing_t_min: must be >= 0, got {t_min}")

    # Sweep values must each produce a valid configuration.
    if not r.errors and sweep_axis is not None:
        for i, value in enumerate(sweep_values):
            try:
                if sweep_axis == "quench_separation":
                    if params.n_excited != 2:
                        raise ParameterError("quench_separation sweeps need M = 2")
                    validate_state(
                        (quench[0], quench[0] + int(value)),
                        params.n_sites,
                        params.n_excited,
                    )
                else:
                    dataclasses.replace(params, **{sweep_axis: float(value)})
            except ParameterError as exc:
                r.errors.append(f"sweep.values[{i}]: {exc}")

    if r.errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(r.errors))

    return RunConfig(
        params=params,
        quench=quench,
        grid=grid,
        n_realizations=n_real,
        master_seed=seed,
        averaging_mode=mode,
        workers=workers,
        r_max=r_max,
        normalize=normalize,
        out_dir=str(out_dir),
        observables=tuple(observables),
        crossing_times=crossing,
        crossing_t_min=t_min,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
    )


def load_config(path, allow_dimensional: bool = False) -> RunConfig:
    """Parse and validate a YAML run file."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error in {path}: {exc}") from exc
    cfg = config_from_dict(doc)
    if cfg.params.gamma != 1.0 and not allow_dimensional:
        raise ConfigError(
            "system.gamma != 1 makes all outputs carry dimensions; "
            "pass --allow-dimensional to accept that"
        )
    return cfg
