"""Delimited output: one CSV per observable plus a metadata JSON.

All CSVs are comma-separated with a header row, '.' decimals, LF line
endings, and shortest-roundtrip float formatting, so identical results
produce byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np
import scipy

from . import __version__
from .ensemble import EnsembleResult
from .observables import crossing_time

SCHEMA_RUN = "chiralchain-run-v1"
SCHEMA_SWEEP = "chiralchain-sweep-v1"


def _fmt(x) -> str:
    return repr(float(x))


def write_series_csv(path, header: list[str], times, columns: np.ndarray) -> None:
    """Write `t` plus one column per header entry; columns is (T, k)."""
    columns = np.atleast_2d(columns.T).T
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["t"] + header) + "\n")
        for k, t in enumerate(times):
            row = [_fmt(t)] + [_fmt(v) for v in columns[k]]
            fh.write(",".join(row) + "\n")


def populations_csv(path, result: EnsembleResult) -> None:
    n = result.params.n_sites
    header = [f"P_{m}" for m in range(1, n + 1)]
    write_series_csv(path, header, result.times, result.mean_populations)


def g2_csv(path, result: EnsembleResult) -> None:
    header = [f"r{r}" for r in result.r_values]
    write_series_csv(path, header, result.times, result.g2)


def g3_csv(path, result: EnsembleResult) -> None:
    write_series_csv(path, ["value"], result.times, result.g3[:, None])


def norms_csv(path, result: EnsembleResult) -> None:
    write_series_csv(path, ["norm"], result.times, result.mean_norms[:, None])


def compute_crossings(
    result: EnsembleResult, clean: EnsembleResult, t_min: float
) -> dict:
    """Crossing times of the disorder-averaged correlations over the clean ones."""
    out: dict = {"g2": {}, "g3": None}
    for i, r in enumerate(result.r_values):
        out["g2"][str(r)] = crossing_time(
            result.g2[:, i], clean.g2[:, i], result.times, t_min=t_min
        )
    if result.g3 is not None and clean.g3 is not None:
        out["g3"] = crossing_time(result.g3, clean.g3, result.times, t_min=t_min)
    return out


def summarize(result: EnsembleResult) -> dict:
    final = result.mean_populations[-1]
    peak_site = int(np.argmax(final)) + 1
    return {
        "final_time": float(result.times[-1]),
        "final_peak_site": peak_site,
        "final_peak_population": float(final[peak_site - 1]),
        "final_total_population": float(final.sum()),
    }


def write_run_outputs(
    out_dir,
    result: EnsembleResult,
    config_echo: dict,
    observables,
    clean: EnsembleResult | None = None,
    crossings: dict | None = None,
) -> dict:
    """Write the CSV set and metadata.json for one completed (or partial) run."""
    os.makedirs(out_dir, exist_ok=True)
    observables = list(observables)
    has_g3 = result.g3 is not None
    if "populations" in observables:
        populations_csv(os.path.join(out_dir, "populations.csv"), result)
    if "g2" in observables:
        g2_csv(os.path.join(out_dir, "g2.csv"), result)
        if clean is not None:
            g2_csv(os.path.join(out_dir, "g2_clean.csv"), clean)
    if "g3" in observables and has_g3:
        g3_csv(os.path.join(out_dir, "g3.csv"), result)
        if clean is not None and clean.g3 is not None:
            g3_csv(os.path.join(out_dir, "g3_clean.csv"), clean)
    if "norms" in observables:
        norms_csv(os.path.join(out_dir, "norms.csv"), result)

    standard_errors = {
        "populations": result.se_populations.tolist(),
        "g2": result.se_g2.tolist(),
        "g3": result.se_g3.tolist() if result.se_g3 is not None else None,
        "norms": result.se_norms.tolist(),
    }
    meta = {
        "schema": SCHEMA_RUN,
        "config": config_echo,
        "versions": {
            "chiralchain": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "n_realizations_completed": result.n_completed,
        "complete": result.complete,
        "max_norm_increase": result.max_norm_increase,
        "r_values": result.r_values,
        "observables": observables,
        "crossing_times": crossings,
        "summary": summarize(result),
        "standard_errors": standard_errors,
    }
    write_metadata(os.path.join(out_dir, "metadata.json"), meta)
    return meta


def write_metadata(path, meta: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_metadata(out_dir, config_echo: dict, runs: list[dict]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    meta = {"schema": SCHEMA_SWEEP, "config": config_echo, "runs": runs}
    write_metadata(os.path.join(out_dir, "metadata.json"), meta)
