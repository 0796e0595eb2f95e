"""Readers for the chiralchain CSV/JSON output schema.

This package talks to the simulation only through its files: metadata.json
(schemas chiralchain-run-v1 / chiralchain-sweep-v1) and the per-observable
CSVs next to it.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

RUN_SCHEMA = "chiralchain-run-v1"
SWEEP_SCHEMA = "chiralchain-sweep-v1"


class FigureInputError(Exception):
    """Input directory is missing, incomplete, or not in the expected schema."""


def _read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    data = np.asarray(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise FigureInputError(f"{path}: malformed table")
    return header, data


@dataclass
class RunData:
    """One run directory: whatever observables were emitted."""

    directory: str
    label: str
    meta: dict
    times: np.ndarray | None = None
    populations: np.ndarray | None = None  # (T, N)
    g2: np.ndarray | None = None  # (T, r_max)
    g2_clean: np.ndarray | None = None
    g3: np.ndarray | None = None  # (T,)
    g3_clean: np.ndarray | None = None
    norms: np.ndarray | None = None
    r_values: list[int] = field(default_factory=list)

    @property
    def crossing_times(self) -> dict | None:
        return self.meta.get("crossing_times")

    @property
    def disorder_width(self) -> float:
        return self.meta["config"]["system"]["disorder_width"]


def _maybe_series(run: RunData, name: str):
    path = os.path.join(run.directory, name)
    if not os.path.exists(path):
        return None, None
    header, data = _read_csv(path)
    if run.times is None:
        run.times = data[:, 0]
    elif data.shape[0] != run.times.size:
        raise FigureInputError(f"{path}: grid differs from sibling files")
    return header, data[:, 1:]


def load_run(directory, label: str | None = None) -> RunData:
    meta_path = os.path.join(directory, "metadata.json")
    if not os.path.exists(meta_path):
        raise FigureInputError(f"no metadata.json in {directory}")
    with open(meta_path) as fh:
        meta = json.load(fh)
    if meta.get("schema") != RUN_SCHEMA:
        raise FigureInputError(
            f"{meta_path}: schema {meta.get('schema')!r}, expected {RUN_SCHEMA!r}"
        )
    run = RunData(directory=str(directory), label=label or os.path.basename(str(directory)), meta=meta)
    _, pops = _maybe_series(run, "populations.csv")
    run.populations = pops
    header, g2 = _maybe_series(run, "g2.csv")
    if g2 is not None:
        run.g2 = g2
        run.r_values = [int(name.lstrip("r")) for name in header[1:]]
    _, g2c = _maybe_series(run, "g2_clean.csv")
    run.g2_clean = g2c
    _, g3 = _maybe_series(run, "g3.csv")
    run.g3 = g3[:, 0] if g3 is not None else None
    _, g3c = _maybe_series(run, "g3_clean.csv")
    run.g3_clean = g3c[:, 0] if g3c is not None else None
    _, norms = _maybe_series(run, "norms.csv")
    run.norms = norms[:, 0] if norms is not None else None
    if run.times is None:
        raise FigureInputError(f"{directory}: no observable CSV files found")
    return run


def load_directory(directory) -> list[RunData]:
    """All runs under a directory: a sweep's subruns, or the single run itself."""
    meta_path = os.path.join(directory, "metadata.json")
    if not os.path.exists(meta_path):
        raise FigureInputError(f"no metadata.json in {directory}")
    with open(meta_path) as fh:
        meta = json.load(fh)
    schema = meta.get("schema")
    if schema == RUN_SCHEMA:
        return [load_run(directory)]
    if schema == SWEEP_SCHEMA:
        runs = []
        for entry in meta.get("runs", []):
            sub = os.path.join(directory, entry["directory"])
            runs.append(load_run(sub, label=entry["label"]))
        if not runs:
            raise FigureInputError(f"{directory}: sweep metadata lists no runs")
        return runs
    raise FigureInputError(f"{meta_path}: unrecognized schema {schema!r}")


def select_run(runs: list[RunData], label: str | None) -> RunData:
    if label is None:
        return runs[-1]
    for run in runs:
        if run.label == label:
            return run
    raise FigureInputError(
        f"no run labeled {label!r}; available: {[r.label for r in runs]}"
    )
