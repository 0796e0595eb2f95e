"""The four figure kinds rendered from run directories.

Everything here is a thin, deterministic view of the CSV data: no physics is
recomputed, and identical inputs yield identical image bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .loading import FigureInputError, RunData

matplotlib.rcParams.update(
    {
        "figure.dpi": 100,
        "font.size": 9,
        "axes.titlesize": 9,
        "axes.labelsize": 9,
        "legend.fontsize": 8,
        "svg.hashsalt": "chiralchain-figures",
    }
)

_SERIES_COLORS = ["#c7322d", "#2d5fc7", "#222222", "#d8a800", "#2d9c45", "#8b3fc7"]


def _save(fig, out_path, dpi: int) -> None:
    fig.savefig(out_path, dpi=dpi, metadata={"Date": None} if str(out_path).endswith(".svg") else None)
    plt.close(fig)


def _run_title(run: RunData) -> str:
    width = run.disorder_width
    quench = run.meta["config"]["quench"]["sites"]
    return f"W={width / np.pi:.2g}π, quench {tuple(quench)}"


def render_heatmap(runs: list[RunData], out_path, dpi: int = 150) -> None:
    """Population maps over (site, time), one panel per run."""
    runs = [r for r in runs if r.populations is not None]
    if not runs:
        raise FigureInputError("no populations.csv found for the heatmap")
    vmax = max(run.populations.max() for run in runs)
    fig, axes = plt.subplots(
        1, len(runs), figsize=(3.1 * len(runs), 3.4), sharey=True, squeeze=False
    )
    for ax, run in zip(axes[0], runs):
        n_sites = run.populations.shape[1]
        mesh = ax.pcolormesh(
            np.arange(1, n_sites + 1),
            run.times,
            run.populations,
            cmap="inferno",
            vmin=0.0,
            vmax=vmax,
            rasterized=True,
        )
        ax.set_xlabel("site $m$")
        ax.set_title(_run_title(run))
    axes[0][0].set_ylabel(r"$\gamma t$")
    fig.colorbar(mesh, ax=axes[0], label=r"$\langle P_m(t)\rangle$", pad=0.02)
    _save(fig, out_path, dpi)


def render_snapshot(runs: list[RunData], out_path, time: float = 80.0, dpi: int = 150) -> None:
    """Population profiles at one time, all runs overlaid; clean runs dotted."""
    runs = [r for r in runs if r.populations is not None]
    if not runs:
        raise FigureInputError("no populations.csv found for the snapshot")
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    for i, run in enumerate(runs):
        k = int(np.argmin(np.abs(run.times - time)))
        sites = np.arange(1, run.populations.shape[1] + 1)
        clean = run.disorder_width == 0.0
        ax.plot(
            sites,
            run.populations[k],
            linestyle=":" if clean else "-",
            color=_SERIES_COLORS[i % len(_SERIES_COLORS)],
            label=_run_title(run),
        )
    k_used = int(np.argmin(np.abs(runs[0].times - time)))
    ax.set_xlabel("site $m$")
    ax.set_ylabel(rf"$\langle P_m\rangle$ at $\gamma t={runs[0].times[k_used]:g}$")
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, out_path, dpi)


def render_correlation_series(run: RunData, out_path, dpi: int = 150) -> None:
    """g2(r, t) families (and g3 when present), with crossing-time markers."""
    if run.g2 is None and run.g3 is None:
        raise FigureInputError(f"{run.directory}: no correlation CSVs found")
    n_rows = (1 if run.g2 is not None else 0) + (1 if run.g3 is not None else 0)
    fig, axes = plt.subplots(n_rows, 1, figsize=(4.8, 2.6 * n_rows), sharex=True, squeeze=False)
    crossings = run.crossing_times or {}
    row = 0
    if run.g2 is not None:
        ax = axes[row][0]
        for i, r in enumerate(run.r_values):
            color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
            ax.plot(run.times, run.g2[:, i], color=color, label=f"$r={r}$")
            if run.g2_clean is not None:
                ax.plot(run.times, run.g2_clean[:, i], color=color, linestyle="--", alpha=0.5)
            t_star = (crossings.get("g2") or {}).get(str(r))
            if t_star is not None:
                ax.axvline(t_star, color=color, linestyle=":", alpha=0.7)
        ax.set_ylabel(r"$\langle G^{(2)}(r)\rangle$")
        ax.legend(frameon=False, ncol=3)
        row += 1
    if run.g3 is not None:
        ax = axes[row][0]
        ax.plot(run.times, run.g3, color=_SERIES_COLORS[0], label="disordered")
        if run.g3_clean is not None:
            ax.plot(run.times, run.g3_clean, color=_SERIES_COLORS[0], linestyle="--",
                    alpha=0.5, label="clean")
        t_star = crossings.get("g3")
        if t_star is not None:
            ax.axvline(t_star, color=_SERIES_COLORS[0], linestyle=":", alpha=0.7)
        ax.set_ylabel(r"$\langle G^{(3)}\rangle$")
        ax.legend(frameon=False)
    axes[-1][0].set_xlabel(r"$\gamma t$")
    fig.suptitle(_run_title(run))
    fig.tight_layout()
    _save(fig, out_path, dpi)


def render_crossing_summary(runs: list[RunData], out_path, dpi: int = 150) -> None:
    """Crossing time versus correlation distance, one marker set per run."""
    fig, ax = plt.subplots(figsize=(4.2, 3.0))
    plotted = False
    for i, run in enumerate(runs):
        crossings = (run.crossing_times or {}).get("g2") or {}
        pairs = sorted(
            ((int(r), t) for r, t in crossings.items() if t is not None),
        )
        if not pairs:
            continue
        rs, ts = zip(*pairs)
        ax.plot(rs, ts, "o-", color=_SERIES_COLORS[i % len(_SERIES_COLORS)],
                label=_run_title(run))
        plotted = True
    if not plotted:
        raise FigureInputError("no crossing times recorded in any metadata.json")
    ax.set_xlabel("correlation distance $r$")
    ax.set_ylabel(r"crossing time $\gamma t^{*}$")
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, out_path, dpi)
