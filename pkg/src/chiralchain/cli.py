"""Command-line front end: run, validate, presets.

Exit codes: 0 success, 1 configuration error, 2 runtime error (including an
interrupted run, whose partial results are written and marked incomplete).
"""

from __future__ import annotations

import argparse
import sys
import time

from . import presets
from .config import RunConfig, load_config
from .coupling import DEFAULT_DIM_CAP
from .ensemble import run_clean_reference, run_ensemble
from .errors import ChainError, ConfigError
from .output import compute_crossings, write_run_outputs, write_sweep_metadata

# Rough per-core cost model for the runtime estimate (seconds).
_EXPM_COST = 1.5e-9
_STEP_COST = 1.2e-9


def _estimate_seconds(cfg: RunConfig) -> float:
    dim = cfg.params.dim
    per_real = _EXPM_COST * dim**3 + cfg.grid.n_steps * _STEP_COST * dim**2
    return cfg.n_realizations * per_real


def _estimate_bytes(cfg: RunConfig) -> int:
    dim = cfg.params.dim
    return 16 * dim * dim + 16 * (cfg.grid.n_steps + 1) * dim


def _progress_printer(label: str):
    state = {"last": 0}

    def cb(done: int, total: int) -> None:
        step = max(1, total // 10)
        if done == total or done - state["last"] >= step:
            state["last"] = done
            print(f"  {label}: {done}/{total} realizations", file=sys.stderr)

    return cb


def _run_variant(label, variant: RunConfig, workers_override, quiet: bool):
    ens_cfg = variant.ensemble_config(workers_override)
    progress = None if quiet else _progress_printer(label or "run")
    result = run_ensemble(
        variant.params, variant.quench, variant.grid, ens_cfg, progress=progress
    )
    clean = None
    crossings = None
    if (
        variant.crossing_times
        and result.complete
        and variant.params.disorder_width > 0
    ):
        clean = run_clean_reference(
            variant.params, variant.quench, variant.grid, ens_cfg
        )
        crossings = compute_crossings(result, clean, variant.crossing_t_min)
    meta = write_run_outputs(
        variant.out_dir,
        result,
        config_echo=variant.to_dict(),
        observables=variant.observables,
        clean=clean,
        crossings=crossings,
    )
    return result, meta


def cmd_run(args) -> int:
    cfg = load_config(args.config, allow_dimensional=args.allow_dimensional)
    t0 = time.perf_counter()
    variants = cfg.variants()
    runs_meta = []
    incomplete = False
    for label, value, variant in variants:
        result, meta = _run_variant(label, variant, args.workers, args.quiet)
        if label is not None:
            runs_meta.append(
                {
                    "label": label,
                    "axis": cfg.sweep_axis,
                    "value": value if isinstance(value, int) else float(value),
                    "directory": label,
                }
            )
        summary = meta["summary"]
        tag = f"[{label}] " if label else ""
        print(
            f"{tag}peak <P_m> at gamma*t={summary['final_time']:g}: "
            f"{summary['final_peak_population']:.4g} at site {summary['final_peak_site']}"
        )
        if meta["crossing_times"]:
            pairs = ", ".join(
                f"r={r}: {t:.2f}" if t is not None else f"r={r}: none"
                for r, t in meta["crossing_times"]["g2"].items()
            )
            g3t = meta["crossing_times"]["g3"]
            g3s = f"{g3t:.2f}" if g3t is not None else "none"
            print(f"{tag}g2 crossing times: {pairs}; g3: {g3s}")
        if not result.complete:
            incomplete = True
            print(f"{tag}interrupted: partial result written", file=sys.stderr)
            break
    if cfg.sweep_axis is not None:
        write_sweep_metadata(cfg.out_dir, cfg.to_dict(), runs_meta)
    print(f"wall-clock: {time.perf_counter() - t0:.1f} s")
    return 2 if incomplete else 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config, allow_dimensional=args.allow_dimensional)
    dim = cfg.params.dim
    print(f"config OK: {args.config}")
    print(f"basis dimension C({cfg.params.n_sites},{cfg.params.n_excited}) = {dim}")
    if dim > DEFAULT_DIM_CAP:
        print(
            f"error: dimension {dim} exceeds the capacity cap {DEFAULT_DIM_CAP}",
            file=sys.stderr,
        )
        return 1
    n_var = len(cfg.variants())
    est = _estimate_seconds(cfg) * n_var
    mem = _estimate_bytes(cfg) / 1e6
    print(f"variants: {n_var}; realizations per variant: {cfg.n_realizations}")
    print(f"memory per worker: ~{mem:.1f} MB")
    print(f"estimated single-core runtime: ~{est:.0f} s")
    return 0


def cmd_presets(args) -> int:
    if args.presets_command == "list":
        for name in presets.names():
            print(f"{name:10s} {presets.describe(name)}")
        return 0
    try:
        text = presets.emit(args.name)
    except KeyError:
        print(f"unknown preset {args.name!r}; see `chiralchain presets list`", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralchain",
        description=(
            "Disorder-averaged excitation dynamics and quantum correlations "
            "of a chirally coupled atomic chain"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a run file and write CSV/JSON outputs")
    run_p.add_argument("config", help="path to a YAML run file")
    run_p.add_argument("--workers", type=int, default=None, help="worker process count")
    run_p.add_argument("--allow-dimensional", action="store_true", help="accept gamma != 1")
    run_p.add_argument("--quiet", action="store_true", help="suppress progress output")
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", help="validate a run file without executing it")
    val_p.add_argument("config")
    val_p.add_argument("--allow-dimensional", action="store_true")
    val_p.set_defaults(func=cmd_validate)

    pre_p = sub.add_parser("presets", help="list or emit built-in run files")
    pre_sub = pre_p.add_subparsers(dest="presets_command", required=True)
    list_p = pre_sub.add_parser("list", help="list available presets")
    list_p.set_defaults(func=cmd_presets)
    emit_p = pre_sub.add_parser("emit", help="print a preset run file")
    emit_p.add_argument("name")
    emit_p.add_argument("--out", default=None, help="write to a file instead of stdout")
    emit_p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
