"""Ready-made run files for the standard figure configurations.

Each preset is a plain dict in the run-file schema; `emit` serializes it to
YAML so it can be edited (the interaction phase in particular is meant to be
tuned by hand where a figure calls for several values).
"""

from __future__ import annotations

import yaml

from .ensemble import DEFAULT_MASTER_SEED


def _base(n_atoms, n_excitations, sites, directionality, out_dir, **output):
    doc = {
        "system": {
            "n_atoms": n_atoms,
            "n_excitations": n_excitations,
            "gamma": 1.0,
            "directionality": directionality,
            "phase": "pi/8",
            "disorder_width": "0.8*pi",
        },
        "quench": {"sites": list(sites)},
        "grid": {"t_max": 100.0, "n_steps": 400},
        "ensemble": {
            "n_realizations": 400,
            "master_seed": DEFAULT_MASTER_SEED,
            "averaging_mode": "cumulant-then-average",
            "workers": 0,
        },
        "output": {
            "directory": out_dir,
            "observables": ["populations", "g2", "g3", "norms"],
            "normalize": False,
            "crossing_times": False,
            **output,
        },
    }
    return doc


def _fig2():
    doc = _base(30, 2, (15, 16), 0.5, "out/fig2", crossing_times=True)
    doc["sweep"] = {"axis": "disorder_width", "values": [0, "0.1*pi", "0.5*pi", "0.8*pi"]}
    return doc


def _fig2_d0():
    doc = _base(30, 2, (15, 16), 0.0, "out/fig2-d0", crossing_times=True)
    doc["sweep"] = {"axis": "disorder_width", "values": [0, "0.8*pi"]}
    return doc


def _fig3():
    doc = _base(15, 3, (7, 8, 9), 0.0, "out/fig3")
    doc["sweep"] = {"axis": "disorder_width", "values": [0, "0.1*pi", "0.8*pi"]}
    return doc


def _fig3_d05():
    doc = _fig3()
    doc["system"]["directionality"] = 0.5
    doc["output"]["directory"] = "out/fig3-d05"
    return doc


def _fig4():
    doc = _base(30, 2, (15, 16), 0.5, "out/fig4", crossing_times=True)
    doc["sweep"] = {"axis": "disorder_width", "values": [0, "0.8*pi"]}
    return doc


def _fig5():
    doc = _base(30, 2, (15, 16), 0.5, "out/fig5")
    doc["sweep"] = {"axis": "quench_separation", "values": [2, 3, 6]}
    return doc


def _fig6():
    doc = _base(30, 2, (15, 16), 0.5, "out/fig6", crossing_times=True)
    doc["sweep"] = {"axis": "quench_separation", "values": [2, 3]}
    return doc


def _fig7():
    doc = _base(15, 3, (7, 8, 9), 0.0, "out/fig7", crossing_times=True)
    doc["sweep"] = {"axis": "disorder_width", "values": [0, "0.1*pi", "0.8*pi"]}
    return doc


def _fig7_d05():
    doc = _fig7()
    doc["system"]["directionality"] = 0.5
    doc["output"]["directory"] = "out/fig7-d05"
    return doc


PRESETS = {
    "fig2": (_fig2, "N=30 two-excitation quench, D=0.5, disorder sweep (populations + correlations)"),
    "fig2-d0": (_fig2_d0, "fig2 companion with reciprocal couplings (D=0)"),
    "fig3": (_fig3, "N=15 three-excitation quench, D=0, disorder sweep"),
    "fig3-d05": (_fig3_d05, "fig3 companion with D=0.5"),
    "fig4": (_fig4, "fig2 configuration reduced to the clean/strong-disorder pair, crossing times on"),
    "fig5": (_fig5, "separated double quenches (gaps 2, 3, 6) under strong disorder"),
    "fig6": (_fig6, "separated double quenches (gaps 2, 3) with crossing-time analysis"),
    "fig7": (_fig7, "three-excitation correlation crossing analysis, D=0"),
    "fig7-d05": (_fig7_d05, "fig7 companion with D=0.5"),
}


def names() -> list[str]:
    return list(PRESETS)


def describe(name: str) -> str:
    return PRESETS[name][1]


def build(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name][0]()


def emit(name: str) -> str:
    """YAML text of the preset, ready to save and run."""
    return yaml.safe_dump(build(name), sort_keys=False)
