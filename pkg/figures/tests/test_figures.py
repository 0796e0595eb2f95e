import json
import os
import subprocess
import sys

import pytest
import yaml

from chiralchain_figures import cli
from chiralchain_figures.loading import FigureInputError, load_directory, load_run

# scaled-down copy of the fig2/fig4 run-file shape (same sweep structure,
# observables, and crossing-time analysis; smaller chain and ensemble)
RUN_DOC = {
    "system": {
        "n_atoms": 10,
        "n_excitations": 2,
        "gamma": 1.0,
        "directionality": 0.5,
        "phase": "pi/8",
        "disorder_width": "0.8*pi",
    },
    "quench": {"sites": [5, 6]},
    "grid": {"t_max": 40.0, "n_steps": 100},
    "ensemble": {
        "n_realizations": 6,
        "master_seed": 8675309,
        "averaging_mode": "cumulant-then-average",
        "workers": 1,
    },
    "output": {
        "directory": None,  # filled by the fixture
        "observables": ["populations", "g2", "g3", "norms"],
        "crossing_times": True,
    },
    "sweep": {"axis": "disorder_width", "values": [0, "0.8*pi"]},
}


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    """A completed output directory produced through the simulator CLI."""
    root = tmp_path_factory.mktemp("figdata")
    out_dir = root / "out"
    doc = json.loads(json.dumps(RUN_DOC))  # deep copy
    doc["output"]["directory"] = str(out_dir)
    cfg = root / "run.yaml"
    cfg.write_text(yaml.safe_dump(doc))
    proc = subprocess.run(
        ["chiralchain", "run", str(cfg), "--quiet"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out_dir


def render(kind, in_dir, out_path, *extra):
    return cli.main([kind, "--in", str(in_dir), "--out", str(out_path), *extra])


@pytest.mark.parametrize("kind", cli.KINDS)
def test_all_kinds_render_and_are_deterministic(kind, sweep_dir, tmp_path):
    first = tmp_path / f"{kind}-1.png"
    second = tmp_path / f"{kind}-2.png"
    assert render(kind, sweep_dir, first) == 0
    assert render(kind, sweep_dir, second) == 0
    data = first.read_bytes()
    assert len(data) > 1000
    assert data == second.read_bytes()


def test_snapshot_honors_time_flag(sweep_dir, tmp_path):
    early = tmp_path / "early.png"
    late = tmp_path / "late.png"
    assert render("snapshot", sweep_dir, early, "--time", "2") == 0
    assert render("snapshot", sweep_dir, late, "--time", "38") == 0
    assert early.read_bytes() != late.read_bytes()


def test_single_run_directory(sweep_dir, tmp_path):
    meta = json.loads((sweep_dir / "metadata.json").read_text())
    sub = sweep_dir / meta["runs"][-1]["directory"]
    out = tmp_path / "single.png"
    assert render("correlation-series", sub, out) == 0
    assert out.exists()


def test_run_label_selection(sweep_dir, tmp_path):
    meta = json.loads((sweep_dir / "metadata.json").read_text())
    label = meta["runs"][-1]["label"]
    out = tmp_path / "labeled.png"
    assert render("correlation-series", sweep_dir, out, "--run", label) == 0
    assert render("correlation-series", sweep_dir, tmp_path / "x.png", "--run", "bogus") == 1


def test_svg_output(sweep_dir, tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    assert render("heatmap", sweep_dir, a) == 0
    assert render("heatmap", sweep_dir, b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_empty_directory_fails_with_diagnostic(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert render("heatmap", empty, tmp_path / "no.png") == 1
    assert "metadata.json" in capsys.readouterr().err


def test_loading_validates_schema(tmp_path):
    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / "metadata.json").write_text(json.dumps({"schema": "other-v9"}))
    with pytest.raises(FigureInputError, match="schema"):
        load_directory(bad)
    with pytest.raises(FigureInputError):
        load_run(tmp_path / "missing")


def test_loaded_run_matches_csv(sweep_dir):
    runs = load_directory(sweep_dir)
    assert len(runs) == 2
    clean, disordered = runs
    assert clean.disorder_width == 0.0
    assert disordered.disorder_width > 0
    assert disordered.populations.shape[1] == 10
    assert disordered.g2.shape[1] == len(disordered.r_values)
    assert disordered.g2_clean is not None
    assert disordered.crossing_times is not None


def test_crossing_summary_requires_crossings(tmp_path, sweep_dir):
    # strip the crossing data out of a copied run to hit the diagnostic path
    import shutil

    meta = json.loads((sweep_dir / "metadata.json").read_text())
    src = sweep_dir / meta["runs"][-1]["directory"]
    dst = tmp_path / "stripped"
    shutil.copytree(src, dst)
    run_meta = json.loads((dst / "metadata.json").read_text())
    run_meta["crossing_times"] = None
    (dst / "metadata.json").write_text(json.dumps(run_meta))
    assert render("crossing-summary", dst, tmp_path / "no.png") == 1
