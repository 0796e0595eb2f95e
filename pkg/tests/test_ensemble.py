import dataclasses

import numpy as np
import pytest

from chiralchain import ensemble as ens
from chiralchain.ensemble import (
    EnsembleConfig,
    convergence_check,
    draw_disorder,
    run_clean_reference,
    run_ensemble,
)
from chiralchain.errors import ChainError, ParameterError
from chiralchain.evolve import TimeGrid
from chiralchain.kernel import SystemParams


def params(n=6, m=2, d=0.5, xi=np.pi / 8, w=0.8 * np.pi):
    return SystemParams(
        n_sites=n, n_excited=m, directionality=d, phase=xi, disorder_width=w
    )


GRID = TimeGrid(t_max=20.0, n_steps=40)


def test_draw_disorder_zero_width():
    assert np.array_equal(draw_disorder(0.0, 12, 3, 99), np.zeros(12))


def test_draw_disorder_deterministic():
    a = draw_disorder(0.8 * np.pi, 30, 7, 12345)
    b = draw_disorder(0.8 * np.pi, 30, 7, 12345)
    assert np.array_equal(a, b)
    c = draw_disorder(0.8 * np.pi, 30, 8, 12345)
    assert not np.array_equal(a, c)
    d = draw_disorder(0.8 * np.pi, 30, 7, 12346)
    assert not np.array_equal(a, d)


def test_draw_disorder_bounds_and_variance():
    width = 0.8 * np.pi
    draws = np.array([draw_disorder(width, 30, i, 777) for i in range(10000)])
    assert np.all(np.abs(draws) <= width)
    sample_var = draws.var()
    assert sample_var == pytest.approx(width**2 / 3.0, rel=0.05)


def test_draw_disorder_range_check():
    with pytest.raises(ParameterError):
        draw_disorder(3.5, 4, 0, 0)
    with pytest.raises(ParameterError):
        draw_disorder(-0.1, 4, 0, 0)


def test_config_validation():
    with pytest.raises(ParameterError):
        EnsembleConfig(n_realizations=0)
    with pytest.raises(ParameterError):
        EnsembleConfig(averaging_mode="neither")
    with pytest.raises(ParameterError):
        EnsembleConfig(workers=0)


def test_zero_width_matches_single_clean_run():
    p = params(w=0.0)
    cfg = EnsembleConfig(n_realizations=5, master_seed=42)
    res = run_ensemble(p, (3, 4), GRID, cfg)
    ref = run_ensemble(p, (3, 4), GRID, dataclasses.replace(cfg, n_realizations=1))
    # averaging n identical realizations only reshuffles the last ulp
    assert np.allclose(res.mean_populations, ref.mean_populations, rtol=0, atol=1e-14)
    assert np.allclose(res.g2, ref.g2, rtol=0, atol=1e-14)
    assert np.allclose(res.g3, ref.g3, rtol=0, atol=1e-14)
    assert np.all(res.se_populations <= 1e-8)


def test_result_is_reproducible():
    p = params()
    cfg = EnsembleConfig(n_realizations=8, master_seed=2021)
    r1 = run_ensemble(p, (3, 4), GRID, cfg)
    r2 = run_ensemble(p, (3, 4), GRID, cfg)
    for field in ("mean_populations", "se_populations", "g2", "se_g2", "g3",
                  "se_g3", "mean_norms", "se_norms"):
        assert np.array_equal(getattr(r1, field), getattr(r2, field)), field


def test_worker_count_invariance():
    p = params()
    cfg1 = EnsembleConfig(n_realizations=10, master_seed=5, workers=1)
    cfg2 = dataclasses.replace(cfg1, workers=2)
    r1 = run_ensemble(p, (3, 4), GRID, cfg1)
    r2 = run_ensemble(p, (3, 4), GRID, cfg2)
    assert np.array_equal(r1.mean_populations, r2.mean_populations)
    assert np.array_equal(r1.g2, r2.g2)
    assert np.array_equal(r1.g3, r2.g3)
    assert np.array_equal(r1.se_populations, r2.se_populations)
    assert r1.max_norm_increase == r2.max_norm_increase


def test_averaging_modes_agree_for_single_realization():
    p = params()
    base = EnsembleConfig(n_realizations=1, master_seed=7)
    ra = run_ensemble(p, (3, 4), GRID, base)
    rb = run_ensemble(
        p, (3, 4), GRID,
        dataclasses.replace(base, averaging_mode=ens.MODE_AVERAGE_FIRST),
    )
    assert np.allclose(ra.g2, rb.g2, rtol=0, atol=1e-15)
    assert np.allclose(ra.g3, rb.g3, rtol=0, atol=1e-15)


def test_averaging_modes_differ_in_general():
    p = params()
    base = EnsembleConfig(n_realizations=16, master_seed=7)
    ra = run_ensemble(p, (3, 4), GRID, base)
    rb = run_ensemble(
        p, (3, 4), GRID,
        dataclasses.replace(base, averaging_mode=ens.MODE_AVERAGE_FIRST),
    )
    assert not np.allclose(ra.g2, rb.g2, rtol=0, atol=1e-12)
    # populations average identically in both modes
    assert np.array_equal(ra.mean_populations, rb.mean_populations)


def test_dissipativity_across_runs():
    p = params()
    res = run_ensemble(p, (3, 4), GRID, EnsembleConfig(n_realizations=20, master_seed=3))
    assert res.max_norm_increase <= 1e-8
    assert np.all(res.mean_populations >= 0.0)
    assert np.all(res.mean_populations <= 1.0)
    assert np.all(np.diff(res.mean_norms) <= 1e-8)


def test_standard_error_scaling():
    p = params()
    ses = {}
    for n in (100, 400, 1600):
        cfg = EnsembleConfig(n_realizations=n, master_seed=11)
        res = run_ensemble(p, (3, 4), GRID, cfg)
        # overall SE magnitude of the population series
        ses[n] = np.linalg.norm(res.se_populations)
    assert ses[100] / ses[400] == pytest.approx(2.0, rel=0.3)
    assert ses[400] / ses[1600] == pytest.approx(2.0, rel=0.3)


def test_checkpoints_match_shorter_runs():
    p = params()
    cfg = EnsembleConfig(n_realizations=12, master_seed=9)
    full = run_ensemble(p, (3, 4), GRID, cfg, checkpoint_at=(5,))
    short = run_ensemble(p, (3, 4), GRID, dataclasses.replace(cfg, n_realizations=5))
    snap = full.checkpoints[5]
    assert snap.n_completed == 5
    assert np.array_equal(snap.mean_populations, short.mean_populations)
    assert np.array_equal(snap.g2, short.g2)
    assert np.array_equal(snap.se_g2, short.se_g2)


def test_checkpoint_validation():
    p = params()
    cfg = EnsembleConfig(n_realizations=4, master_seed=1)
    with pytest.raises(ParameterError):
        run_ensemble(p, (3, 4), GRID, cfg, checkpoint_at=(9,))


def test_convergence_check():
    p = params()
    cfg = EnsembleConfig(n_realizations=6, master_seed=13)
    full = run_ensemble(p, (3, 4), GRID, cfg, checkpoint_at=(3,))
    assert convergence_check(full, full) == 0.0
    dev = convergence_check(full.checkpoints[3], full)
    assert dev > 0.0
    other_quench = run_ensemble(p, (2, 3), GRID, cfg)
    with pytest.raises(ParameterError):
        convergence_check(full, other_quench)


def test_clean_reference_has_zero_width():
    p = params()
    cfg = EnsembleConfig(n_realizations=6, master_seed=4)
    ref = run_clean_reference(p, (3, 4), GRID, cfg)
    assert ref.params.disorder_width == 0.0
    assert ref.n_completed == 1


def test_interrupt_returns_partial_result():
    p = params()
    cfg = EnsembleConfig(n_realizations=10, master_seed=6)

    def stop_after_four(done, total):
        if done == 4:
            raise KeyboardInterrupt

    partial = run_ensemble(p, (3, 4), GRID, cfg, progress=stop_after_four)
    assert not partial.complete
    assert partial.n_completed == 4
    short = run_ensemble(p, (3, 4), GRID, dataclasses.replace(cfg, n_realizations=4))
    assert np.array_equal(partial.mean_populations, short.mean_populations)


def test_worker_failure_reports_realization(monkeypatch):
    p = params()
    cfg = EnsembleConfig(n_realizations=5, master_seed=8)
    real_draw = ens.draw_disorder

    def flaky(width, n_sites, index, seed):
        if index == 2:
            raise ValueError("boom")
        return real_draw(width, n_sites, index, seed)

    monkeypatch.setattr(ens, "draw_disorder", flaky)
    with pytest.raises(ChainError, match="realization 2"):
        run_ensemble(p, (3, 4), GRID, cfg)


def test_mode_b_helpers_match_average_first_run():
    p = params()
    base = EnsembleConfig(n_realizations=12, master_seed=19)
    ra = run_ensemble(p, (3, 4), GRID, base)
    rb = run_ensemble(
        p, (3, 4), GRID,
        dataclasses.replace(base, averaging_mode=ens.MODE_AVERAGE_FIRST),
    )
    assert np.array_equal(ens.g2_of_averaged_moments(ra), rb.g2)
    assert np.array_equal(ens.g3_of_averaged_moments(ra), rb.g3)


def test_r_max_controls_g2_columns():
    p = params()
    cfg = EnsembleConfig(n_realizations=2, master_seed=2, r_max=3)
    res = run_ensemble(p, (3, 4), GRID, cfg)
    assert res.r_values == [1, 2, 3]
    assert res.g2.shape == (GRID.n_steps + 1, 3)
    assert set(res.mean_pair_moments) == {1, 2, 3}
