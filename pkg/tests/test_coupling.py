import numpy as np
import pytest

import oracle
from chiralchain import basis, draw_disorder
from chiralchain.coupling import assemble, dump_matrix, row_structure
from chiralchain.errors import CapacityError, ParameterError
from chiralchain.kernel import SystemParams, build_kernel


def params(n, m, d=0.0, xi=0.0, w=0.0):
    return SystemParams(
        n_sites=n, n_excited=m, directionality=d, phase=xi, disorder_width=w
    )


def test_row_structure_counts():
    pat = row_structure(4, 2)
    assert pat.dim == 6
    assert pat.rows.size == 6 * 4  # M(N-M) = 4 per row
    for q in range(6):
        assert np.count_nonzero(pat.rows == q) == 4


def test_row_structure_full_chain():
    pat = row_structure(3, 3)
    assert pat.dim == 1
    assert pat.rows.size == 0


def test_row_structure_n30_m2():
    pat = row_structure(30, 2)
    assert pat.dim == 435
    assert pat.rows.size == 435 * 56


def test_disjoint_states_do_not_couple():
    p = params(4, 2, d=0.0, xi=np.pi / 8)
    v = assemble(p, build_kernel(p, np.zeros(4)))
    q = basis.rank((1, 2), 4, 2)
    s = basis.rank((3, 4), 4, 2)
    assert v[q, s] == 0
    assert v[s, q] == 0


def test_single_move_entry_is_kernel_value():
    p = params(4, 2, d=0.0, xi=np.pi / 8)
    vbar = build_kernel(p, np.zeros(4))
    v = assemble(p, vbar)
    q = basis.rank((1, 2), 4, 2)
    s = basis.rank((1, 3), 4, 2)
    # the only differing excitation moves from site 2 to site 3
    assert v[q, s] == vbar[1, 2]
    assert v[q, s] == pytest.approx(-0.5 * np.exp(-1j * np.pi / 8), abs=1e-15)


def test_diagonal_is_minus_m_gamma_over_two():
    p = params(4, 2, d=0.7, xi=1.1, w=np.pi)
    v = assemble(p, build_kernel(p, draw_disorder(np.pi, 4, 0, 5)))
    assert np.array_equal(np.diag(v), np.full(6, -1.0 + 0.0j))


def test_row_sparsity_matches_neighbors():
    p = params(6, 3, d=0.3, xi=0.8, w=0.5)
    v = assemble(p, build_kernel(p, draw_disorder(0.5, 6, 1, 9)))
    states = basis.enumerate_states(6, 3)
    for q, state in enumerate(states):
        nz = set(np.nonzero(v[q])[0]) - {q}
        expected = {basis.rank(t, 6, 3) for t, _, _ in basis.neighbors(state, 6, 3)}
        assert nz == expected


def test_m1_reduces_to_kernel():
    p = params(5, 1, d=0.4, xi=0.9, w=1.0)
    vbar = build_kernel(p, draw_disorder(1.0, 5, 2, 3))
    assert np.array_equal(assemble(p, vbar), vbar)


@pytest.mark.parametrize(
    "n,m,d,xi,w_width,seed",
    [
        (4, 2, 0.0, np.pi / 8, 0.0, 0),
        (4, 2, 0.5, np.pi / 8, 0.8 * np.pi, 1),
        (5, 3, -0.3, 1.7, 0.5 * np.pi, 2),
        (6, 2, 1.0, 0.4, np.pi, 3),
        (6, 3, 0.2, 2.9, 0.9 * np.pi, 4),
    ],
)
def test_full_space_equivalence(n, m, d, xi, w_width, seed):
    p = params(n, m, d=d, xi=xi, w=w_width)
    vbar = build_kernel(p, draw_disorder(w_width, n, 0, seed))
    v = assemble(p, vbar)
    ref = oracle.sector_matrix(vbar, basis.enumerate_states(n, m), n)
    assert np.allclose(v, ref, atol=1e-14)


def test_sector_decay_matrix_psd():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        p = params(
            8,
            3,
            d=float(rng.uniform(-1, 1)),
            xi=float(rng.uniform(0, 2 * np.pi)),
            w=float(rng.uniform(0, np.pi)),
        )
        v = assemble(p, build_kernel(p, draw_disorder(p.disorder_width, 8, 0, seed)))
        gamma_sector = -(v + v.conj().T)
        evals = np.linalg.eigvalsh((gamma_sector + gamma_sector.conj().T) / 2)
        assert np.all(evals >= -1e-9)


def test_mirror_spectrum_invariance():
    n, m = 6, 2
    w = draw_disorder(0.8 * np.pi, n, 3, 77)
    p1 = params(n, m, d=0.5, xi=np.pi / 8, w=0.8 * np.pi)
    p2 = params(n, m, d=-0.5, xi=np.pi / 8, w=0.8 * np.pi)
    v1 = assemble(p1, build_kernel(p1, w))
    v2 = assemble(p2, build_kernel(p2, -w[::-1]))
    e1 = np.sort_complex(np.linalg.eigvals(v1))
    e2 = np.sort_complex(np.linalg.eigvals(v2))
    assert np.allclose(e1, e2, atol=1e-10)


def test_capacity_guard():
    p = params(30, 2)
    with pytest.raises(CapacityError):
        assemble(p, build_kernel(p, np.zeros(30)), dim_cap=100)


def test_kernel_shape_mismatch():
    p = params(4, 2)
    with pytest.raises(ParameterError):
        assemble(p, np.zeros((5, 5), dtype=complex))


def test_dump_matrix(tmp_path):
    p = params(3, 2, xi=0.3)
    v = assemble(p, build_kernel(p, np.zeros(3)))
    path = tmp_path / "v.txt"
    dump_matrix(v, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "row col re im"
    assert len(lines) == 1 + np.count_nonzero(v)
