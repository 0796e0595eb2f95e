import itertools
from math import comb

import numpy as np
import pytest

from chiralchain import basis
from chiralchain.errors import ParameterError


def test_enumerate_n4_m2():
    states = basis.enumerate_states(4, 2)
    assert states == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    assert basis.sector_sizes(4, 2) == [3, 2, 1]


def test_enumerate_single_state():
    assert basis.enumerate_states(3, 3) == [(1, 2, 3)]


def test_enumerate_n30_m2():
    states = basis.enumerate_states(30, 2)
    assert len(states) == 435
    assert states[0] == (1, 2)
    assert states[-1] == (29, 30)


def test_enumerate_rejects_bad_nm():
    with pytest.raises(ParameterError):
        basis.enumerate_states(3, 4)
    with pytest.raises(ParameterError):
        basis.enumerate_states(3, 0)


def test_rank_examples():
    assert basis.rank((1, 2), 4, 2) == 0
    assert basis.rank((3, 4), 4, 2) == 5
    # position within the brute-force enumeration
    assert basis.rank((2, 4), 4, 2) == basis.enumerate_states(4, 2).index((2, 4))
    assert basis.rank((2, 4), 4, 2) == 4


def test_rank_rejects_malformed():
    for bad in [(2, 1), (1, 1), (0, 2), (1, 5), (1,)]:
        with pytest.raises(ParameterError):
            basis.rank(bad, 4, 2)


@pytest.mark.parametrize("n", range(1, 13))
def test_rank_unrank_roundtrip_exhaustive(n):
    for m in range(1, n + 1):
        states = basis.enumerate_states(n, m)
        assert len(states) == comb(n, m) == basis.dimension(n, m)
        for q, state in enumerate(states):
            assert basis.rank(state, n, m) == q
            assert basis.unrank(q, n, m) == state


def test_enumerate_is_lexicographic_and_sectored():
    for n, m in [(6, 2), (8, 3), (10, 4)]:
        states = basis.enumerate_states(n, m)
        assert states == sorted(states)
        for k in range(1, n - m + 2):
            sector = [s for s in states if s[0] == k]
            assert len(sector) == comb(n - k, m - 1)


def test_neighbors_n4_m2():
    got = basis.neighbors((1, 2), 4, 2)
    expected = {
        ((2, 3), 1, 3),
        ((2, 4), 1, 4),
        ((1, 3), 2, 3),
        ((1, 4), 2, 4),
    }
    assert set(got) == expected
    assert len(got) == 4


def test_neighbors_full_chain_empty():
    assert basis.neighbors((1, 2, 3), 3, 3) == []


def test_neighbors_count_and_symmetry():
    for n, m in [(4, 2), (6, 3), (7, 2), (5, 4)]:
        states = basis.enumerate_states(n, m)
        adjacency = {s: {t for t, _, _ in basis.neighbors(s, n, m)} for s in states}
        for s in states:
            assert len(basis.neighbors(s, n, m)) == m * (n - m)
            for t in adjacency[s]:
                assert s in adjacency[t]


def test_neighbors_moved_sites_consistent():
    for s in basis.enumerate_states(5, 2):
        for t, src, dst in basis.neighbors(s, 5, 2):
            assert src in s and src not in t
            assert dst in t and dst not in s


def test_occupancy_matrix():
    occ = basis.occupancy_matrix(4, 2)
    assert occ.shape == (6, 4)
    assert np.array_equal(occ.sum(axis=1), np.full(6, 2.0))
    states = basis.enumerate_states(4, 2)
    for q, s in enumerate(states):
        assert {m + 1 for m in np.nonzero(occ[q])[0]} == set(s)


def test_unrank_range_check():
    with pytest.raises(ParameterError):
        basis.unrank(6, 4, 2)
    with pytest.raises(ParameterError):
        basis.unrank(-1, 4, 2)
