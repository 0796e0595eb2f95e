"""Fixed-excitation-number basis of an N-site chain.

A bare state with M excitations is represented by the strictly increasing
tuple of its excited site labels, 1-based, e.g. (15, 16) for two neighboring
excitations at the chain center.  States are ordered lexicographically, which
groups them into N-M+1 sectors by the position of the first excited site.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ParameterError


def dimension(n_sites: int, n_excited: int) -> int:
    """Number of bare states, C(N, M)."""
    _check_nm(n_sites, n_excited)
    return comb(n_sites, n_excited)


def _check_nm(n_sites: int, n_excited: int) -> None:
    if n_sites < 1 or n_excited < 1 or n_excited > n_sites:
        raise ParameterError(
            f"need 1 <= M <= N, got N={n_sites}, M={n_excited}"
        )


def validate_state(sites, n_sites: int, n_excited: int) -> tuple[int, ...]:
    """Return `sites` as a tuple after checking it is a valid bare state."""
    _check_nm(n_sites, n_excited)
    state = tuple(int(s) for s in sites)
    if len(state) != n_excited:
        raise ParameterError(
            f"state {state} has {len(state)} sites, expected M={n_excited}"
        )
    if any(s < 1 or s > n_sites for s in state):
        raise ParameterError(f"state {state} has sites outside 1..{n_sites}")
    if any(a >= b for a, b in zip(state, state[1:])):
        raise ParameterError(f"state {state} is not strictly increasing")
    return state


def enumerate_states(n_sites: int, n_excited: int) -> list[tuple[int, ...]]:
    """All C(N, M) bare states in lexicographic (sector) order."""
    _check_nm(n_sites, n_excited)
    return list(itertools.combinations(range(1, n_sites + 1), n_excited))


def rank(sites, n_sites: int, n_excited: int) -> int:
    """Index of a bare state within enumerate_states, in O(M·N) arithmetic."""
    state = validate_state(sites, n_sites, n_excited)
    idx = 0
    prev = 0
    for i, s in enumerate(state):
        for j in range(prev + 1, s):
            idx += comb(n_sites - j, n_excited - i - 1)
        prev = s
    return idx


def unrank(q: int, n_sites: int, n_excited: int) -> tuple[int, ...]:
    """Bare state at index q; inverse of rank."""
    _check_nm(n_sites, n_excited)
    dim = comb(n_sites, n_excited)
    if not 0 <= q < dim:
        raise ParameterError(f"index {q} outside [0, {dim})")
    sites = []
    prev = 0
    remaining = q
    for i in range(n_excited):
        s = prev + 1
        while True:
            block = comb(n_sites - s, n_excited - i - 1)
            if remaining < block:
                break
            remaining -= block
            s += 1
        sites.append(s)
        prev = s
    return tuple(sites)


def neighbors(sites, n_sites: int, n_excited: int):
    """States reachable by relocating one excitation to an empty site.

    Returns a list of (state, moved_from, moved_to) with exactly M*(N-M)
    entries; moved_from is excited in the input state, moved_to in the output.
    """
    state = validate_state(sites, n_sites, n_excited)
    occupied = set(state)
    out = []
    for src in state:
        rest = occupied - {src}
        for dst in range(1, n_sites + 1):
            if dst in occupied:
                continue
            out.append((tuple(sorted(rest | {dst})), src, dst))
    return out


def sector_sizes(n_sites: int, n_excited: int) -> list[int]:
    """Sizes of the sectors grouped by first excited site: C(N-k, M-1)."""
    _check_nm(n_sites, n_excited)
    return [
        comb(n_sites - k, n_excited - 1)
        for k in range(1, n_sites - n_excited + 2)
    ]


@lru_cache(maxsize=32)
def occupancy_matrix(n_sites: int, n_excited: int) -> np.ndarray:
    """(dim, N) 0/1 matrix; row q marks the excited sites of state q.

    Populations and occupation moments are matrix products of |a|^2 with
    columns of this matrix.  Cached per (N, M); treat the result as read-only.
    """
    states = enumerate_states(n_sites, n_excited)
    occ = np.zeros((len(states), n_sites))
    for q, state in enumerate(states):
        for m in state:
            occ[q, m - 1] = 1.0
    occ.setflags(write=False)
    return occ
