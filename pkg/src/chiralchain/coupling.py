"""Assembly of the C(N,M)-dimensional generator from the pairwise kernel.

Two bare states couple only when they share M-1 excited sites; the matrix
element is then the kernel entry between the two sites that differ.  The
index bookkeeping depends only on (N, M), so it is computed once and reused
for every disorder realization.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import basis
from .errors import CapacityError, ParameterError
from .kernel import SystemParams

# Dense storage throughout; the physics of interest lives at C(N,M) <= 500.
DEFAULT_DIM_CAP = 2000


@dataclass(frozen=True)
class SparsityPattern:
    """Precomputed (row, col, mu, nu) quadruples of the off-diagonal entries.

    `from_sites`/`to_sites` are 0-based site indices: entry (rows[k], cols[k])
    takes the kernel value vbar[from_sites[k], to_sites[k]].
    """

    n_sites: int
    n_excited: int
    dim: int
    rows: np.ndarray
    cols: np.ndarray
    from_sites: np.ndarray
    to_sites: np.ndarray


@lru_cache(maxsize=16)
def row_structure(n_sites: int, n_excited: int) -> SparsityPattern:
    """Neighbor index lists for every basis row; M*(N-M) entries per row."""
    states = basis.enumerate_states(n_sites, n_excited)
    index = {s: q for q, s in enumerate(states)}
    rows, cols, from_sites, to_sites = [], [], [], []
    for q, state in enumerate(states):
        for other, src, dst in basis.neighbors(state, n_sites, n_excited):
            rows.append(q)
            cols.append(index[other])
            from_sites.append(src - 1)
            to_sites.append(dst - 1)
    as_idx = lambda xs: np.asarray(xs, dtype=np.intp)
    pattern = SparsityPattern(
        n_sites=n_sites,
        n_excited=n_excited,
        dim=len(states),
        rows=as_idx(rows),
        cols=as_idx(cols),
        from_sites=as_idx(from_sites),
        to_sites=as_idx(to_sites),
    )
    for arr in (pattern.rows, pattern.cols, pattern.from_sites, pattern.to_sites):
        arr.setflags(write=False)
    return pattern


def assemble(
    params: SystemParams,
    vbar: np.ndarray,
    pattern: SparsityPattern | None = None,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> np.ndarray:
    """Dense C(N,M) x C(N,M) generator for one realization.

    Diagonal entries are -M*gamma/2; the off-diagonal entry between states
    differing by one excitation moved from site mu to site nu is vbar[mu, nu].
    """
    if vbar.shape != (params.n_sites, params.n_sites):
        raise ParameterError(
            f"kernel has shape {vbar.shape}, expected ({params.n_sites}, {params.n_sites})"
        )
    dim = params.dim
    if dim > dim_cap:
        raise CapacityError(
            f"basis dimension C({params.n_sites},{params.n_excited})={dim} "
            f"exceeds the cap {dim_cap}"
        )
    if pattern is None:
        pattern = row_structure(params.n_sites, params.n_excited)
    v = np.zeros((dim, dim), dtype=complex)
    v[pattern.rows, pattern.cols] = vbar[pattern.from_sites, pattern.to_sites]
    np.fill_diagonal(v, -params.n_excited * params.gamma / 2.0)
    return v


def dump_matrix(v: np.ndarray, path) -> None:
    """Debug dump of the nonzero entries as (row, col, re, im) text records."""
    with open(path, "w") as fh:
        fh.write("row col re im\n")
        rows, cols = np.nonzero(v)
        for r, c in zip(rows, cols):
            fh.write(f"{r} {c} {v[r, c].real!r} {v[r, c].imag!r}\n")
