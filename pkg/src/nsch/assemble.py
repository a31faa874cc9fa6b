"""Sparse matrix assembly for the cell-centered Neumann Laplacian.

Used by the direct (sparse LU) solution paths: the primal-dual active set
step for the obstacle potential and the stationary Newton solver.  Cell
(i, j) maps to row i*ny + j.
"""

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .grid import Grid


@lru_cache(maxsize=32)
def _laplacian_1d(n: int, h: float) -> sp.csr_matrix:
    main = -2.0 * np.ones(n)
    main[0] = -1.0
    main[-1] = -1.0
    off = np.ones(n - 1)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h**2


@lru_cache(maxsize=32)
def neumann_laplacian_matrix(grid: Grid) -> sp.csr_matrix:
    """Matrix of laplacian_neumann acting on flattened (nx*ny) fields."""
    lx = _laplacian_1d(grid.nx, grid.hx)
    if grid.ny == 1:
        return lx.copy()
    ly = _laplacian_1d(grid.ny, grid.hy)
    ix = sp.identity(grid.nx, format="csr")
    iy = sp.identity(grid.ny, format="csr")
    return (sp.kron(lx, iy) + sp.kron(ix, ly)).tocsr()


@lru_cache(maxsize=32)
def neumann_bilaplacian_matrix(grid: Grid) -> sp.csr_matrix:
    lap = neumann_laplacian_matrix(grid)
    return (lap @ lap).tocsr()
