"""DCT-based solvers for constant-coefficient Neumann operators.

The cell-centered Neumann Laplacian on a uniform grid is diagonalized by the
type-II discrete cosine transform with eigenvalues
    lam_i = -(4/h^2) sin^2(pi i / (2 n)).
These factorizations serve as preconditioners for the variable-coefficient
Krylov solves and as direct solvers in the constant-coefficient case.
"""

import numpy as np
from scipy.fft import dctn, idctn

from .grid import Grid


class NeumannSpectral:
    """Fast application of (c0 + c1*Lap + c2*Lap^2)^(-1) for the Neumann Laplacian."""

    def __init__(self, grid: Grid):
        self.grid = grid
        lx = -(4.0 / grid.hx**2) * np.sin(np.pi * np.arange(grid.nx) / (2 * grid.nx)) ** 2
        ly = -(4.0 / grid.hy**2) * np.sin(np.pi * np.arange(grid.ny) / (2 * grid.ny)) ** 2
        self.lam = lx[:, None] + ly[None, :]

    def solve(self, rhs: np.ndarray, c0: float, c1: float = 0.0, c2: float = 0.0,
              project_nullspace: bool = False) -> np.ndarray:
        """Solve (c0 + c1*Lap + c2*Lap^2) x = rhs.

        With project_nullspace the constant mode is removed from rhs and the
        solution (pure-Neumann Poisson case, c0 == 0).
        """
        den = c0 + c1 * self.lam + c2 * self.lam**2
        rhat = dctn(rhs, type=2, norm="ortho")
        if project_nullspace:
            rhat[0, 0] = 0.0
            den = den.copy()
            den[0, 0] = 1.0
        return idctn(rhat / den, type=2, norm="ortho")
