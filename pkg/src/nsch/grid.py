"""Uniform MAC-staggered rectangular grid and second-order discrete operators.

Scalars (phi, mu, p) live at cell centers, stored as (nx, ny) arrays with the
x index first.  Velocity components live on faces: ux on vertical faces with
shape (nx+1, ny), uy on horizontal faces with shape (nx, ny+1).  Homogeneous
Neumann conditions for scalars are realized by ghost-cell reflection, which
makes the gradient/divergence pair satisfy exact discrete summation by parts
for any face field vanishing on the boundary.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform rectangle [0,Lx]x[0,Ly] split into nx*ny cells (ny=1 -> 1D)."""

    nx: int
    ny: int
    Lx: float
    Ly: float

    def __post_init__(self):
        if self.nx < 4:
            raise ValueError(f"nx must be >= 4, got {self.nx}")
        if self.ny < 1:
            raise ValueError(f"ny must be >= 1, got {self.ny}")
        if self.Lx <= 0 or self.Ly <= 0:
            raise ValueError("domain side lengths must be positive")

    @property
    def hx(self) -> float:
        return self.Lx / self.nx

    @property
    def hy(self) -> float:
        return self.Ly / self.ny

    @property
    def cell_volume(self) -> float:
        return self.hx * self.hy

    @property
    def one_dimensional(self) -> bool:
        return self.ny == 1

    def cell_centers(self):
        """Arrays x (nx, ny) and y (nx, ny) of cell-center coordinates."""
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.broadcast_to(x[:, None], (self.nx, self.ny)).copy(), \
            np.broadcast_to(y[None, :], (self.nx, self.ny)).copy()

    def zeros(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny))


class MACVector:
    """Face-centered vector field: ux on (nx+1, ny), uy on (nx, ny+1)."""

    __slots__ = ("grid", "ux", "uy")

    def __init__(self, grid: Grid, ux: np.ndarray, uy: np.ndarray):
        if ux.shape != (grid.nx + 1, grid.ny):
            raise ValueError(f"ux shape {ux.shape} != {(grid.nx + 1, grid.ny)}")
        if uy.shape != (grid.nx, grid.ny + 1):
            raise ValueError(f"uy shape {uy.shape} != {(grid.nx, grid.ny + 1)}")
        self.grid = grid
        self.ux = ux
        self.uy = uy

    @classmethod
    def zeros(cls, grid: Grid) -> "MACVector":
        return cls(grid, np.zeros((grid.nx + 1, grid.ny)),
                   np.zeros((grid.nx, grid.ny + 1)))

    def copy(self) -> "MACVector":
        return MACVector(self.grid, self.ux.copy(), self.uy.copy())

    def zero_boundary_faces(self) -> "MACVector":
        """Return a copy with the normal boundary faces set to zero."""
        v = self.copy()
        v.ux[0, :] = 0.0
        v.ux[-1, :] = 0.0
        v.uy[:, 0] = 0.0
        v.uy[:, -1] = 0.0
        return v

    def __add__(self, other: "MACVector") -> "MACVector":
        return MACVector(self.grid, self.ux + other.ux, self.uy + other.uy)

    def __sub__(self, other: "MACVector") -> "MACVector":
        return MACVector(self.grid, self.ux - other.ux, self.uy - other.uy)

    def __mul__(self, a: float) -> "MACVector":
        return MACVector(self.grid, self.ux * a, self.uy * a)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(float(np.abs(self.ux).max()), float(np.abs(self.uy).max()))


def laplacian_neumann(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Five-point Laplacian with zero-flux (reflected ghost cell) boundaries.

    Identical to divergence_mac(gradient_to_faces(f)); written directly with
    edge padding to avoid the intermediate face arrays.
    """
    g = np.pad(f, 1, mode="edge")
    lap = (g[2:, 1:-1] - 2.0 * f + g[:-2, 1:-1]) / grid.hx**2
    if grid.ny > 1:
        lap += (g[1:-1, 2:] - 2.0 * f + g[1:-1, :-2]) / grid.hy**2
    return lap


def gradient_to_faces(grid: Grid, f: np.ndarray) -> MACVector:
    """Face-centered gradient; boundary faces carry 0 (Neumann extension)."""
    gx = np.zeros((grid.nx + 1, grid.ny))
    gx[1:-1, :] = (f[1:, :] - f[:-1, :]) / grid.hx
    gy = np.zeros((grid.nx, grid.ny + 1))
    if grid.ny > 1:
        gy[:, 1:-1] = (f[:, 1:] - f[:, :-1]) / grid.hy
    return MACVector(grid, gx, gy)


def divergence_mac(grid: Grid, v: MACVector) -> np.ndarray:
    """Standard MAC divergence: flux differences per cell."""
    div = (v.ux[1:, :] - v.ux[:-1, :]) / grid.hx
    div += (v.uy[:, 1:] - v.uy[:, :-1]) / grid.hy
    return div


def interpolate_cell_to_face(grid: Grid, f: np.ndarray) -> MACVector:
    """Two-point arithmetic average to faces; boundary faces take the edge value."""
    fx = np.empty((grid.nx + 1, grid.ny))
    fx[1:-1, :] = 0.5 * (f[1:, :] + f[:-1, :])
    fx[0, :] = f[0, :]
    fx[-1, :] = f[-1, :]
    fy = np.empty((grid.nx, grid.ny + 1))
    fy[:, 1:-1] = 0.5 * (f[:, 1:] + f[:, :-1])
    fy[:, 0] = f[:, 0]
    fy[:, -1] = f[:, -1]
    return MACVector(grid, fx, fy)


def advect_scalar(grid: Grid, u: MACVector, f: np.ndarray) -> np.ndarray:
    """Conservative advection div(u * f_face); equals u.grad(f) when div u = 0."""
    ff = interpolate_cell_to_face(grid, f)
    return divergence_mac(grid, MACVector(grid, u.ux * ff.ux, u.uy * ff.uy))


def cell_inner(grid: Grid, f: np.ndarray, g: np.ndarray) -> float:
    return float(np.sum(f * g)) * grid.cell_volume


def cell_norm(grid: Grid, f: np.ndarray) -> float:
    return float(np.sqrt(np.sum(f * f) * grid.cell_volume))


def cell_mean(grid: Grid, f: np.ndarray) -> float:
    return float(np.mean(f))


def face_inner(grid: Grid, v: MACVector, w: MACVector) -> float:
    return (float(np.sum(v.ux * w.ux)) + float(np.sum(v.uy * w.uy))) * grid.cell_volume


def face_norm(grid: Grid, v: MACVector) -> float:
    return float(np.sqrt((np.sum(v.ux**2) + np.sum(v.uy**2)) * grid.cell_volume))
