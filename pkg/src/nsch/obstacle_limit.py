"""Double-obstacle limit study: theta = 1/k runs against the obstacle dynamics.

The sharp-potential limit replaces the logarithmic term by the indicator of
[-1, 1].  For each k the initial datum is regularized through the elliptic
problem -Lap phi + (1/k) F0'(phi) + phi = mu0 + theta0 phi0 + phi0, which
keeps it strictly inside (-1, 1), and the logarithmic run with theta = 1/k
is compared at a fixed horizon with the active-set obstacle run.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import potential as pot
from .assemble import neumann_laplacian_matrix
from .cahn_hilliard import CHState, CHStepConfig, ch_step
from .errors import NewtonDiverged
from .grid import Grid, MACVector, cell_norm, laplacian_neumann


def regularize_initial(grid: Grid, mu0: np.ndarray, phi0: np.ndarray, k: int,
                       theta0: float, tol: float = 1e-12,
                       max_iter: int = 60) -> np.ndarray:
    """Solve -Lap phi + (1/k) F0'(phi) + phi = mu0 + theta0*phi0 + phi0."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    mu_tilde = mu0 + theta0 * phi0 + phi0
    n = grid.nx * grid.ny
    lap = neumann_laplacian_matrix(grid)
    inv_k = 1.0 / k

    def res(phi):
        # F0' = artanh; the theta=1 normalized convex log derivative
        return (-laplacian_neumann(grid, phi) + inv_k * np.arctanh(phi)
                + phi - mu_tilde)

    phi = pot.clamp_phase(phi0.copy())
    r = res(phi)
    rnorm = cell_norm(grid, r)
    for _ in range(max_iter):
        if rnorm <= tol:
            break
        d = inv_k / (1.0 - phi * phi) + 1.0
        jac = (-lap + sp.diags(d.ravel())).tocsc()
        dphi = spla.spsolve(jac, -r.ravel()).reshape(grid.nx, grid.ny)
        s = pot.fraction_to_boundary(phi, dphi)
        while True:
            cand = pot.clamp_phase(phi + s * dphi)
            rc = res(cand)
            rcnorm = cell_norm(grid, rc)
            if rcnorm <= (1.0 - 1e-4 * s) * rnorm or s < 2.0**-30:
                break
            s *= 0.5
        phi, r, rnorm = cand, rc, rcnorm
    else:
        raise NewtonDiverged(
            f"initial-data regularization stalled at residual {rnorm:.3e}",
            iterate=phi, residual=rnorm)
    return phi


def obstacle_run(grid: Grid, phi0: np.ndarray, theta0: float,
                 cfg: CHStepConfig, t_end: float,
                 u: MACVector | None = None) -> list[CHState]:
    """Active-set obstacle Cahn-Hilliard trajectory; |phi| <= 1 exactly."""
    kind = pot.DoubleObstacle(theta0=theta0)
    st = CHState(t=0.0, phi=np.clip(phi0, -1.0, 1.0),
                 mu=np.zeros_like(phi0), lam=np.zeros_like(phi0))
    hist = [st]
    n_steps = int(round(t_end / cfg.dt))
    for _ in range(n_steps):
        st, _ = ch_step(grid, st, u, cfg, kind)
        hist.append(st)
    return hist


@dataclass
class ConvergenceReport:
    k_list: list[int]
    thetas: list[float]
    distances: list[float]
    monotone: bool | None
    obstacle_final: np.ndarray


def theta_limit_study(grid: Grid, phi0: np.ndarray, theta0: float,
                      k_list: list[int], cfg: CHStepConfig, t_end: float,
                      u: MACVector | None = None) -> ConvergenceReport:
    """Distance of each theta=1/k run to the obstacle run at the horizon."""
    if not k_list or any(b <= a for a, b in zip(k_list, k_list[1:])):
        raise ValueError("k_list must be nonempty and strictly increasing")
    obstacle_hist = obstacle_run(grid, phi0, theta0, cfg, t_end, u=u)
    phi_do = obstacle_hist[-1].phi

    # obstacle-side chemical potential of the shared initial datum (lambda=0)
    mu0 = -laplacian_neumann(grid, phi0) - theta0 * phi0
    distances = []
    n_steps = int(round(t_end / cfg.dt))
    for k in k_list:
        phik = regularize_initial(grid, mu0, phi0, k, theta0)
        kind = pot.FloryHuggins(theta=1.0 / k, theta0=theta0)
        st = CHState(t=0.0, phi=phik, mu=np.zeros_like(phik))
        for _ in range(n_steps):
            st, _ = ch_step(grid, st, u, cfg, kind)
        distances.append(cell_norm(grid, st.phi - phi_do))

    monotone = None
    if len(k_list) > 1:
        monotone = all(b <= a for a, b in zip(distances, distances[1:]))
    return ConvergenceReport(k_list=list(k_list),
                             thetas=[1.0 / k for k in k_list],
                             distances=distances, monotone=monotone,
                             obstacle_final=phi_do)
