"""Stationary Cahn-Hilliard solver with mass constraint.

Solves -Lap phi + Psi'(phi) = mu_inf with zero-flux boundary and prescribed
cell mean, treating the constant mu_inf as an explicit unknown of the damped
Newton iteration so the mass constraint is satisfied by the linear algebra
itself.  The double-obstacle variant uses a primal-dual active set loop.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import potential as pot
from .assemble import neumann_laplacian_matrix
from .errors import ActiveSetCycling, NewtonDiverged
from .grid import (Grid, cell_norm, face_norm, gradient_to_faces,
                   laplacian_neumann)


@dataclass
class StationarySolution:
    phi_inf: np.ndarray
    mu_inf: float
    residual: float
    separation: float
    newton_iters: int
    lam: np.ndarray | None = None


def stationary_residual_field(grid, phi, mu_inf, kind, lam=None):
    if isinstance(kind, pot.FloryHuggins):
        return -laplacian_neumann(grid, phi) + pot.psi_prime(phi, kind) - mu_inf
    return (-laplacian_neumann(grid, phi) - kind.theta0 * phi
            + (lam if lam is not None else 0.0) - mu_inf)


def stationary_solve(grid: Grid, phi_guess: np.ndarray, m: float, kind,
                     tol: float = 1e-10, max_iter: int = 50) -> StationarySolution:
    """Damped Newton on the mass-constrained stationary system."""
    if abs(m) >= 1.0:
        raise ValueError("target mean must satisfy |m| < 1")
    if isinstance(kind, pot.DoubleObstacle):
        return _stationary_obstacle(grid, phi_guess, m, kind, tol, max_iter)

    n = grid.nx * grid.ny
    lap = neumann_laplacian_matrix(grid)
    ones = np.ones(n)
    phi = pot.clamp_phase(phi_guess.copy())
    mu_inf = float(np.mean(pot.psi_prime(phi, kind)))

    def res(phi, mu_inf):
        r1 = stationary_residual_field(grid, phi, mu_inf, kind)
        r2 = float(phi.mean()) - m
        return r1, r2

    def norm(r1, r2):
        return float(np.sqrt(cell_norm(grid, r1) ** 2 + r2 ** 2))

    r1, r2 = res(phi, mu_inf)
    rnorm = norm(r1, r2)
    iters = 0
    while rnorm > tol:
        if iters >= max_iter:
            raise NewtonDiverged(
                f"stationary Newton stalled at residual {rnorm:.3e}",
                iterate=phi, residual=rnorm)
        jac_phi = (-lap + sp.diags(pot.psi_second(phi, kind).ravel())).tocsr()
        # bordered system: unknowns (delta_phi, delta_mu_inf)
        top = sp.hstack([jac_phi, -ones[:, None]])
        bot = sp.hstack([sp.csr_matrix(ones[None, :] / n), sp.csr_matrix((1, 1))])
        big = sp.vstack([top, bot]).tocsc()
        sol = spla.spsolve(big, -np.concatenate([r1.ravel(), [r2]]))
        dphi = sol[:n].reshape(grid.nx, grid.ny)
        dmu = float(sol[n])
        s = pot.fraction_to_boundary(phi, dphi)
        while True:
            cand = pot.clamp_phase(phi + s * dphi)
            cmu = mu_inf + s * dmu
            c1, c2 = res(cand, cmu)
            cnorm = norm(c1, c2)
            if cnorm <= (1.0 - 1e-4 * s) * rnorm or s < 2.0**-30:
                break
            s *= 0.5
        if cnorm >= rnorm and s < 2.0**-30:
            raise NewtonDiverged(
                f"stationary line search failed at residual {rnorm:.3e}",
                iterate=phi, residual=rnorm)
        phi, mu_inf, r1, r2, rnorm = cand, cmu, c1, c2, cnorm
        iters += 1

    return StationarySolution(
        phi_inf=phi, mu_inf=mu_inf, residual=rnorm,
        separation=1.0 - float(np.abs(phi).max()), newton_iters=iters)


def _stationary_obstacle(grid, phi_guess, m, kind, tol, max_iter):
    """Active-set stationarity for the obstacle potential."""
    n = grid.nx * grid.ny
    lap = neumann_laplacian_matrix(grid)
    ones = np.ones(n)
    a_phi = (-lap - kind.theta0 * sp.identity(n)).tocsr()
    c = 100.0
    phi = np.clip(phi_guess.ravel().copy(), -1.0, 1.0)
    # seed the multiplier where the guess touches the bounds, otherwise the
    # first iteration has an empty active set and the linear solve jumps to
    # the trivial constant branch; wrongly seeded cells are released later
    lam = np.where(phi >= 1.0 - 1e-12, c,
                   np.where(phi <= -1.0 + 1e-12, -c, 0.0))
    mu_inf = 0.0
    prev = None
    for it in range(max_iter):
        act_hi = lam + c * (phi - 1.0) > 0.0
        act_lo = lam + c * (phi + 1.0) < 0.0
        sets = (act_hi.tobytes(), act_lo.tobytes())
        if sets == prev:
            break
        prev = sets
        inact = ~(act_hi | act_lo)
        b_phi = sp.diags((act_hi | act_lo).astype(float))
        b_lam = sp.diags(inact.astype(float))
        # rows: N balance, N complementarity, 1 mass; cols: phi, lam, mu_inf
        top = sp.hstack([a_phi, sp.identity(n), -ones[:, None]])
        mid = sp.hstack([b_phi, b_lam, sp.csr_matrix((n, 1))])
        bot = sp.hstack([sp.csr_matrix(ones[None, :] / n),
                         sp.csr_matrix((1, n)), sp.csr_matrix((1, 1))])
        rhs = np.concatenate([
            np.zeros(n),
            np.where(act_hi, 1.0, np.where(act_lo, -1.0, 0.0)),
            [m],
        ])
        sol = spla.spsolve(sp.vstack([top, mid, bot]).tocsc(), rhs)
        phi, lam, mu_inf = sol[:n], sol[n:2 * n], float(sol[2 * n])
    else:
        raise ActiveSetCycling(
            f"stationary active set did not settle in {max_iter} iterations")
    phi2 = phi.reshape(grid.nx, grid.ny)
    lam2 = lam.reshape(grid.nx, grid.ny)
    r = stationary_residual_field(grid, phi2, mu_inf, kind, lam=lam2)
    return StationarySolution(
        phi_inf=phi2, mu_inf=mu_inf, residual=cell_norm(grid, r),
        separation=1.0 - float(np.abs(phi2).max()), newton_iters=it, lam=lam2)


def stationarity_residual(grid: Grid, state) -> tuple[float, float, float]:
    """(|grad mu|_L2, |u|_L2, |mu - mean(mu)|_L2); all three vanish on the
    omega-limit set."""
    g = gradient_to_faces(grid, state.mu)
    grad_mu = np.sqrt((np.sum(g.ux**2) + np.sum(g.uy**2)) * grid.cell_volume)
    u_norm = face_norm(grid, state.u)
    mu_dev = cell_norm(grid, state.mu - state.mu.mean())
    return float(grad_mu), float(u_norm), float(mu_dev)
