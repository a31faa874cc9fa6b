"""Variable-density, variable-viscosity momentum step on the MAC grid.

Semi-implicit pressure-projection step for the non-conservative momentum
equation with reduced pressure and capillary forcing -phi grad(mu):
explicit centered advection and relative-flux transport, implicit treatment
of the component-wise part of div(nu D u), then a variable-coefficient
Poisson projection restoring the discrete divergence constraint.
"""

from dataclasses import dataclass

import numpy as np

from . import potential as pot
from .errors import CFLViolation, LinearSolveFailed
from .grid import (Grid, MACVector, divergence_mac, gradient_to_faces,
                   interpolate_cell_to_face)
from .spectral import NeumannSpectral


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the two-fluid mixture (mobility fixed to 1)."""

    rho1: float
    rho2: float
    nu1: float
    nu2: float
    potential: pot.PotentialKind

    def __post_init__(self):
        if min(self.rho1, self.rho2, self.nu1, self.nu2) <= 0:
            raise ValueError("densities and viscosities must be positive")

    @property
    def rho_min(self) -> float:
        return min(self.rho1, self.rho2)

    @property
    def rho_max(self) -> float:
        return max(self.rho1, self.rho2)

    @property
    def nu_min(self) -> float:
        return min(self.nu1, self.nu2)

    @property
    def nu_max(self) -> float:
        return max(self.nu1, self.nu2)

    @property
    def drho_half(self) -> float:
        """rho'(phi) = (rho1 - rho2)/2, the relative-flux coefficient."""
        return 0.5 * (self.rho1 - self.rho2)


@dataclass
class FlowState:
    u: MACVector
    p: np.ndarray


@dataclass
class MomentumConfig:
    dt: float
    linear_tol: float = 1e-10
    linear_max: int = 2000


def rho_of_phi(phi, params: ModelParams):
    """Linear mixture density rho1 (1+phi)/2 + rho2 (1-phi)/2."""
    phi = np.asarray(phi, dtype=float)
    return params.rho1 * 0.5 * (1.0 + phi) + params.rho2 * 0.5 * (1.0 - phi)


def nu_of_phi(phi, params: ModelParams):
    """Linear mixture viscosity nu1 (1+phi)/2 + nu2 (1-phi)/2."""
    phi = np.asarray(phi, dtype=float)
    return params.nu1 * 0.5 * (1.0 + phi) + params.nu2 * 0.5 * (1.0 - phi)


def j_flux(grid: Grid, mu: np.ndarray, params: ModelParams) -> MACVector:
    """Relative mass flux -((rho1-rho2)/2) grad(mu), face-centered."""
    return gradient_to_faces(grid, mu) * (-params.drho_half)


def kinetic_energy(grid: Grid, u: MACVector, phi, params: ModelParams) -> float:
    rf = interpolate_cell_to_face(grid, rho_of_phi(phi, params))
    return 0.5 * (float(np.sum(rf.ux * u.ux**2))
                  + float(np.sum(rf.uy * u.uy**2))) * grid.cell_volume


def check_cfl(grid: Grid, u: MACVector, dt: float) -> None:
    umax = u.max_abs()
    if umax > 0.0 and dt > 0.5 * min(grid.hx, grid.hy) / umax:
        raise CFLViolation(
            f"dt={dt:g} exceeds advective CFL bound "
            f"{0.5 * min(grid.hx, grid.hy) / umax:g} (max|u|={umax:g})")


def _pad_ux(ux):
    """Ghost rows in y for ux with no-slip walls (odd reflection)."""
    g = np.empty((ux.shape[0], ux.shape[1] + 2))
    g[:, 1:-1] = ux
    g[:, 0] = -ux[:, 0]
    g[:, -1] = -ux[:, -1]
    return g


def _pad_uy(uy):
    """Ghost columns in x for uy with no-slip walls (odd reflection)."""
    g = np.empty((uy.shape[0] + 2, uy.shape[1]))
    g[1:-1, :] = uy
    g[0, :] = -uy[0, :]
    g[-1, :] = -uy[-1, :]
    return g


def _nodes_from_cells(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Average a cell field to the (nx+1, ny+1) grid nodes (edge clipped)."""
    g = np.pad(f, 1, mode="edge")
    return 0.25 * (g[:-1, :-1] + g[1:, :-1] + g[:-1, 1:] + g[1:, 1:])


def _uy_at_xfaces(grid: Grid, uy: np.ndarray) -> np.ndarray:
    """Average uy to interior x-face locations; shape (nx+1, ny), boundary rows unused."""
    out = np.zeros((grid.nx + 1, grid.ny))
    avg = 0.5 * (uy[:, :-1] + uy[:, 1:])              # (nx, ny), at cell centers
    out[1:-1, :] = 0.5 * (avg[:-1, :] + avg[1:, :])
    return out


def _ux_at_yfaces(grid: Grid, ux: np.ndarray) -> np.ndarray:
    out = np.zeros((grid.nx, grid.ny + 1))
    avg = 0.5 * (ux[:-1, :] + ux[1:, :])              # (nx, ny), at cell centers
    out[:, 1:-1] = 0.5 * (avg[:, :-1] + avg[:, 1:])
    return out


def _advect_faces(grid: Grid, trans: MACVector, u: MACVector) -> MACVector:
    """Centered (trans . grad) u evaluated on faces; boundary faces zero."""
    hx, hy = grid.hx, grid.hy
    uxg = _pad_ux(u.ux)
    uyg = _pad_uy(u.uy)

    ax = np.zeros_like(u.ux)
    dx_ux = (u.ux[2:, :] - u.ux[:-2, :]) / (2 * hx)
    dy_ux = (uxg[1:-1, 2:] - uxg[1:-1, :-2]) / (2 * hy)
    ty = _uy_at_xfaces(grid, trans.uy)
    ax[1:-1, :] = trans.ux[1:-1, :] * dx_ux + ty[1:-1, :] * dy_ux

    ay = np.zeros_like(u.uy)
    dy_uy = (u.uy[:, 2:] - u.uy[:, :-2]) / (2 * hy)
    dx_uy = (uyg[2:, 1:-1] - uyg[:-2, 1:-1]) / (2 * hx)
    tx = _ux_at_yfaces(grid, trans.ux)
    ay[:, 1:-1] = trans.uy[:, 1:-1] * dy_uy + tx[:, 1:-1] * dx_uy
    return MACVector(grid, ax, ay)


def _visc_ux(grid: Grid, ux, nu_c, nu_n):
    """div(nu grad ux) at x-faces: d_x(nu_c d_x ux) + d_y(nu_n d_y ux)."""
    hx, hy = grid.hx, grid.hy
    out = np.zeros_like(ux)
    flux_x = nu_c * (ux[1:, :] - ux[:-1, :]) / hx      # (nx, ny) at centers
    out[1:-1, :] = (flux_x[1:, :] - flux_x[:-1, :]) / hx
    uxg = _pad_ux(ux)
    flux_y = nu_n * (uxg[:, 1:] - uxg[:, :-1]) / hy    # (nx+1, ny+1) at nodes
    out[1:-1, :] += (flux_y[1:-1, 1:] - flux_y[1:-1, :-1]) / hy
    return out


def _visc_uy(grid: Grid, uy, nu_c, nu_n):
    hx, hy = grid.hx, grid.hy
    out = np.zeros_like(uy)
    flux_y = nu_c * (uy[:, 1:] - uy[:, :-1]) / hy      # (nx, ny) at centers
    out[:, 1:-1] = (flux_y[:, 1:] - flux_y[:, :-1]) / hy
    uyg = _pad_uy(uy)
    flux_x = nu_n * (uyg[1:, :] - uyg[:-1, :]) / hx    # (nx+1, ny+1) at nodes
    out[:, 1:-1] += (flux_x[1:, 1:-1] - flux_x[:-1, 1:-1]) / hx
    return out


def _visc_transpose(grid: Grid, u: MACVector, nu_c, nu_n) -> MACVector:
    """div(nu (grad u)^T): x-comp d_x(nu d_x ux) + d_y(nu d_x uy), y analog."""
    hx, hy = grid.hx, grid.hy
    uyg = _pad_uy(u.uy)
    uxg = _pad_ux(u.ux)

    out_x = np.zeros_like(u.ux)
    flux_xx = nu_c * (u.ux[1:, :] - u.ux[:-1, :]) / hx
    out_x[1:-1, :] = (flux_xx[1:, :] - flux_xx[:-1, :]) / hx
    dx_uy = (uyg[1:, :] - uyg[:-1, :]) / hx            # (nx+1, ny+1) at nodes
    flux_yx = nu_n * dx_uy
    out_x[1:-1, :] += (flux_yx[1:-1, 1:] - flux_yx[1:-1, :-1]) / hy

    out_y = np.zeros_like(u.uy)
    flux_yy = nu_c * (u.uy[:, 1:] - u.uy[:, :-1]) / hy
    out_y[:, 1:-1] = (flux_yy[:, 1:] - flux_yy[:, :-1]) / hy
    dy_ux = (uxg[:, 1:] - uxg[:, :-1]) / hy            # (nx+1, ny+1) at nodes
    flux_xy = nu_n * dy_ux
    out_y[:, 1:-1] += (flux_xy[1:, 1:-1] - flux_xy[:-1, 1:-1]) / hx
    return MACVector(grid, out_x, out_y)


def _pcg(matvec, b, diag, tol, maxiter, precond=None):
    """Deterministic preconditioned CG; returns x with ||Ax-b|| <= tol*||b||."""
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = float(np.sqrt(np.sum(b * b)))
    if bnorm == 0.0:
        return x, 0
    z = precond(r) if precond is not None else r / diag
    p = z.copy()
    rz = float(np.sum(r * z))
    for it in range(maxiter):
        Ap = matvec(p)
        alpha = rz / float(np.sum(p * Ap))
        x += alpha * p
        r -= alpha * Ap
        if float(np.sqrt(np.sum(r * r))) <= tol * bnorm:
            return x, it + 1
        z = precond(r) if precond is not None else r / diag
        rz_new = float(np.sum(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise LinearSolveFailed(
        f"CG stalled at relative residual "
        f"{float(np.sqrt(np.sum(r*r))) / bnorm:.3e} after {maxiter} iterations")


_proj_spectral: dict[Grid, NeumannSpectral] = {}


def momentum_step(grid: Grid, flow: FlowState, phi: np.ndarray, mu: np.ndarray,
                  phi_old: np.ndarray, params: ModelParams,
                  cfg: MomentumConfig) -> FlowState:
    """One semi-implicit projection step; returns the new FlowState."""
    dt = cfg.dt
    un = flow.u
    check_cfl(grid, un, dt)

    rho_new_c = rho_of_phi(phi, params)
    rho_old_c = rho_of_phi(phi_old, params)
    nu_c = nu_of_phi(phi, params)
    nu_n = _nodes_from_cells(grid, nu_c)
    rf = interpolate_cell_to_face(grid, rho_new_c)
    rf_old = interpolate_cell_to_face(grid, rho_old_c)

    # explicit terms at t^n
    adv = _advect_faces(grid, un, un)
    jf = j_flux(grid, mu, params)
    jadv = _advect_faces(grid, jf, un)
    visc_t = _visc_transpose(grid, un, nu_c, nu_n)
    gmu = gradient_to_faces(grid, mu)
    phif = interpolate_cell_to_face(grid, phi)
    gp = gradient_to_faces(grid, flow.p)

    rhs_x = (rf.ux * un.ux / dt - rf_old.ux * adv.ux - jadv.ux
             + 0.5 * visc_t.ux - phif.ux * gmu.ux - gp.ux)
    rhs_y = (rf.uy * un.uy / dt - rf_old.uy * adv.uy - jadv.uy
             + 0.5 * visc_t.uy - phif.uy * gmu.uy - gp.uy)

    # implicit solve per component: (rho/dt) w - (1/2) div(nu grad w) = rhs
    def mv_x(w):
        w = w.reshape(grid.nx + 1, grid.ny)
        out = rf.ux * w / dt - 0.5 * _visc_ux(grid, w, nu_c, nu_n)
        out[0, :] = w[0, :]
        out[-1, :] = w[-1, :]
        return out.ravel()

    def mv_y(w):
        w = w.reshape(grid.nx, grid.ny + 1)
        out = rf.uy * w / dt - 0.5 * _visc_uy(grid, w, nu_c, nu_n)
        out[:, 0] = w[:, 0]
        out[:, -1] = w[:, -1]
        return out.ravel()

    diag_x = _diag_ux(grid, rf.ux, nu_c, nu_n, dt)
    diag_y = _diag_uy(grid, rf.uy, nu_c, nu_n, dt)
    rhs_x[0, :] = 0.0
    rhs_x[-1, :] = 0.0
    rhs_y[:, 0] = 0.0
    rhs_y[:, -1] = 0.0
    sx, _ = _pcg(mv_x, rhs_x.ravel(), diag_x.ravel(), cfg.linear_tol, cfg.linear_max)
    star = MACVector(grid, sx.reshape(grid.nx + 1, grid.ny),
                     np.zeros((grid.nx, grid.ny + 1)))
    if grid.ny > 1:
        sy, _ = _pcg(mv_y, rhs_y.ravel(), diag_y.ravel(), cfg.linear_tol, cfg.linear_max)
        star.uy[:] = sy.reshape(grid.nx, grid.ny + 1)
    star = star.zero_boundary_faces()

    # variable-coefficient projection: div((dt/rho) grad q) = div u*
    coef = MACVector(grid, dt / rf.ux, dt / rf.uy)
    div_star = divergence_mac(grid, star)
    rhs_q = -(div_star - div_star.mean())
    if grid not in _proj_spectral:
        _proj_spectral[grid] = NeumannSpectral(grid)
    spec = _proj_spectral[grid]
    cbar = dt / float(np.mean(rho_new_c))

    def mv_q(q):
        q = q.reshape(grid.nx, grid.ny)
        g = gradient_to_faces(grid, q)
        return -divergence_mac(grid, MACVector(grid, coef.ux * g.ux,
                                               coef.uy * g.uy)).ravel()

    def pre_q(r):
        r = r.reshape(grid.nx, grid.ny)
        return spec.solve(r, 0.0, -cbar, project_nullspace=True).ravel()

    q, _ = _pcg(mv_q, rhs_q.ravel(), None, cfg.linear_tol, cfg.linear_max,
                precond=pre_q)
    q = q.reshape(grid.nx, grid.ny)
    q -= q.mean()
    gq = gradient_to_faces(grid, q)
    u_new = MACVector(grid, star.ux - coef.ux * gq.ux,
                      star.uy - coef.uy * gq.uy).zero_boundary_faces()
    return FlowState(u=u_new, p=flow.p + q)


def _diag_ux(grid, rfux, nu_c, nu_n, dt):
    d = rfux / dt
    dd = np.zeros_like(rfux)
    dd[1:-1, :] = (nu_c[1:, :] + nu_c[:-1, :]) / grid.hx**2
    dd[1:-1, :] += (nu_n[1:-1, 1:] + nu_n[1:-1, :-1]) / grid.hy**2
    out = d + 0.5 * dd
    out[0, :] = 1.0
    out[-1, :] = 1.0
    return out


def _diag_uy(grid, rfuy, nu_c, nu_n, dt):
    d = rfuy / dt
    dd = np.zeros_like(rfuy)
    dd[:, 1:-1] = (nu_c[:, 1:] + nu_c[:, :-1]) / grid.hy**2
    dd[:, 1:-1] += (nu_n[1:, 1:-1] + nu_n[:-1, 1:-1]) / grid.hx**2
    out = d + 0.5 * dd
    out[:, 0] = 1.0
    out[:, -1] = 1.0
    return out
