"""Per-step scalar observables and the two-run distance functional.

Every quantity the analysis constrains is computed here with quadrature
matched to the solver's discrete operators, so that the telescoping energy
budget closes: energy_defect accumulates E_total difference plus the
step's physical dissipation and the scheme's known splitting remainder.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NotSeparated
from .grid import (Grid, MACVector, cell_norm, face_inner, face_norm,
                   gradient_to_faces, interpolate_cell_to_face,
                   laplacian_neumann)
from .momentum import ModelParams, nu_of_phi, rho_of_phi
from . import potential as pot
from .cahn_hilliard import free_energy

CSV_HEADER = ("t,mass,E_total,E_kin,E_free,D_visc,D_chem,u_L2,grad_mu_L2,"
              "grad_mu_H1,phi_min,phi_max,sep_delta,stat_mu_residual,"
              "energy_defect")


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    E_total: float
    E_kin: float
    E_free: float
    D_visc: float
    D_chem: float
    u_L2: float
    grad_mu_L2: float
    grad_mu_H1: float
    phi_min: float
    phi_max: float
    sep_delta: float
    stat_mu_residual: float
    energy_defect: float

    def row(self) -> str:
        vals = [self.t, self.mass, self.E_total, self.E_kin, self.E_free,
                self.D_visc, self.D_chem, self.u_L2, self.grad_mu_L2,
                self.grad_mu_H1, self.phi_min, self.phi_max, self.sep_delta,
                self.stat_mu_residual, self.energy_defect]
        return ",".join(f"{v:.17g}" for v in vals)


def strain_rate_dissipation(grid: Grid, u: MACVector, phi, params) -> float:
    """Viscous dissipation sum of nu(phi)|Du|^2 over the grid."""
    nu_c = nu_of_phi(phi, params)
    dxx = np.diff(u.ux, axis=0) / grid.hx           # at centers
    dyy = np.diff(u.uy, axis=1) / grid.hy           # at centers
    diag_part = float(np.sum(nu_c * (dxx**2 + dyy**2)))
    # off-diagonal strain at grid nodes, no-slip ghosts
    uxg = np.empty((grid.nx + 1, grid.ny + 2))
    uxg[:, 1:-1] = u.ux
    uxg[:, 0] = -u.ux[:, 0]
    uxg[:, -1] = -u.ux[:, -1]
    uyg = np.empty((grid.nx + 2, grid.ny + 1))
    uyg[1:-1, :] = u.uy
    uyg[0, :] = -u.uy[0, :]
    uyg[-1, :] = -u.uy[-1, :]
    dy_ux = (uxg[:, 1:] - uxg[:, :-1]) / grid.hy    # at nodes
    dx_uy = (uyg[1:, :] - uyg[:-1, :]) / grid.hx
    shear = 0.5 * (dy_ux + dx_uy)
    g = np.pad(nu_c, 1, mode="edge")
    nu_n = 0.25 * (g[:-1, :-1] + g[1:, :-1] + g[:-1, 1:] + g[1:, 1:])
    off_part = 2.0 * float(np.sum(nu_n * shear**2))
    return (diag_part + off_part) * grid.cell_volume


def kinetic_energy_density(grid: Grid, u: MACVector, phi, params) -> float:
    rf = interpolate_cell_to_face(grid, rho_of_phi(phi, params))
    return 0.5 * (float(np.sum(rf.ux * u.ux**2))
                  + float(np.sum(rf.uy * u.uy**2))) * grid.cell_volume


def record(grid: Grid, state, prev, params: ModelParams, dt: float,
           num_diss: float = 0.0, prev_E_total: float | None = None) -> DiagnosticsRecord:
    """Compute one diagnostics row; energy_defect only when prev is given."""
    kind = params.potential
    e_kin = kinetic_energy_density(grid, state.u, state.phi, params)
    e_free = free_energy(grid, state.phi, kind)
    e_total = e_kin + e_free
    d_visc = strain_rate_dissipation(grid, state.u, state.phi, params)
    gmu = gradient_to_faces(grid, state.mu)
    d_chem = face_inner(grid, gmu, gmu)
    grad_mu_l2 = float(np.sqrt(d_chem))
    lap_mu = laplacian_neumann(grid, state.mu)
    grad_mu_h1 = float(np.sqrt(d_chem + cell_norm(grid, lap_mu) ** 2))
    mu_dev = state.mu - state.mu.mean()
    defect = 0.0
    if prev is not None:
        e_prev = prev_E_total
        if e_prev is None:
            e_prev = (kinetic_energy_density(grid, prev.u, prev.phi, params)
                      + free_energy(grid, prev.phi, kind))
        defect = e_total - e_prev + dt * (d_visc + d_chem) + num_diss
    return DiagnosticsRecord(
        t=state.t,
        mass=float(state.phi.mean()),
        E_total=e_total,
        E_kin=e_kin,
        E_free=e_free,
        D_visc=d_visc,
        D_chem=d_chem,
        u_L2=face_norm(grid, state.u),
        grad_mu_L2=grad_mu_l2,
        grad_mu_H1=grad_mu_h1,
        phi_min=float(state.phi.min()),
        phi_max=float(state.phi.max()),
        sep_delta=1.0 - float(np.abs(state.phi).max()),
        stat_mu_residual=cell_norm(grid, mu_dev),
        energy_defect=defect,
    )


def separation_time(series: list[DiagnosticsRecord]) -> tuple[float, float]:
    """Observed separation onset: first time after which sep_delta stays above
    half its final value; returns (T_SP_observed, trailing minimum)."""
    if not series:
        raise NotSeparated("empty series")
    deltas = np.array([r.sep_delta for r in series])
    times = np.array([r.t for r in series])
    final = deltas[-1]
    if final < 1e-6:
        raise NotSeparated(f"final sep_delta {final:.3e} below 1e-6")
    threshold = 0.5 * final
    below = np.where(deltas < threshold)[0]
    start = 0 if below.size == 0 else int(below[-1]) + 1
    return float(times[start]), float(deltas[start:].min())


@dataclass
class WeakStrongDistance:
    t: float
    value: float


def weak_strong_distance(grid: Grid, history_a, history_b,
                         params: ModelParams) -> list[WeakStrongDistance]:
    """Gronwall distance 1/2 int rho(phi_a)|u_a-u_b|^2 + 1/2 ||Lap(phi_a-phi_b)||^2
    per shared output time."""
    if len(history_a) != len(history_b):
        raise GridMismatch("histories have different lengths")
    out = []
    for sa, sb in zip(history_a, history_b):
        if sa.phi.shape != sb.phi.shape:
            raise GridMismatch("histories live on different grids")
        rf = interpolate_cell_to_face(grid, rho_of_phi(sa.phi, params))
        du = sa.u - sb.u
        kin = 0.5 * (float(np.sum(rf.ux * du.ux**2))
                     + float(np.sum(rf.uy * du.uy**2))) * grid.cell_volume
        lap_diff = laplacian_neumann(grid, sa.phi - sb.phi)
        out.append(WeakStrongDistance(
            t=sa.t, value=kin + 0.5 * cell_norm(grid, lap_diff) ** 2))
    return out
