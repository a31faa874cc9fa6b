"""Projection step: incompressibility, dissipation, and mixture laws."""

import numpy as np
import pytest

from nsch import potential as pot
from nsch.errors import CFLViolation
from nsch.grid import Grid, MACVector, divergence_mac, face_norm
from nsch.momentum import (FlowState, ModelParams, MomentumConfig, check_cfl,
                           j_flux, kinetic_energy, momentum_step, nu_of_phi,
                           rho_of_phi)

FH = pot.FloryHuggins(theta=1.0, theta0=2.0)


def params(rho1=3.0, rho2=1.0, nu1=0.5, nu2=0.2):
    return ModelParams(rho1=rho1, rho2=rho2, nu1=nu1, nu2=nu2, potential=FH)


def stream_velocity(grid, mag=0.3):
    xn = np.linspace(0.0, grid.Lx, grid.nx + 1)
    yn = np.linspace(0.0, grid.Ly, grid.ny + 1)
    X, Y = np.meshgrid(xn, yn, indexing="ij")
    psi = mag * np.sin(np.pi * X / grid.Lx) ** 2 * np.sin(np.pi * Y / grid.Ly) ** 2
    return MACVector(grid, (psi[:, 1:] - psi[:, :-1]) / grid.hy,
                     -(psi[1:, :] - psi[:-1, :]) / grid.hx)


@pytest.fixture
def grid():
    return Grid(16, 16, 1.0, 1.0)


def test_mixture_law_endpoints():
    p = params()
    assert rho_of_phi(1.0, p) == p.rho1
    assert rho_of_phi(-1.0, p) == p.rho2
    assert nu_of_phi(1.0, p) == p.nu1
    assert nu_of_phi(-1.0, p) == p.nu2
    assert rho_of_phi(0.0, p) == 0.5 * (p.rho1 + p.rho2)
    assert p.rho_min == 1.0 and p.rho_max == 3.0
    assert p.drho_half == 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        params(rho2=-1.0)
    with pytest.raises(ValueError):
        params(nu1=0.0)


def test_j_flux(grid):
    p = params()
    # constant chemical potential carries no relative flux
    jf = j_flux(grid, np.full((grid.nx, grid.ny), 2.0), p)
    assert np.abs(jf.ux).max() == 0.0 and np.abs(jf.uy).max() == 0.0
    # linear mu: interior x-faces carry -(rho1-rho2)/2 * slope
    x, _ = grid.cell_centers()
    jf = j_flux(grid, 3.0 * x, p)
    assert np.allclose(jf.ux[1:-1, :], -p.drho_half * 3.0)
    # matched densities: no relative flux at all
    jf = j_flux(grid, 3.0 * x, params(rho1=2.0, rho2=2.0))
    assert np.abs(jf.ux).max() == 0.0


def test_rest_state_is_fixed_point(grid):
    p = params()
    phi = np.full((grid.nx, grid.ny), 0.3)
    mu = np.full((grid.nx, grid.ny), pot.psi_prime(0.3, FH))
    flow = FlowState(u=MACVector.zeros(grid), p=grid.zeros())
    out = momentum_step(grid, flow, phi, mu, phi, p, MomentumConfig(dt=1e-2))
    assert face_norm(grid, out.u) <= 1e-12


def test_projection_enforces_divergence_constraint(grid):
    p = params()
    rng = np.random.default_rng(11)
    phi = np.clip(0.5 * rng.standard_normal((grid.nx, grid.ny)), -0.9, 0.9)
    mu = rng.standard_normal((grid.nx, grid.ny))
    u = stream_velocity(grid, mag=0.1)
    out = momentum_step(grid, FlowState(u=u, p=grid.zeros()),
                        phi, mu, phi, p, MomentumConfig(dt=1e-3))
    div = divergence_mac(grid, out.u)
    assert np.abs(div - div.mean()).max() <= 1e-7


def test_kinetic_energy_decays_without_forcing(grid):
    p = params()
    phi = np.full((grid.nx, grid.ny), 0.0)
    mu = np.zeros_like(phi)
    u = stream_velocity(grid, mag=0.2)
    flow = FlowState(u=u, p=grid.zeros())
    e = kinetic_energy(grid, u, phi, p)
    for _ in range(5):
        flow = momentum_step(grid, flow, phi, mu, phi, p, MomentumConfig(dt=1e-3))
        e_new = kinetic_energy(grid, flow.u, phi, p)
        assert e_new < e
        e = e_new


def test_phase_swap_symmetry(grid):
    # exchanging the two fluids and flipping phi leaves the velocity unchanged
    pa = params(rho1=3.0, rho2=1.0, nu1=0.5, nu2=0.2)
    pb = params(rho1=1.0, rho2=3.0, nu1=0.2, nu2=0.5)
    x, y = grid.cell_centers()
    phi = 0.5 * np.cos(np.pi * x) * np.cos(np.pi * y)
    mu = np.cos(np.pi * x)
    u = stream_velocity(grid, mag=0.1)
    cfg = MomentumConfig(dt=1e-3)
    oa = momentum_step(grid, FlowState(u=u.copy(), p=grid.zeros()),
                       phi, mu, phi, pa, cfg)
    ob = momentum_step(grid, FlowState(u=u.copy(), p=grid.zeros()),
                       -phi, -mu, -phi, pb, cfg)
    assert np.abs(oa.u.ux - ob.u.ux).max() <= 1e-9
    assert np.abs(oa.u.uy - ob.u.uy).max() <= 1e-9


def test_no_slip_boundary_faces(grid):
    p = params()
    rng = np.random.default_rng(12)
    phi = np.clip(0.3 * rng.standard_normal((grid.nx, grid.ny)), -0.9, 0.9)
    mu = rng.standard_normal((grid.nx, grid.ny))
    out = momentum_step(grid, FlowState(u=stream_velocity(grid, 0.1),
                                        p=grid.zeros()),
                        phi, mu, phi, p, MomentumConfig(dt=1e-3))
    assert np.abs(out.u.ux[0, :]).max() == 0.0
    assert np.abs(out.u.ux[-1, :]).max() == 0.0
    assert np.abs(out.u.uy[:, 0]).max() == 0.0
    assert np.abs(out.u.uy[:, -1]).max() == 0.0


def test_cfl_guard(grid):
    u = stream_velocity(grid, mag=1.0)
    umax = u.max_abs()
    with pytest.raises(CFLViolation):
        check_cfl(grid, u, dt=1.0)
    # below the bound: fine
    check_cfl(grid, u, dt=0.4 * min(grid.hx, grid.hy) / umax)
    # zero velocity never violates
    check_cfl(grid, MACVector.zeros(grid), dt=100.0)
