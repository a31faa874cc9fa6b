"""Single-step and short-trajectory properties of the phase-field stepper."""

import numpy as np
import pytest

from nsch import potential as pot
from nsch.cahn_hilliard import (CHState, CHStepConfig, ch_step, estimate_monitor,
                                free_energy, vanishing_viscosity_suite)
from nsch.grid import Grid, MACVector, cell_norm

FH = pot.FloryHuggins(theta=1.0, theta0=2.0)


def make_state(grid, phi):
    return CHState(t=0.0, phi=phi, mu=np.zeros_like(phi))


def smooth_phi(grid, amp=0.3, mean=0.1):
    x, y = grid.cell_centers()
    return mean + amp * np.cos(np.pi * x / grid.Lx) * np.cos(np.pi * y / grid.Ly)


@pytest.fixture
def grid():
    return Grid(16, 16, 1.0, 1.0)


def test_constant_state_is_fixed_point(grid):
    phi0 = np.full((grid.nx, grid.ny), 0.4)
    st, stats = ch_step(grid, make_state(grid, phi0), None,
                        CHStepConfig(dt=0.05), FH)
    assert np.abs(st.phi - 0.4).max() <= 1e-10
    # chemical potential is the constant Psi'(0.4)
    assert np.abs(st.mu - pot.psi_prime(0.4, FH)).max() <= 1e-9
    assert stats.newton_iters <= 2


def test_mass_conserved_with_and_without_drift(grid):
    phi = smooth_phi(grid)
    m0 = phi.mean()
    st = make_state(grid, phi)
    rng = np.random.default_rng(7)
    u = MACVector(grid, rng.standard_normal((grid.nx + 1, grid.ny)),
                  rng.standard_normal((grid.nx, grid.ny + 1))).zero_boundary_faces()
    for drift in (None, u):
        out, _ = ch_step(grid, st, drift, CHStepConfig(dt=1e-3), FH)
        assert abs(out.phi.mean() - m0) <= 1e-12


def test_iterates_stay_strictly_inside(grid):
    phi = np.clip(smooth_phi(grid, amp=0.95, mean=0.0), -0.999, 0.999)
    st = make_state(grid, phi)
    for _ in range(5):
        st, _ = ch_step(grid, st, None, CHStepConfig(dt=1e-2), FH)
        assert np.abs(st.phi).max() < 1.0


def test_energy_decay_without_drift(grid):
    phi = smooth_phi(grid, amp=0.5, mean=0.0)
    st = make_state(grid, phi)
    e = free_energy(grid, st.phi, FH)
    for _ in range(10):
        st, stats = ch_step(grid, st, None, CHStepConfig(dt=1e-2), FH)
        e_new = free_energy(grid, st.phi, FH)
        # E(new) - E(old) + dt |grad mu|^2 + splitting remainder ~ 0
        assert e_new <= e + 1e-10
        assert stats.num_diss >= -1e-12
        defect = e_new - e + 1e-2 * stats.d_chem + stats.num_diss
        assert abs(defect) <= 1e-8 * max(1.0, abs(e))
        e = e_new


def test_phase_swap_antisymmetry(grid):
    phi = smooth_phi(grid, amp=0.4, mean=0.0)
    cfg = CHStepConfig(dt=1e-2)
    a, _ = ch_step(grid, make_state(grid, phi), None, cfg, FH)
    b, _ = ch_step(grid, make_state(grid, -phi), None, cfg, FH)
    assert np.abs(a.phi + b.phi).max() <= 1e-8
    assert np.abs(a.mu + b.mu).max() <= 1e-7


def test_step_convergence_order_in_dt(grid):
    phi = smooth_phi(grid, amp=0.4, mean=0.0)
    T = 0.02
    finals = {}
    for dt in (T / 4, T / 8, T / 16, T / 64):
        st = make_state(grid, phi)
        for _ in range(int(round(T / dt))):
            st, _ = ch_step(grid, st, None, CHStepConfig(dt=dt), FH)
        finals[dt] = st.phi
    ref = finals[T / 64]
    errs = [cell_norm(grid, finals[dt] - ref) for dt in (T / 4, T / 8, T / 16)]
    orders = [np.log2(a / b) for a, b in zip(errs, errs[1:])]
    # first-order splitting
    assert all(o >= 0.85 for o in orders), orders


def test_obstacle_bounds_and_complementarity(grid):
    kind = pot.DoubleObstacle(theta0=2.0)
    phi = smooth_phi(grid, amp=0.9, mean=0.0)
    st = CHState(t=0.0, phi=phi, mu=np.zeros_like(phi),
                 lam=np.zeros_like(phi))
    m0 = phi.mean()
    for _ in range(5):
        st, stats = ch_step(grid, st, None, CHStepConfig(dt=1e-2), kind)
        assert np.abs(st.phi).max() <= 1.0 + 1e-12
        r = pot.obstacle_complementarity_residual(st.phi, st.lam, 100.0)
        assert np.abs(r).max() <= 1e-9
    assert abs(st.phi.mean() - m0) <= 1e-12


def test_obstacle_multiplier_activates():
    # deep quench with the obstacle potential saturates the phase field and
    # turns the multiplier on
    g = Grid(64, 1, 6.4, 0.1)
    x, _ = g.cell_centers()
    phi = np.tanh((x - 3.2) / 0.5)
    st = CHState(t=0.0, phi=phi, mu=np.zeros_like(phi), lam=np.zeros_like(phi))
    kind = pot.DoubleObstacle(theta0=2.0)
    for _ in range(20):
        st, _ = ch_step(g, st, None, CHStepConfig(dt=1e-3), kind)
    assert np.abs(st.phi).max() == pytest.approx(1.0, abs=1e-12)
    assert np.abs(st.lam).max() > 0.0


def test_pinned_path_for_deep_quench():
    # theta = 1/16: the implicit log step has no representable interior
    # solution; the constrained fallback must pin cells at the clamp band
    g = Grid(64, 1, 6.4, 0.1)
    x, _ = g.cell_centers()
    phi = pot.clamp_phase(np.tanh((x - 3.2) / 0.5) * 0.9999)
    st = CHState(t=0.0, phi=phi, mu=np.zeros_like(phi))
    kind = pot.FloryHuggins(theta=1.0 / 16, theta0=2.0)
    m0 = phi.mean()
    for _ in range(10):
        st, _ = ch_step(g, st, None, CHStepConfig(dt=1e-3), kind)
        assert np.abs(st.phi).max() <= pot.PHI_CLIP
    assert abs(st.phi.mean() - m0) <= 1e-10
    assert st.lam is not None and np.abs(st.lam).max() > 0.0


def test_vanishing_viscosity_convergence(grid):
    phi = smooth_phi(grid, amp=0.5, mean=0.0)
    cfg = CHStepConfig(dt=1e-2)
    finals = vanishing_viscosity_suite(grid, phi, None, [0.1, 0.01, 0.0],
                                       cfg, FH, t_end=0.05)
    ref = finals[-1].phi
    d = [cell_norm(grid, f.phi - ref) for f in finals[:-1]]
    assert d[1] < d[0]
    assert d[1] <= 0.2 * d[0]


def test_estimate_monitor_finite(grid):
    phi = smooth_phi(grid, amp=0.5, mean=0.0)
    st = make_state(grid, phi)
    hist = [st]
    for _ in range(5):
        st, _ = ch_step(grid, st, None, CHStepConfig(dt=1e-2), FH)
        hist.append(st)
    rep = estimate_monitor(grid, hist, 1e-2)
    assert rep.finite
    assert rep.sup_grad_mu >= max(rep.grad_mu_series) - 1e-14
    assert rep.int_grad_dphit >= 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        CHStepConfig(dt=0.0)
    with pytest.raises(ValueError):
        CHStepConfig(dt=1e-2, alpha=-1.0)
