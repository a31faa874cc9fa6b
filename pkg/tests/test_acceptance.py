"""End-to-end acceptance suite.

Each test covers one numbered behavioral guarantee of the solver; running
``pytest -v tests/test_acceptance.py`` gives one pass/fail line per item.
The long standing-mixture benchmark (items 5-7, plus the pointwise-bound
sweep of item 3) is computed once in a module-scoped fixture.
"""

import time

import numpy as np
import pytest

from nsch import io, potential as pot
from nsch.cahn_hilliard import CHState, CHStepConfig, ch_step, free_energy
from nsch.cli import cli
from nsch.coupled import InitialCondition, RunConfig, run
from nsch.diagnostics import separation_time, weak_strong_distance
from nsch.grid import Grid, cell_norm, face_inner, gradient_to_faces, laplacian_neumann
from nsch.momentum import ModelParams
from nsch.obstacle_limit import obstacle_run, regularize_initial, theta_limit_study
from nsch.selftest import run_selftests
from nsch.stationary import stationary_solve

FH = pot.FloryHuggins(theta=1.0, theta0=2.0)


def spinodal_params(nu: float) -> ModelParams:
    return ModelParams(rho1=3.0, rho2=1.0, nu1=nu, nu2=nu, potential=FH)


def benchmark_grid() -> Grid:
    # elongated box: the transverse modes relax fast, so the trajectory
    # reaches the flat-interface regime within the run horizon
    return Grid(64, 64, 5.5, 1.1)


def standing_mixture_init() -> InitialCondition:
    return InitialCondition(kind="seeded_perturbation", mean=0.0,
                            amplitude=5.0, seed=1, modes=1,
                            u0="shear_layer", u0_magnitude=0.5)


@pytest.fixture(scope="module")
def standing_mixture():
    """Shear layer over a spinodal phase field, run to t = 5 at dt = 1e-4."""
    grid = benchmark_grid()
    cfg = RunConfig(dt=1e-4, t_end=5.0, output_every=10000,
                    init=standing_mixture_init())
    result = run(grid, spinodal_params(1.0), cfg)
    return grid, result


def test_01_operator_correctness():
    t0 = time.time()
    results = run_selftests()
    elapsed = time.time() - t0
    failures = [(name, detail) for name, ok, detail in results if not ok]
    assert not failures, failures
    assert elapsed < 10.0


def test_02_mass_conservation():
    grid = benchmark_grid()
    cfg = RunConfig(dt=1e-3, t_end=2.0, output_every=500,
                    init=standing_mixture_init())
    res = run(grid, spinodal_params(1.0), cfg)
    assert len(res.records) == 2001
    m0 = res.records[0].mass
    assert max(abs(r.mass - m0) for r in res.records) <= 1e-10


def test_03_pointwise_bound(standing_mixture):
    _, res = standing_mixture
    for rec in res.records:
        assert max(abs(rec.phi_min), abs(rec.phi_max)) < 1.0
    # obstacle dynamics respect the bound exactly
    grid = Grid(128, 1, 12.8, 0.1)
    x, _ = grid.cell_centers()
    phi0 = np.tanh(x - 0.5 * grid.Lx)
    hist = obstacle_run(grid, phi0, 2.0, CHStepConfig(dt=1e-3), t_end=0.1)
    for st in hist:
        assert np.abs(st.phi).max() <= 1.0


def test_04_energy_inequality():
    grid = benchmark_grid()
    init = InitialCondition(kind="seeded_perturbation", mean=0.0,
                            amplitude=0.5, seed=1, modes=2)
    cfg = RunConfig(dt=1e-4, t_end=0.2, output_every=1000, init=init)
    res = run(grid, spinodal_params(0.1), cfg)
    e0 = res.records[0].E_total
    assert max(r.energy_defect for r in res.records[1:]) <= 1e-8 * e0

    # with the velocity forced to zero the free-energy budget is an identity
    st = CHState(t=0.0, phi=init.build_phi(grid),
                 mu=np.zeros((grid.nx, grid.ny)))
    ef0 = free_energy(grid, st.phi, FH)
    step_cfg = CHStepConfig(dt=1e-4)
    e_prev = ef0
    for _ in range(200):
        st, stats = ch_step(grid, st, None, step_cfg, FH)
        e_new = free_energy(grid, st.phi, FH)
        defect = e_new - e_prev + step_cfg.dt * stats.d_chem + stats.num_diss
        assert abs(defect) <= 1e-10 * ef0
        e_prev = e_new


def test_05_velocity_decay(standing_mixture):
    _, res = standing_mixture
    r0, rT = res.records[0], res.records[-1]
    assert r0.u_L2 > 0.0
    assert rT.u_L2 <= 1e-3 * r0.u_L2


def test_06_separation(standing_mixture):
    _, res = standing_mixture
    t_sp, trailing = separation_time(res.records)
    delta_obs = res.records[-1].sep_delta
    assert delta_obs > 0.0
    assert t_sp < res.records[-1].t
    assert trailing >= 0.5 * delta_obs
    delta_star = 1.0 - pot.binodal_root(FH)
    assert abs(delta_obs - delta_star) <= 0.2 * delta_star


def test_07_convergence_to_equilibrium(standing_mixture):
    grid, res = standing_mixture
    r0, rT = res.records[0], res.records[-1]
    assert rT.stat_mu_residual <= 1e-4 * r0.stat_mu_residual
    assert rT.grad_mu_L2 <= 1e-4 * r0.grad_mu_L2
    phi_T = res.final.phi
    sol = stationary_solve(grid, phi_T, float(phi_T.mean()), FH)
    assert sol.newton_iters <= 10
    assert sol.residual <= 1e-10
    assert cell_norm(grid, phi_T - sol.phi_inf) <= 1e-3


def test_08_stationary_oracle():
    # drive the drift-free dynamics to steady state and compare with Newton
    grid = Grid(96, 1, 6.0, 0.1)
    x, _ = grid.cell_centers()
    st = CHState(t=0.0, phi=np.tanh((x - 3.0) / 0.7),
                 mu=np.zeros((grid.nx, grid.ny)))
    cfg = CHStepConfig(dt=0.05)
    for _ in range(600):
        st, _ = ch_step(grid, st, None, cfg, FH)
    sol = stationary_solve(grid, st.phi, float(st.phi.mean()), FH)
    assert cell_norm(grid, sol.phi_inf - st.phi) <= 1e-6


K_LIST = [4, 16, 64, 256]


@pytest.fixture(scope="module")
def obstacle_limit_setup():
    grid = Grid(128, 1, 12.8, 0.1)
    x, _ = grid.cell_centers()
    phi0 = np.tanh(x - 0.5 * grid.Lx)
    return grid, phi0


def test_09_double_obstacle_limit(obstacle_limit_setup):
    grid, phi0 = obstacle_limit_setup
    rep = theta_limit_study(grid, phi0, 2.0, K_LIST, CHStepConfig(dt=1e-3),
                            t_end=0.5)
    assert rep.monotone
    assert all(b < a for a, b in zip(rep.distances, rep.distances[1:]))
    assert rep.distances[-1] <= rep.distances[0] / 10.0


def test_10_regularized_initial_data(obstacle_limit_setup):
    grid, phi0 = obstacle_limit_setup
    phi0 = np.clip(phi0, -1.0, 1.0)
    mu0 = -laplacian_neumann(grid, phi0) - 2.0 * phi0
    for k in K_LIST:
        phik = regularize_initial(grid, mu0, phi0, k, 2.0)
        assert np.abs(phik).max() < 1.0
        r = (-laplacian_neumann(grid, phik) + np.arctanh(phik) / k + phik
             - (mu0 + 2.0 * phi0 + phi0))
        assert cell_norm(grid, r) <= 1e-10


def test_11_weak_strong_contractivity():
    from nsch.coupled import perturbed_initial
    grid = Grid(32, 32, 4.4, 4.4)
    params = spinodal_params(0.5)
    cfg = RunConfig(dt=1e-3, t_end=0.05, output_every=10,
                    init=InitialCondition(kind="bubble", width=0.5,
                                          radius=0.25))
    base = run(grid, params, cfg)
    hist = [s for _, s in base.snapshots]
    finals = []
    for eps in (1e-2, 5e-3):
        pert = run(grid, params, cfg,
                   initial=perturbed_initial(grid, params, cfg, eps))
        dist = weak_strong_distance(grid, hist,
                                    [s for _, s in pert.snapshots], params)
        finals.append(dist[-1].value)
    ratio = finals[0] / finals[1]
    assert 2.0 <= ratio <= 8.0


def test_12_determinism(tmp_path, monkeypatch):
    cfg_text = """\
domain.Lx = 4.4
domain.Ly = 4.4
grid.nx = 32
grid.ny = 32
params.rho1 = 3.0
params.rho2 = 1.0
params.nu1 = 0.1
params.nu2 = 0.1
params.theta = 1.0
params.theta0 = 2.0
potential.kind = flory_huggins
time.dt = 1e-3
time.t_end = 0.05
output.every = 10
init.kind = seeded_perturbation
init.amplitude = 0.2
init.seed = 7
init.u0 = shear_layer
init.u0_magnitude = 0.1
"""
    cfg = tmp_path / "case.cfg"
    cfg.write_text(cfg_text)
    outputs = []
    for tag in ("a", "b"):
        monkeypatch.setenv("NSCH_OUTPUT_DIR", str(tmp_path / tag))
        assert cli(["run", str(cfg)]) == 0
        outputs.append((tmp_path / tag / "diagnostics.csv").read_bytes())
    assert outputs[0] == outputs[1]
    snaps_a = sorted((tmp_path / "a").glob("snapshot_*.bin"))
    snaps_b = sorted((tmp_path / "b").glob("snapshot_*.bin"))
    assert [p.name for p in snaps_a] == [p.name for p in snaps_b]
    for pa, pb in zip(snaps_a, snaps_b):
        assert pa.read_bytes() == pb.read_bytes()
