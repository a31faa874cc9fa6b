"""Full coupled time step and whole-trajectory runs.

One step advances the Cahn-Hilliard pair with the lagged velocity, then the
momentum/pressure pair with the fresh (phi, mu).  The energy inequality is
checked per step (strict mode turns a violation into a hard failure).
"""

from dataclasses import dataclass, field

import numpy as np

from . import potential as pot
from .cahn_hilliard import CHState, CHStepConfig, ch_step
from .diagnostics import DiagnosticsRecord, record
from .errors import ConfigError, NschError
from .grid import Grid, MACVector, divergence_mac
from .momentum import (FlowState, ModelParams, MomentumConfig, check_cfl,
                       momentum_step)


@dataclass
class State:
    """Solution tuple (t, u, p, phi, mu) at one time level."""

    t: float
    u: MACVector
    p: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    lam: np.ndarray | None = None

    def copy(self) -> "State":
        return State(self.t, self.u.copy(), self.p.copy(), self.phi.copy(),
                     self.mu.copy(),
                     None if self.lam is None else self.lam.copy())


@dataclass
class InitialCondition:
    """Initial phase field and velocity.

    kind: constant | seeded_perturbation | tanh_interface | bubble
    u0:   zero | shear_layer
    """

    kind: str = "constant"
    mean: float = 0.0
    amplitude: float = 0.0
    seed: int = 0
    orientation: str = "x"
    width: float = 0.2
    center: tuple[float, float] = (0.5, 0.5)
    radius: float = 0.25
    u0: str = "zero"
    u0_magnitude: float = 0.0
    modes: int = 4

    def __post_init__(self):
        if abs(self.mean) >= 1.0:
            raise ConfigError(f"initial mean must satisfy |m| < 1, got {self.mean}")
        if self.kind not in ("constant", "seeded_perturbation",
                            "tanh_interface", "bubble"):
            raise ConfigError(f"unknown init kind {self.kind!r}")
        if self.u0 not in ("zero", "shear_layer"):
            raise ConfigError(f"unknown u0 kind {self.u0!r}")

    def build_phi(self, grid: Grid) -> np.ndarray:
        x, y = grid.cell_centers()
        if self.kind == "constant":
            phi = np.full((grid.nx, grid.ny), self.mean)
        elif self.kind == "seeded_perturbation":
            # band-limited random perturbation: a few zero-flux cosine modes
            # with seeded coefficients.  Unlike per-cell noise this is
            # resolution independent and feeds the unstable band directly;
            # the constant mode is excluded so the mean is exact.
            rng = np.random.default_rng(self.seed)
            modes = self.modes
            s = np.zeros((grid.nx, grid.ny))
            for i in range(modes + 1):
                for j in range(modes + 1):
                    if i == 0 and j == 0:
                        continue
                    c = rng.standard_normal()
                    s += (c * np.cos(np.pi * i * x / grid.Lx)
                          * np.cos(np.pi * j * y / grid.Ly))
            # soft saturation keeps the datum strictly separated from +-1;
            # amplitudes above the saturation level produce plateau-like
            # fields that are already deep in the separated regime
            sat = 0.96
            shat = s / np.abs(s).max()
            phi = self.mean + sat * np.tanh(self.amplitude * shat / sat)
        elif self.kind == "tanh_interface":
            coord = x - 0.5 * grid.Lx if self.orientation == "x" else y - 0.5 * grid.Ly
            phi = np.tanh(coord / self.width)
        else:  # bubble
            cx, cy = self.center[0] * grid.Lx, self.center[1] * grid.Ly
            dist = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
            phi = np.tanh((self.radius * grid.Lx - dist) / self.width)
        return np.clip(phi, -1.0 + 1e-6, 1.0 - 1e-6)

    def build_u(self, grid: Grid) -> MACVector:
        if self.u0 == "zero" or self.u0_magnitude == 0.0:
            return MACVector.zeros(grid)
        # discrete curl of a node-based stream function: exactly div-free,
        # zero normal boundary faces
        xn = np.linspace(0.0, grid.Lx, grid.nx + 1)
        yn = np.linspace(0.0, grid.Ly, grid.ny + 1)
        X, Y = np.meshgrid(xn, yn, indexing="ij")
        psi = (self.u0_magnitude * np.sin(np.pi * X / grid.Lx) ** 2
               * np.sin(np.pi * Y / grid.Ly) ** 2)
        ux = (psi[:, 1:] - psi[:, :-1]) / grid.hy
        uy = -(psi[1:, :] - psi[:-1, :]) / grid.hx
        return MACVector(grid, ux, uy)


@dataclass
class RunConfig:
    dt: float
    t_end: float
    output_every: int = 100
    init: InitialCondition = field(default_factory=InitialCondition)
    newton_tol: float = 1e-10
    newton_max: int = 50
    linear_tol: float = 1e-10
    alpha: float = 0.0
    strict_energy: bool = False
    energy_tol_rel: float = 1e-8

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("time.dt must be positive")
        if self.t_end < 0:
            raise ConfigError("time.t_end must be nonnegative")
        if self.output_every < 1:
            raise ConfigError("output.every must be >= 1")

    def ch_config(self) -> CHStepConfig:
        return CHStepConfig(dt=self.dt, alpha=self.alpha,
                            newton_tol=self.newton_tol,
                            newton_max=self.newton_max,
                            linear_tol=self.linear_tol)

    def momentum_config(self) -> MomentumConfig:
        return MomentumConfig(dt=self.dt, linear_tol=self.linear_tol)

    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def initial_state(grid: Grid, params: ModelParams, cfg: RunConfig) -> State:
    phi = cfg.init.build_phi(grid)
    if isinstance(params.potential, pot.FloryHuggins):
        mu = (-_lap(grid, phi) + pot.psi_prime(phi, params.potential))
    else:
        mu = -_lap(grid, phi) - params.potential.theta0 * phi
    u = cfg.init.build_u(grid)
    return State(t=0.0, u=u, p=grid.zeros(), phi=phi, mu=mu)


def _lap(grid, f):
    from .grid import laplacian_neumann
    return laplacian_neumann(grid, f)


def coupled_step(grid: Grid, state: State, params: ModelParams,
             cfg: RunConfig) -> tuple[State, object]:
    """CH with lagged velocity, then momentum with the new (phi, mu)."""
    ch_state = CHState(t=state.t, phi=state.phi, mu=state.mu, lam=state.lam)
    ch_new, stats = ch_step(grid, ch_state, state.u, cfg.ch_config(),
                            params.potential)
    if grid.one_dimensional:
        return State(t=ch_new.t, u=state.u, p=state.p, phi=ch_new.phi,
                     mu=ch_new.mu, lam=ch_new.lam), stats
    flow = momentum_step(grid, FlowState(u=state.u, p=state.p),
                         ch_new.phi, ch_new.mu, state.phi, params,
                         cfg.momentum_config())
    return State(t=ch_new.t, u=flow.u, p=flow.p, phi=ch_new.phi,
                 mu=ch_new.mu, lam=ch_new.lam), stats


def perturbed_initial(grid: Grid, params: ModelParams, cfg: RunConfig,
                      eps: float) -> State:
    """Initial state with a smooth mean-free bump of size eps added to phi.

    The bump is the lowest zero-flux cosine mode, so the perturbed datum
    keeps the mass of the base state exactly and remains admissible.
    """
    base = initial_state(grid, params, cfg)
    x, y = grid.cell_centers()
    bump = np.cos(np.pi * x / grid.Lx)
    if not grid.one_dimensional:
        bump = bump * np.cos(np.pi * y / grid.Ly)
    phi = np.clip(base.phi + eps * bump, -1.0 + 1e-9, 1.0 - 1e-9)
    if isinstance(params.potential, pot.FloryHuggins):
        mu = -_lap(grid, phi) + pot.psi_prime(phi, params.potential)
    else:
        mu = -_lap(grid, phi) - params.potential.theta0 * phi
    return State(t=0.0, u=base.u, p=base.p, phi=phi, mu=mu)


@dataclass
class RunResult:
    final: State
    records: list[DiagnosticsRecord]
    snapshots: list[tuple[int, State]]


def run(grid: Grid, params: ModelParams, cfg: RunConfig,
        initial: State | None = None) -> RunResult:
    """Fixed-step trajectory with per-step diagnostics and snapshot schedule."""
    state = initial_state(grid, params, cfg) if initial is None else initial.copy()
    if not grid.one_dimensional:
        check_cfl(grid, state.u, cfg.dt)
    rec0 = record(grid, state, None, params, cfg.dt)
    records = [rec0]
    snapshots = [(0, state.copy())]
    e0 = rec0.E_total
    n = cfg.n_steps()
    prev_e = e0
    for step in range(1, n + 1):
        try:
            new_state, stats = coupled_step(grid, state, params, cfg)
        except NschError as err:
            raise type(err)(f"step {step}: {err}") from err
        rec = record(grid, new_state, state, params, cfg.dt,
                     num_diss=stats.num_diss, prev_E_total=prev_e)
        records.append(rec)
        if cfg.strict_energy and rec.energy_defect > cfg.energy_tol_rel * max(e0, 1e-300):
            raise NschError(
                f"step {step}: energy defect {rec.energy_defect:.3e} exceeds "
                f"{cfg.energy_tol_rel:g} * E(0)")
        state = new_state
        prev_e = rec.E_total
        if step % cfg.output_every == 0 and step != n:
            snapshots.append((step, state.copy()))
    if n > 0:
        snapshots.append((n, state.copy()))
    return RunResult(final=state, records=records, snapshots=snapshots)
