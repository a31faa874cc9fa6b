"""Convex-splitting time stepper for the Cahn-Hilliard equation with drift.

One implicit step of
    (phi+ - phi)/dt + div(u phi_face) = Lap mu+,
    mu+ = alpha (phi+ - phi)/dt - Lap phi+ + F'(phi+) - theta0 phi
treating the convex log part implicitly and the concave -theta0 s^2/2 part
explicitly, which makes the free-energy budget close to a discrete identity
(tracked in CHStepStats.num_diss).  The double-obstacle variant replaces
F' by a Lagrange multiplier resolved with a primal-dual active set loop.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import potential as pot
from .assemble import neumann_bilaplacian_matrix, neumann_laplacian_matrix
from .errors import ActiveSetCycling, LinearSolveFailed, NewtonDiverged
from .grid import (Grid, MACVector, advect_scalar, cell_inner, cell_norm,
                   face_inner, gradient_to_faces, laplacian_neumann)
from .spectral import NeumannSpectral


@dataclass
class CHState:
    """Phase field and chemical potential at one time level."""

    t: float
    phi: np.ndarray
    mu: np.ndarray
    lam: np.ndarray | None = None  # obstacle multiplier, None for the log potential


@dataclass
class CHStepConfig:
    dt: float
    alpha: float = 0.0
    newton_tol: float = 1e-10
    newton_max: int = 50
    linear_tol: float = 1e-10
    linear_max: int = 400
    pdas_c: float = 100.0
    pdas_max: int = 60

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")


@dataclass
class CHStepStats:
    """Per-step bookkeeping used by the discrete energy budget."""

    newton_iters: int = 0
    residual: float = 0.0
    num_diss: float = 0.0   # splitting remainder, >= 0 up to rounding
    transfer: float = 0.0   # <div(u phi_face), mu+>, exchange with kinetic energy
    d_chem: float = 0.0     # |grad mu+|^2


_spectral_cache: dict[Grid, NeumannSpectral] = {}


def _spectral(grid: Grid) -> NeumannSpectral:
    if grid not in _spectral_cache:
        _spectral_cache[grid] = NeumannSpectral(grid)
    return _spectral_cache[grid]


def free_energy(grid: Grid, phi: np.ndarray, kind) -> float:
    """Discrete E_free with the same face-gradient quadrature as the solver."""
    g = gradient_to_faces(grid, phi)
    grad_part = 0.5 * face_inner(grid, g, g)
    if isinstance(kind, pot.FloryHuggins):
        bulk = float(np.sum(pot.psi_value(phi, kind))) * grid.cell_volume
    else:
        bulk = -0.5 * kind.theta0 * float(np.sum(phi * phi)) * grid.cell_volume
    return grad_part + bulk


def _solve_newton_update(grid, a, alpha, D, rhs, cfg):
    """Solve (a I - alpha*a Lap + Lap^2 - Lap D) x = rhs by preconditioned GMRES."""
    spec = _spectral(grid)
    dbar = float(np.median(D))

    def matvec(p):
        p = p.reshape(grid.nx, grid.ny)
        lp = laplacian_neumann(grid, p)
        out = a * p - alpha * a * lp + laplacian_neumann(grid, lp - D * p)
        return out.ravel()

    def precond(r):
        r = r.reshape(grid.nx, grid.ny)
        return spec.solve(r, a, -(alpha * a + dbar), 1.0).ravel()

    n = grid.nx * grid.ny
    op = spla.LinearOperator((n, n), matvec=matvec)
    M = spla.LinearOperator((n, n), matvec=precond)
    x, info = spla.gmres(op, rhs.ravel(), rtol=cfg.linear_tol, atol=0.0,
                         restart=40, maxiter=cfg.linear_max, M=M)
    if info != 0:
        raise LinearSolveFailed(f"GMRES did not converge (info={info})")
    return x.reshape(grid.nx, grid.ny)


def ch_step(grid: Grid, state: CHState, u: MACVector | None, cfg: CHStepConfig,
            kind) -> tuple[CHState, CHStepStats]:
    """Advance (phi, mu) by one implicit step; u is the lagged drift velocity."""
    if isinstance(kind, pot.DoubleObstacle):
        return _ch_step_obstacle(grid, state, u, cfg, kind)
    if state.lam is not None:
        # previous step ended pinned; stay on the constrained path
        return _ch_step_log_pinned(grid, state, u, cfg, kind)
    try:
        return _ch_step_log(grid, state, u, cfg, kind)
    except NewtonDiverged:
        # for small theta the explicit concave forcing saturates cells beyond
        # the representable band; resolve the step with the clamp treated as
        # a hard bound carrying a multiplier
        return _ch_step_log_pinned(grid, state, u, cfg, kind)


def _ch_step_log(grid, state, u, cfg, kind):
    theta, theta0 = kind.theta, kind.theta0
    a = 1.0 / cfg.dt
    phin = state.phi
    adv = advect_scalar(grid, u, phin) if u is not None else np.zeros_like(phin)

    def mu_of(phi):
        return (cfg.alpha * a * (phi - phin) - laplacian_neumann(grid, phi)
                + pot.F_prime(phi, theta) - theta0 * phin)

    def residual(phi):
        return a * (phi - phin) + adv - laplacian_neumann(grid, mu_of(phi))

    phi = pot.clamp_phase(phin)
    r = residual(phi)
    rnorm = cell_norm(grid, r)
    tol = cfg.newton_tol * a * max(1.0, cell_norm(grid, phin))
    iters = 0
    while rnorm > tol:
        if iters >= cfg.newton_max:
            raise NewtonDiverged(
                f"CH Newton stalled at residual {rnorm:.3e} (tol {tol:.3e})",
                iterate=phi, residual=rnorm)
        D = pot.F_second(phi, theta)
        delta = _solve_newton_update(grid, a, cfg.alpha, D, -r, cfg)
        # damped update with clamping safeguard: the exact solution has |phi| < 1
        s = pot.fraction_to_boundary(phi, delta)
        while True:
            cand = pot.clamp_phase(phi + s * delta)
            rc = residual(cand)
            rcnorm = cell_norm(grid, rc)
            if rcnorm <= (1.0 - 1e-4 * s) * rnorm or s < 2.0**-30:
                break
            s *= 0.5
        if rcnorm >= rnorm and s < 2.0**-30:
            raise NewtonDiverged(
                f"CH Newton line search failed at residual {rnorm:.3e}",
                iterate=phi, residual=rnorm)
        phi, r, rnorm = cand, rc, rcnorm
        iters += 1
        if float(np.abs(phi).max()) >= pot.PHI_CLIP:
            raise NewtonDiverged(
                "CH iterate saturated at the admissible bound",
                iterate=phi, residual=rnorm)

    mu = mu_of(phi)
    stats = _budget_stats(grid, phin, phi, mu, adv, cfg, theta0, f_theta=theta)
    stats.newton_iters = iters
    stats.residual = rnorm
    return CHState(t=state.t + cfg.dt, phi=phi, mu=mu), stats


def _budget_stats(grid, phin, phi, mu, adv, cfg, theta0, f_theta=None):
    """Splitting remainder of the discrete free-energy identity.

    E(phi+) - E(phi) + dt*d_chem + num_diss + dt*transfer = 0 up to the
    Newton/linear tolerances.
    """
    delta = phi - phin
    gd = gradient_to_faces(grid, delta)
    s = 0.5 * face_inner(grid, gd, gd)
    s += 0.5 * theta0 * cell_inner(grid, delta, delta)
    s += (cfg.alpha / cfg.dt) * cell_inner(grid, delta, delta)
    if f_theta is not None:
        conv_rem = (cell_inner(grid, delta, pot.F_prime(phi, f_theta))
                    - float(np.sum(pot.F_value(phi, f_theta)
                                   - pot.F_value(phin, f_theta))) * grid.cell_volume)
        s += conv_rem
    gm = gradient_to_faces(grid, mu)
    stats = CHStepStats()
    stats.num_diss = s
    stats.transfer = cell_inner(grid, adv, mu)
    stats.d_chem = face_inner(grid, gm, gm)
    return stats


def _ch_step_log_pinned(grid, state, u, cfg, kind):
    """Log-potential step with the clamp band as a hard bound.

    Semismooth Newton on the balance equation plus the complementarity
    condition for a multiplier supported where |phi| sits at the bound;
    cells the concave forcing would push past the representable band stay
    pinned there instead of stalling the unconstrained iteration.
    """
    theta, theta0 = kind.theta, kind.theta0
    a = 1.0 / cfg.dt
    n = grid.nx * grid.ny
    b = pot.PHI_CLIP
    phin = state.phi
    adv = advect_scalar(grid, u, phin) if u is not None else np.zeros_like(phin)

    lap = neumann_laplacian_matrix(grid)
    A_phi = (a * sp.identity(n) - cfg.alpha * a * lap
             + neumann_bilaplacian_matrix(grid)).tocsr()
    pn = phin.ravel()
    advf = adv.ravel()

    def balance(pe, lam):
        mu = (cfg.alpha * a * (pe - pn) - lap @ pe + pot.F_prime(pe, theta)
              + lam - theta0 * pn)
        return a * (pe - pn) + advf - lap @ mu, mu

    # raw iterate may leave the band (that is the activation signal for the
    # set update); the singular terms are evaluated at the clipped value
    p = pn.copy()
    lam = state.lam.ravel().copy() if state.lam is not None else np.zeros(n)
    c = cfg.pdas_c
    tol = cfg.newton_tol * a * max(1.0, cell_norm(grid, phin))
    vol = grid.cell_volume
    lap_scale = 4.0 / grid.hx**2 + 4.0 / grid.hy**2
    eps = np.finfo(float).eps
    prev_sets = None
    converged = False
    for it in range(cfg.newton_max + cfg.pdas_max):
        pe = np.clip(p, -b, b)
        g_res, mu = balance(pe, lam)
        gnorm = float(np.sqrt(g_res @ g_res * vol))
        # rounding floor of the residual evaluation: the log term carries an
        # absolute error ~ theta*eps/(1-phi^2) which the Laplacian amplifies
        noise = lap_scale * float(
            np.sqrt(np.sum((theta * eps / (1.0 - pe * pe)) ** 2) * vol))
        act_hi = lam + c * (p - b) > 0.0
        act_lo = lam + c * (p + b) < 0.0
        sets = (act_hi.tobytes(), act_lo.tobytes())
        if gnorm <= max(tol, noise) and sets == prev_sets and np.array_equal(p, pe):
            converged = True
            break
        prev_sets = sets
        inact = ~(act_hi | act_lo)
        # pinned cells get dp forced by the constraint rows; dropping their
        # (huge) F'' entries changes nothing analytically but keeps the
        # sparse factorization well conditioned
        D = pot.F_second(pe, theta)
        D[~inact] = 0.0
        top = sp.hstack([A_phi - lap @ sp.diags(D), -lap])
        bot = sp.hstack([sp.diags((act_hi | act_lo).astype(float)),
                         sp.diags(inact.astype(float))])
        rhs = np.concatenate([
            -g_res,
            np.where(act_hi, b - pe, np.where(act_lo, -b - pe, -lam)),
        ])
        sol = spla.spsolve(sp.vstack([top, bot]).tocsc(), rhs)
        p = pe + sol[:n]
        lam = lam + sol[n:]
    if not converged:
        raise NewtonDiverged(
            f"pinned CH step stalled at residual {gnorm:.3e} (tol {tol:.3e})",
            iterate=p.reshape(grid.nx, grid.ny), residual=gnorm)

    phi2 = p.reshape(grid.nx, grid.ny)
    lam2 = lam.reshape(grid.nx, grid.ny)
    mu2 = mu.reshape(grid.nx, grid.ny)
    stats = _budget_stats(grid, phin, phi2, mu2, adv, cfg, theta0, f_theta=theta)
    stats.num_diss += cell_inner(grid, phi2 - phin, lam2)
    stats.newton_iters = it
    stats.residual = gnorm
    new = CHState(t=state.t + cfg.dt, phi=phi2, mu=mu2,
                  lam=lam2 if (np.abs(lam2) > 0).any() else None)
    return new, stats


def _ch_step_obstacle(grid, state, u, cfg, kind):
    theta0 = kind.theta0
    a = 1.0 / cfg.dt
    n = grid.nx * grid.ny
    phin = state.phi
    adv = advect_scalar(grid, u, phin) if u is not None else np.zeros_like(phin)

    lap = neumann_laplacian_matrix(grid)
    bilap = neumann_bilaplacian_matrix(grid)
    A_phi = (sp.identity(n) * a - cfg.alpha * a * lap + bilap).tocsr()
    phin_f = phin.ravel()
    rhs_a = (a * phin_f - adv.ravel()
             - cfg.alpha * a * (lap @ phin_f) - theta0 * (lap @ phin_f))

    phi = np.clip(phin_f.copy(), -1.0, 1.0)
    lam = state.lam.ravel().copy() if state.lam is not None else np.zeros(n)
    c = cfg.pdas_c
    prev_sets = None
    for _ in range(cfg.pdas_max):
        act_hi = lam + c * (phi - 1.0) > 0.0
        act_lo = lam + c * (phi + 1.0) < 0.0
        sets = (act_hi.tobytes(), act_lo.tobytes())
        if sets == prev_sets:
            break
        prev_sets = sets
        inact = ~(act_hi | act_lo)
        # rows: N balance equations, then N constraint equations
        b_phi = sp.diags((act_hi | act_lo).astype(float))
        b_lam = sp.diags(inact.astype(float))
        top = sp.hstack([A_phi, -lap])
        bot = sp.hstack([b_phi, b_lam])
        rhs_b = np.where(act_hi, 1.0, np.where(act_lo, -1.0, 0.0))
        sol = spla.spsolve(sp.vstack([top, bot]).tocsc(),
                           np.concatenate([rhs_a, rhs_b]))
        phi, lam = sol[:n], sol[n:]
    else:
        raise ActiveSetCycling(
            f"active set did not settle in {cfg.pdas_max} iterations")

    # constraint rows fix active cells at +-1 exactly; clipping removes the
    # sparse solver's rounding (~1e-12) so feasibility holds literally
    phi2 = np.clip(phi.reshape(grid.nx, grid.ny), -1.0, 1.0)
    lam2 = lam.reshape(grid.nx, grid.ny)
    mu = (cfg.alpha * a * (phi2 - phin) - laplacian_neumann(grid, phi2)
          + lam2 - theta0 * phin)
    stats = _budget_stats(grid, phin, phi2, mu, adv, cfg, theta0, f_theta=None)
    # the indicator term contributes delta*lam >= 0 on feasible states
    stats.num_diss += cell_inner(grid, phi2 - phin, lam2)
    new = CHState(t=state.t + cfg.dt, phi=phi2, mu=mu, lam=lam2)
    return new, stats


def vanishing_viscosity_suite(grid: Grid, phi0: np.ndarray, u: MACVector | None,
                              alphas, cfg: CHStepConfig, kind, t_end: float):
    """Run the viscous-regularized stepper to t_end for each alpha value."""
    finals = []
    n_steps = int(round(t_end / cfg.dt))
    for alpha in alphas:
        c = CHStepConfig(dt=cfg.dt, alpha=alpha, newton_tol=cfg.newton_tol,
                         newton_max=cfg.newton_max, linear_tol=cfg.linear_tol,
                         linear_max=cfg.linear_max, pdas_c=cfg.pdas_c,
                         pdas_max=cfg.pdas_max)
        st = CHState(t=0.0, phi=pot.clamp_phase(phi0.copy()),
                     mu=np.zeros_like(phi0))
        for _ in range(n_steps):
            st, _ = ch_step(grid, st, u, c, kind)
        finals.append(st)
    return finals


@dataclass
class MonitorReport:
    """A-priori-estimate monitors for a completed run."""

    sup_grad_mu: float
    int_grad_dphit: float
    int_grad_mu_h1: float
    int_grad_u: float
    finite: bool
    grad_mu_series: list = field(default_factory=list)


def estimate_monitor(grid: Grid, history: list[CHState], dt: float,
                     u_history: list[MACVector | None] | None = None) -> MonitorReport:
    """Report sup_t |grad mu|, int |grad d_t phi|^2 dt and the H1-flux integral."""
    grad_mu = []
    grad_mu_h1_sq = []
    int_grad_dphit = 0.0
    for idx, st in enumerate(history):
        g = gradient_to_faces(grid, st.mu)
        gm = np.sqrt(face_inner(grid, g, g))
        grad_mu.append(gm)
        lap_mu = laplacian_neumann(grid, st.mu)
        grad_mu_h1_sq.append(gm**2 + cell_inner(grid, lap_mu, lap_mu))
        if idx > 0:
            dphit = (st.phi - history[idx - 1].phi) / dt
            gd = gradient_to_faces(grid, dphit)
            int_grad_dphit += dt * face_inner(grid, gd, gd)
    int_grad_u = 0.0
    if u_history is not None:
        for u in u_history:
            if u is None:
                continue
            int_grad_u += dt * _grad_u_sq(grid, u)
    values = np.array(grad_mu + [int_grad_dphit, int_grad_u] + grad_mu_h1_sq)
    return MonitorReport(
        sup_grad_mu=float(np.max(grad_mu)),
        int_grad_dphit=int_grad_dphit,
        int_grad_mu_h1=float(np.sum(grad_mu_h1_sq)) * dt,
        int_grad_u=int_grad_u,
        finite=bool(np.all(np.isfinite(values))),
        grad_mu_series=grad_mu,
    )


def _grad_u_sq(grid: Grid, u: MACVector) -> float:
    gxx = np.diff(u.ux, axis=0) / grid.hx
    gyy = np.diff(u.uy, axis=1) / grid.hy
    gxy = np.diff(u.ux, axis=1) / grid.hy if grid.ny > 1 else np.zeros((0,))
    gyx = np.diff(u.uy, axis=0) / grid.hx
    return (float(np.sum(gxx**2)) + float(np.sum(gyy**2))
            + float(np.sum(gxy**2)) + float(np.sum(gyx**2))) * grid.cell_volume
