"""Command-line driver: run, stationary, obstacle-limit, weakstrong, check.

Exit codes: 0 success, 2 configuration error, 3 solver/IO failure,
4 self-test failure.
"""

import argparse
import sys

import numpy as np

from . import coupled, io, potential as pot
from .cahn_hilliard import CHStepConfig
from .diagnostics import weak_strong_distance
from .errors import ConfigError, NschError
from .obstacle_limit import theta_limit_study
from .selftest import run_selftests
from .stationary import stationary_solve


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsch")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="time-step the coupled system")
    run_p.add_argument("config")

    st_p = sub.add_parser("stationary", help="solve the stationary system")
    st_p.add_argument("config")
    st_p.add_argument("--snapshot", default=None,
                      help="take the initial guess from a snapshot file")

    ob_p = sub.add_parser("obstacle-limit",
                          help="sharp-potential limit study theta = 1/k")
    ob_p.add_argument("config")
    ob_p.add_argument("--k", default="4,16,64,256",
                      help="comma-separated strictly increasing k values")

    ws_p = sub.add_parser("weakstrong",
                          help="two-run perturbation contractivity experiment")
    ws_p.add_argument("config")
    ws_p.add_argument("--eps", type=float, default=1e-2,
                      help="size of the larger initial perturbation")

    sub.add_parser("check", help="operator self-tests")
    return p


def _cmd_run(args) -> int:
    values = io.parse_config(args.config)
    grid, params, cfg = io.build_problem(values)
    out = io.output_dir(values)
    out.mkdir(parents=True, exist_ok=True)
    result = coupled.run(grid, params, cfg)
    io.write_diagnostics_csv(out / "diagnostics.csv", result.records)
    for step, state in result.snapshots:
        io.write_snapshot(out / f"snapshot_{step:06d}.bin", grid, state)
    final = result.records[-1]
    print(f"run finished: t = {final.t:g}, mass = {final.mass:.12g}, "
          f"E_total = {final.E_total:.6g}, u_L2 = {final.u_L2:.3e}")
    print(f"wrote {len(result.records)} diagnostics rows and "
          f"{len(result.snapshots)} snapshots to {out}")
    return 0


def _cmd_stationary(args) -> int:
    values = io.parse_config(args.config)
    grid, params, cfg = io.build_problem(values)
    out = io.output_dir(values)
    out.mkdir(parents=True, exist_ok=True)
    if args.snapshot is not None:
        state = io.snapshot_to_state(grid, *io.read_snapshot(args.snapshot))
        guess = state.phi
    else:
        guess = cfg.init.build_phi(grid)
    sol = stationary_solve(grid, guess, float(guess.mean()),
                           params.potential, tol=cfg.newton_tol)
    mu = np.full_like(sol.phi_inf, sol.mu_inf)
    final = coupled.State(t=0.0, u=coupled.MACVector.zeros(grid),
                          p=grid.zeros(), phi=sol.phi_inf, mu=mu)
    io.write_snapshot(out / "stationary.bin", grid, final)
    print(f"stationary solve: residual = {sol.residual:.3e}, "
          f"mu_inf = {sol.mu_inf:.12g}, separation = {sol.separation:.6g}, "
          f"newton_iters = {sol.newton_iters}")
    return 0


def _cmd_obstacle_limit(args) -> int:
    values = io.parse_config(args.config)
    grid, params, cfg = io.build_problem(values)
    out = io.output_dir(values)
    out.mkdir(parents=True, exist_ok=True)
    try:
        k_list = [int(s) for s in args.k.split(",") if s.strip()]
    except ValueError as err:
        raise ConfigError(f"bad --k list {args.k!r}: {err}") from err
    if not k_list or any(b <= a for a, b in zip(k_list, k_list[1:])):
        raise ConfigError("--k must be a strictly increasing integer list")
    phi0 = cfg.init.build_phi(grid)
    step_cfg = CHStepConfig(dt=cfg.dt, newton_tol=cfg.newton_tol,
                            linear_tol=cfg.linear_tol)
    theta0 = params.potential.theta0
    report = theta_limit_study(grid, phi0, theta0, k_list, step_cfg, cfg.t_end)
    lines = ["k,theta,distance"]
    for k, th, d in zip(report.k_list, report.thetas, report.distances):
        lines.append(f"{k},{th:.17g},{d:.17g}")
    (out / "theta_limit.csv").write_text("\n".join(lines) + "\n")
    print(f"theta limit: distances {['%.3e' % d for d in report.distances]}, "
          f"monotone = {report.monotone}")
    return 0


def _cmd_weakstrong(args) -> int:
    values = io.parse_config(args.config)
    grid, params, cfg = io.build_problem(values)
    out = io.output_dir(values)
    out.mkdir(parents=True, exist_ok=True)
    if args.eps <= 0:
        raise ConfigError("--eps must be positive")
    base = coupled.run(grid, params, cfg)
    hist_base = [s for _, s in base.snapshots]
    rows = None
    finals = []
    for eps in (args.eps, 0.5 * args.eps):
        pert = coupled.run(grid, params, cfg,
                           initial=coupled.perturbed_initial(grid, params, cfg, eps))
        dist = weak_strong_distance(grid, hist_base,
                                    [s for _, s in pert.snapshots], params)
        if rows is None:
            rows = [[d.t, d.value] for d in dist]
        else:
            for row, d in zip(rows, dist):
                row.append(d.value)
        finals.append(dist[-1].value)
    lines = ["t,D_eps,D_half"]
    lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
    (out / "weakstrong.csv").write_text("\n".join(lines) + "\n")
    ratio = finals[0] / finals[1] if finals[1] > 0 else float("inf")
    print(f"weak-strong distances at t = {cfg.t_end:g}: "
          f"D_eps = {finals[0]:.6e}, D_half = {finals[1]:.6e}, "
          f"ratio = {ratio:.3f}")
    return 0


def _cmd_check() -> int:
    failures = 0
    for name, ok, detail in run_selftests():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 4


def cli(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "stationary":
            return _cmd_stationary(args)
        if args.command == "obstacle-limit":
            return _cmd_obstacle_limit(args)
        if args.command == "weakstrong":
            return _cmd_weakstrong(args)
        return _cmd_check()
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except NschError as err:
        print(f"solver error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli())
