"""Config parsing, CSV diagnostics writer and binary snapshot format.

Config files are line-oriented ``section.key = value`` text; unknown keys
are rejected by name.  Snapshots are little-endian binary with the magic
``NSCH0001`` and round-trip bit-exactly.
"""

import os
import struct
from pathlib import Path

import numpy as np

from .coupled import InitialCondition, RunConfig, State
from .diagnostics import CSV_HEADER, DiagnosticsRecord
from .errors import ConfigError
from .grid import Grid, MACVector
from .momentum import ModelParams
from . import potential as pot

SNAPSHOT_MAGIC = b"NSCH0001"

_SCHEMA: dict[str, tuple] = {
    # key: (parser, required, default)
    "domain.Lx": (float, True, None),
    "domain.Ly": (float, True, None),
    "grid.nx": (int, True, None),
    "grid.ny": (int, True, None),
    "params.rho1": (float, True, None),
    "params.rho2": (float, True, None),
    "params.nu1": (float, True, None),
    "params.nu2": (float, True, None),
    "params.theta": (float, False, 1.0),
    "params.theta0": (float, True, None),
    "potential.kind": (str, True, None),
    "time.dt": (float, True, None),
    "time.t_end": (float, True, None),
    "output.every": (int, False, 100),
    "output.dir": (str, False, "out"),
    "init.kind": (str, False, "constant"),
    "init.mean": (float, False, 0.0),
    "init.amplitude": (float, False, 0.0),
    "init.seed": (int, False, 0),
    "init.modes": (int, False, 4),
    "init.orientation": (str, False, "x"),
    "init.width": (float, False, 0.2),
    "init.center_x": (float, False, 0.5),
    "init.center_y": (float, False, 0.5),
    "init.radius": (float, False, 0.25),
    "init.u0": (str, False, "zero"),
    "init.u0_magnitude": (float, False, 0.0),
    "solver.newton_tol": (float, False, 1e-10),
    "solver.linear_tol": (float, False, 1e-10),
    "solver.alpha": (float, False, 0.0),
    "solver.strict_energy": (str, False, "false"),
}


def parse_config(path) -> dict:
    """Parse and validate a key=value config file into a typed dict."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        parser = _SCHEMA[key][0]
        try:
            values[key] = parser(val)
        except ValueError as err:
            raise ConfigError(f"line {lineno}: bad value for {key}: {err}") from err
    for key, (_, required, default) in _SCHEMA.items():
        if key not in values:
            if required:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    _validate(values)
    return values


def _validate(v: dict) -> None:
    for key in ("domain.Lx", "domain.Ly", "time.dt", "params.rho1",
                "params.rho2", "params.nu1", "params.nu2", "params.theta",
                "params.theta0"):
        if v[key] <= 0:
            raise ConfigError(f"{key} must be positive, got {v[key]}")
    if v["grid.nx"] < 4 or v["grid.ny"] < 1:
        raise ConfigError("grid.nx must be >= 4 and grid.ny >= 1")
    if v["init.modes"] < 1:
        raise ConfigError("init.modes must be >= 1")
    if v["potential.kind"] not in ("flory_huggins", "double_obstacle"):
        raise ConfigError(f"unknown potential.kind {v['potential.kind']!r}")
    if v["solver.strict_energy"].lower() not in ("true", "false"):
        raise ConfigError("solver.strict_energy must be true or false")


def build_problem(v: dict) -> tuple[Grid, ModelParams, RunConfig]:
    grid = Grid(nx=v["grid.nx"], ny=v["grid.ny"], Lx=v["domain.Lx"],
                Ly=v["domain.Ly"])
    if v["potential.kind"] == "flory_huggins":
        kind = pot.FloryHuggins(theta=v["params.theta"], theta0=v["params.theta0"])
    else:
        kind = pot.DoubleObstacle(theta0=v["params.theta0"])
    params = ModelParams(rho1=v["params.rho1"], rho2=v["params.rho2"],
                         nu1=v["params.nu1"], nu2=v["params.nu2"],
                         potential=kind)
    init = InitialCondition(
        kind=v["init.kind"], mean=v["init.mean"], amplitude=v["init.amplitude"],
        seed=v["init.seed"], modes=v["init.modes"],
        orientation=v["init.orientation"],
        width=v["init.width"], center=(v["init.center_x"], v["init.center_y"]),
        radius=v["init.radius"], u0=v["init.u0"],
        u0_magnitude=v["init.u0_magnitude"])
    cfg = RunConfig(dt=v["time.dt"], t_end=v["time.t_end"],
                    output_every=v["output.every"], init=init,
                    newton_tol=v["solver.newton_tol"],
                    linear_tol=v["solver.linear_tol"],
                    alpha=v["solver.alpha"],
                    strict_energy=v["solver.strict_energy"].lower() == "true")
    return grid, params, cfg


def output_dir(v: dict) -> Path:
    return Path(os.environ.get("NSCH_OUTPUT_DIR", v["output.dir"]))


def write_diagnostics_csv(path, records: list[DiagnosticsRecord]) -> None:
    lines = [CSV_HEADER] + [r.row() for r in records]
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    lines = Path(path).read_text().strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header in {path}")
    out = []
    for line in lines[1:]:
        vals = [float(x) for x in line.split(",")]
        out.append(DiagnosticsRecord(*vals))
    return out


def write_snapshot(path, grid: Grid, state: State) -> None:
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<IId", grid.nx, grid.ny, state.t))
        for arr in (state.phi, state.mu, state.p, state.u.ux, state.u.uy):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[int, int, float, dict]:
    """Return (nx, ny, t, arrays) with arrays keyed phi/mu/p/ux/uy."""
    data = Path(path).read_bytes()
    if data[:8] != SNAPSHOT_MAGIC:
        raise ConfigError(f"{path}: bad snapshot magic {data[:8]!r}")
    nx, ny, t = struct.unpack_from("<IId", data, 8)
    sizes = {"phi": nx * ny, "mu": nx * ny, "p": nx * ny,
             "ux": (nx + 1) * ny, "uy": nx * (ny + 1)}
    expected = 8 + 16 + 8 * sum(sizes.values())
    if len(data) != expected:
        raise ConfigError(f"{path}: snapshot length {len(data)} != {expected}")
    arrays = {}
    off = 24
    for name, count in sizes.items():
        arrays[name] = np.frombuffer(data, dtype="<f8", count=count,
                                     offset=off).copy()
        off += 8 * count
    arrays["phi"] = arrays["phi"].reshape(nx, ny)
    arrays["mu"] = arrays["mu"].reshape(nx, ny)
    arrays["p"] = arrays["p"].reshape(nx, ny)
    arrays["ux"] = arrays["ux"].reshape(nx + 1, ny)
    arrays["uy"] = arrays["uy"].reshape(nx, ny + 1)
    return nx, ny, t, arrays


def snapshot_to_state(grid: Grid, nx: int, ny: int, t: float,
                      arrays: dict) -> State:
    if (nx, ny) != (grid.nx, grid.ny):
        raise ConfigError(
            f"snapshot grid {nx}x{ny} does not match config {grid.nx}x{grid.ny}")
    u = MACVector(grid, arrays["ux"], arrays["uy"])
    return State(t=t, u=u, p=arrays["p"], phi=arrays["phi"], mu=arrays["mu"])
