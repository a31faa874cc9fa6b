"""Desk-scale simulator for a two-phase incompressible flow model with a
Cahn-Hilliard phase field, unmatched densities and a singular mixing
potential, on a staggered finite-difference grid."""

from .cahn_hilliard import CHState, CHStepConfig, ch_step, free_energy
from .coupled import InitialCondition, RunConfig, RunResult, State, run
from .diagnostics import DiagnosticsRecord, record, separation_time, \
    weak_strong_distance
from .errors import (ActiveSetCycling, CFLViolation, ConfigError, GridMismatch,
                     LinearSolveFailed, NewtonDiverged, NotSeparated, NschError)
from .grid import Grid, MACVector
from .momentum import FlowState, ModelParams, momentum_step
from .obstacle_limit import regularize_initial, theta_limit_study
from .potential import DoubleObstacle, FloryHuggins, binodal_root
from .stationary import StationarySolution, stationary_solve

__all__ = [
    "ActiveSetCycling", "CFLViolation", "CHState", "CHStepConfig",
    "ConfigError", "DiagnosticsRecord", "DoubleObstacle", "FloryHuggins",
    "FlowState", "Grid", "GridMismatch", "InitialCondition",
    "LinearSolveFailed", "MACVector", "ModelParams", "NewtonDiverged",
    "NotSeparated", "NschError", "RunConfig", "RunResult", "State",
    "StationarySolution", "binodal_root", "ch_step", "free_energy",
    "momentum_step", "record", "regularize_initial", "run",
    "separation_time", "stationary_solve", "theta_limit_study",
    "weak_strong_distance",
]
