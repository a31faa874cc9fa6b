"""Homogeneous free energy: logarithmic (Flory-Huggins) and double-obstacle.

The logarithmic potential is Psi(s) = F(s) - (theta0/2) s^2 with the convex
part F(s) = (theta/2)[(1+s)log(1+s) + (1-s)log(1-s)].  F blows up at s = +-1,
which is what keeps the phase field strictly inside (-1, 1).  The
double-obstacle potential replaces the log term by the indicator of [-1, 1];
its subdifferential is handled as a complementarity system with a Lagrange
multiplier lambda.
"""

from dataclasses import dataclass

import numpy as np

# Clamp for Newton safeguards: iterates never touch +-1.
PHI_CLIP = 1.0 - 1e-12


@dataclass(frozen=True)
class FloryHuggins:
    theta: float
    theta0: float

    def __post_init__(self):
        if self.theta <= 0 or self.theta0 <= 0:
            raise ValueError("theta and theta0 must be positive")

    @property
    def spinodal(self) -> bool:
        """True when the homogeneous state phi=0 is unstable."""
        return self.theta0 > self.theta


@dataclass(frozen=True)
class DoubleObstacle:
    theta0: float

    def __post_init__(self):
        if self.theta0 <= 0:
            raise ValueError("theta0 must be positive")


PotentialKind = FloryHuggins | DoubleObstacle


def _check_domain(s) -> None:
    if np.any(np.abs(s) >= 1.0):
        raise ValueError("argument of the logarithmic term must satisfy |s| < 1")


def F_value(s, theta: float):
    """Convex log part F(s) = (theta/2)[(1+s)log(1+s) + (1-s)log(1-s)]."""
    _check_domain(s)
    s = np.asarray(s, dtype=float)
    return (theta / 2.0) * ((1.0 + s) * np.log1p(s) + (1.0 - s) * np.log1p(-s))


def F_prime(s, theta: float):
    """F'(s) = (theta/2) log((1+s)/(1-s)) = theta * artanh(s)."""
    _check_domain(s)
    return theta * np.arctanh(np.asarray(s, dtype=float))


def F_second(s, theta: float):
    """F''(s) = theta / (1 - s^2) > 0."""
    _check_domain(s)
    s = np.asarray(s, dtype=float)
    return theta / (1.0 - s * s)


def psi_value(s, kind: FloryHuggins):
    return F_value(s, kind.theta) - 0.5 * kind.theta0 * np.asarray(s, dtype=float) ** 2


def psi_prime(s, kind: FloryHuggins):
    """Psi'(s) = F'(s) - theta0 * s; odd in s."""
    return F_prime(s, kind.theta) - kind.theta0 * np.asarray(s, dtype=float)


def psi_second(s, kind: FloryHuggins):
    return F_second(s, kind.theta) - kind.theta0


def binodal_root(kind: FloryHuggins, tol: float = 1e-13) -> float:
    """Positive root s* of Psi'(s) = 0 on (0, 1), by bisection.

    Exists exactly when theta0 > theta (double-well regime); raises otherwise.
    """
    if not kind.spinodal:
        raise ValueError("Psi' has no positive root unless theta0 > theta")
    lo, hi = 1e-14, 1.0 - 1e-14
    # Psi'(lo) < 0 just right of 0 in the double-well regime; Psi'(hi) -> +inf.
    if psi_prime(lo, kind) >= 0 or psi_prime(hi, kind) <= 0:
        raise ValueError("bisection bracket failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if psi_prime(mid, kind) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clamp_phase(s):
    """Clamp values into the open interval used by the Newton safeguard."""
    return np.clip(s, -PHI_CLIP, PHI_CLIP)


def fraction_to_boundary(phi, delta, keep: float = 0.05) -> float:
    """Largest step s <= 1 such that phi + s*delta keeps at least a `keep`
    fraction of each cell's current distance to the bounds +-1.

    Full Newton steps on the singular potential routinely overshoot the
    bounds; capping the step this way lets the distance shrink geometrically
    instead of stalling against the clamp.
    """
    s = 1.0
    pos = delta > 0
    if np.any(pos):
        room = (1.0 - keep) * (1.0 - phi[pos])
        s = min(s, float(np.min(room / delta[pos])))
    neg = delta < 0
    if np.any(neg):
        room = -(1.0 - keep) * (1.0 + phi[neg])
        s = min(s, float(np.min(room / delta[neg])))
    return s


def obstacle_complementarity_residual(phi, lam, c: float):
    """Pointwise residual of lambda in dI_[-1,1](phi), zero iff the
    complementarity conditions hold.

    r = lambda - max(0, lambda + c(phi-1)) - min(0, lambda + c(phi+1))
    """
    if c <= 0:
        raise ValueError("c must be positive")
    phi = np.asarray(phi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return lam - np.maximum(0.0, lam + c * (phi - 1.0)) \
        - np.minimum(0.0, lam + c * (phi + 1.0))
