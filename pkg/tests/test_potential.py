"""Potential derivatives, binodal root, and complementarity residual."""

import numpy as np
import pytest

from nsch import potential as pot


FH = pot.FloryHuggins(theta=1.0, theta0=2.0)


def test_f_prime_closed_form():
    # theta * artanh(tanh(x)) = theta * x
    assert pot.F_prime(np.tanh(0.5), 2.0) == pytest.approx(1.0, abs=1e-12)
    assert pot.F_prime(0.0, 3.0) == 0.0


def test_oddness_and_evenness():
    s = np.linspace(-0.95, 0.95, 41)
    assert np.allclose(pot.F_prime(s, 1.3), -pot.F_prime(-s, 1.3))
    assert np.allclose(pot.psi_prime(s, FH), -pot.psi_prime(-s, FH))
    assert np.allclose(pot.F_value(s, 1.3), pot.F_value(-s, 1.3))
    assert np.allclose(pot.F_second(s, 1.3), pot.F_second(-s, 1.3))


def test_derivatives_match_finite_differences():
    s = np.linspace(-0.9, 0.9, 19)
    h = 1e-6
    fd1 = (pot.F_value(s + h, 1.7) - pot.F_value(s - h, 1.7)) / (2 * h)
    assert np.abs(fd1 - pot.F_prime(s, 1.7)).max() < 1e-7
    fd2 = (pot.F_prime(s + h, 1.7) - pot.F_prime(s - h, 1.7)) / (2 * h)
    assert np.abs(fd2 - pot.F_second(s, 1.7)).max() < 1e-4
    fdp = (pot.psi_value(s + h, FH) - pot.psi_value(s - h, FH)) / (2 * h)
    assert np.abs(fdp - pot.psi_prime(s, FH)).max() < 1e-7


def test_f_convex_everywhere():
    s = np.linspace(-0.999, 0.999, 201)
    assert np.all(pot.F_second(s, 0.1) > 0)


def test_domain_guard():
    with pytest.raises(ValueError):
        pot.F_prime(1.0, 1.0)
    with pytest.raises(ValueError):
        pot.F_value(np.array([0.0, -1.0]), 1.0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        pot.FloryHuggins(theta=-1.0, theta0=2.0)
    with pytest.raises(ValueError):
        pot.FloryHuggins(theta=1.0, theta0=0.0)
    with pytest.raises(ValueError):
        pot.DoubleObstacle(theta0=0.0)


def test_spinodal_flag():
    assert pot.FloryHuggins(theta=1.0, theta0=2.0).spinodal
    assert not pot.FloryHuggins(theta=2.0, theta0=1.0).spinodal


def test_binodal_root_value():
    # root of artanh(s) = 2 s for theta=1, theta0=2
    s = pot.binodal_root(FH)
    assert np.arctanh(s) == pytest.approx(2.0 * s, abs=1e-12)
    assert s == pytest.approx(0.957504, abs=1e-5)
    with pytest.raises(ValueError):
        pot.binodal_root(pot.FloryHuggins(theta=2.0, theta0=1.0))


def test_binodal_root_deep_quench():
    # theta = 1/k, theta0 = 2: 1 - s* = 2 exp(-4k) + o(..) -> near-saturation
    s = pot.binodal_root(pot.FloryHuggins(theta=0.25, theta0=2.0))
    assert 1.0 - s == pytest.approx(2.0 * np.exp(-16.0), rel=1e-3)


def test_clamp_phase():
    out = pot.clamp_phase(np.array([-5.0, 0.3, 5.0]))
    assert out[0] == -pot.PHI_CLIP and out[2] == pot.PHI_CLIP and out[1] == 0.3


def test_fraction_to_boundary():
    phi = np.array([0.9, -0.9, 0.0])
    # step that would cross +1 at the first cell is cut back
    s = pot.fraction_to_boundary(phi, np.array([1.0, 0.0, 0.0]))
    assert s == pytest.approx(0.95 * 0.1)
    s = pot.fraction_to_boundary(phi, np.array([0.0, -1.0, 0.0]))
    assert s == pytest.approx(0.95 * 0.1)
    # small steps are taken in full
    assert pot.fraction_to_boundary(phi, np.array([0.01, -0.01, 0.5])) == 1.0
    # after the capped step every cell is still strictly inside
    d = np.array([4.0, -3.0, 2.0])
    s = pot.fraction_to_boundary(phi, d)
    assert np.abs(phi + s * d).max() < 1.0


def test_complementarity_residual_cases():
    c = 10.0
    # interior point with lambda = 0: feasible
    assert pot.obstacle_complementarity_residual(0.2, 0.0, c) == 0.0
    # pinned at +1 with nonnegative multiplier: feasible
    assert pot.obstacle_complementarity_residual(1.0, 3.0, c) == 0.0
    # pinned at -1 with nonpositive multiplier: feasible
    assert pot.obstacle_complementarity_residual(-1.0, -2.0, c) == 0.0
    # interior point with nonzero multiplier: violation
    assert pot.obstacle_complementarity_residual(0.0, 1.0, c) != 0.0
    # wrong multiplier sign at the bound: violation
    assert pot.obstacle_complementarity_residual(1.0, -1.0, c) != 0.0
    with pytest.raises(ValueError):
        pot.obstacle_complementarity_residual(0.0, 0.0, 0.0)
