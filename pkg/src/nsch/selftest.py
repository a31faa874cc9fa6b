"""Operator self-tests backing the `check` CLI subcommand.

Algebraic identities are checked at rounding level; the differential
operators additionally undergo a manufactured-solution refinement study
whose observed order must be at least 1.9.
"""

import numpy as np

from .grid import (Grid, MACVector, advect_scalar, cell_inner, divergence_mac,
                   face_inner, gradient_to_faces, laplacian_neumann)


def _observed_orders(errors):
    return [float(np.log2(a / b)) for a, b in zip(errors, errors[1:])]


def run_selftests() -> list[tuple[str, bool, str]]:
    """Return (name, passed, detail) for every operator check."""
    results = []
    rng = np.random.default_rng(20240817)

    g = Grid(16, 16, 1.0, 1.0)
    f = rng.standard_normal((16, 16))
    h = rng.standard_normal((16, 16))
    v = MACVector(g, rng.standard_normal((17, 16)),
                  rng.standard_normal((16, 17))).zero_boundary_faces()

    sbp = abs(face_inner(g, gradient_to_faces(g, f), v)
              + cell_inner(g, f, divergence_mac(g, v)))
    results.append(("summation_by_parts", sbp <= 1e-13, f"|defect| = {sbp:.3e}"))

    sym = abs(cell_inner(g, laplacian_neumann(g, f), h)
              - cell_inner(g, f, laplacian_neumann(g, h)))
    results.append(("laplacian_symmetry", sym <= 1e-12, f"|defect| = {sym:.3e}"))

    mean_lap = abs(float(laplacian_neumann(g, f).mean()))
    mean_adv = abs(float(advect_scalar(g, v, f).mean()))
    ok = mean_lap <= 1e-12 and mean_adv <= 1e-12
    results.append(("mean_preservation", ok,
                    f"lap {mean_lap:.3e}, adv {mean_adv:.3e}"))

    # manufactured solutions on refined grids
    lap_err, grad_err, adv_err = [], [], []
    for n in (32, 64, 128):
        gg = Grid(n, n, 1.0, 1.0)
        x, y = gg.cell_centers()
        f = np.cos(np.pi * x) * np.cos(np.pi * y)
        exact = -2.0 * np.pi**2 * f
        lap_err.append(float(np.abs(laplacian_neumann(gg, f) - exact).max()))

        gx_exact = -np.pi * np.sin(np.pi * (np.arange(1, n) / n))[:, None] \
            * np.cos(np.pi * y[0][None, :])
        gf = gradient_to_faces(gg, f)
        grad_err.append(float(np.abs(gf.ux[1:-1, :] - gx_exact).max()))

        # stream-function velocity (exactly discretely divergence-free)
        xn = np.linspace(0.0, 1.0, n + 1)
        X, Y = np.meshgrid(xn, xn, indexing="ij")
        psi = np.sin(np.pi * X) ** 2 * np.sin(np.pi * Y) ** 2
        u = MACVector(gg, (psi[:, 1:] - psi[:, :-1]) / gg.hy,
                      -(psi[1:, :] - psi[:-1, :]) / gg.hx)
        ux_c = np.pi * np.sin(np.pi * x) ** 2 * np.sin(2 * np.pi * y)
        uy_c = -np.pi * np.sin(2 * np.pi * x) * np.sin(np.pi * y) ** 2
        fx = -np.pi * np.sin(np.pi * x) * np.cos(np.pi * y)
        fy = -np.pi * np.cos(np.pi * x) * np.sin(np.pi * y)
        exact_adv = ux_c * fx + uy_c * fy
        adv_err.append(float(np.abs(advect_scalar(gg, u, f) - exact_adv).max()))

    for name, errs in (("laplacian_order", lap_err),
                       ("gradient_order", grad_err),
                       ("advection_order", adv_err)):
        orders = _observed_orders(errs)
        ok = all(o >= 1.9 for o in orders)
        results.append((name, ok,
                        "orders " + ", ".join(f"{o:.2f}" for o in orders)))
    return results
