"""Analytic reference solutions used by the benchmark harness and tests."""

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .element import gauss2


def rolling_oracle(M, EI, L, s):
    """Centerline of a straight cantilever under a pure end moment.

    Constant curvature kappa = M/EI bends the rod into a circle of radius
    EI/M through the origin, tangent to the x axis at s=0.
    """
    if M == 0.0:
        raise ValueError("pure-bending oracle needs a nonzero moment")
    kappa = M / EI
    r = 1.0 / kappa
    return np.array([r * np.sin(kappa * s), r * (1.0 - np.cos(kappa * s)), 0.0])


def _elastica_integrals(phi0):
    """(arc-length integral, vertical-deflection integral) for tip slope
    phi0.  The substitution phi = phi0 - xi^2 removes the inverse
    square-root singularity at the tip."""
    xmax = np.sqrt(phi0)

    def core(xi):
        if xi < 1e-8:
            return 2.0 / np.sqrt(2.0 * np.cos(phi0))
        # sin(phi0) - sin(phi0 - xi^2) written without cancellation
        den = 2.0 * np.cos(phi0 - 0.5 * xi * xi) * np.sin(0.5 * xi * xi)
        return 2.0 * xi / np.sqrt(2.0 * den)

    I1, _ = quad(core, 0.0, xmax, limit=200)
    I2, _ = quad(lambda xi: np.sin(phi0 - xi * xi) * core(xi), 0.0, xmax,
                 limit=200)
    return I1, I2


def elastica_tip_angle_residual(phi0, alpha):
    """Transcendental equation linking tip slope and load alpha = PL^2/EI."""
    I1, _ = _elastica_integrals(phi0)
    return I1 - np.sqrt(alpha)


def elastica_oracle(P, EI, L):
    """Tip displacement (horizontal, vertical) of an inextensible
    cantilever under a transverse tip force P."""
    if P < 0.0:
        raise ValueError("oracle defined for P >= 0")
    if P == 0.0:
        return 0.0, 0.0
    alpha = P * L * L / EI
    phi0 = brentq(elastica_tip_angle_residual, 1e-12, np.pi / 2 - 1e-6,
                  args=(alpha,), xtol=1e-14)
    I1, I2 = _elastica_integrals(phi0)
    x_tip = L * np.sqrt(2.0 * np.sin(phi0) / alpha)
    delta_v = L * I2 / np.sqrt(alpha)
    return L - x_tip, delta_v


def l2_error(positions, s_nodes, exact):
    """L2 distance between the piecewise-linear computed centerline and an
    exact curve, integrated with the two-point Gauss rule per element."""
    positions = np.asarray(positions)
    s_nodes = np.asarray(s_nodes)
    cg, wg = gauss2()
    total = 0.0
    for i in range(len(s_nodes) - 1):
        h = s_nodes[i + 1] - s_nodes[i]
        for c, w in zip(cg, wg):
            s = (1.0 - c) * s_nodes[i] + c * s_nodes[i + 1]
            xh = (1.0 - c) * positions[i] + c * positions[i + 1]
            diff = xh - np.asarray(exact(s))
            total += w * h * (diff @ diff)
    return np.sqrt(total)
