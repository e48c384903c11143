"""Independent oracles for expected values.

Everything here recomputes target quantities by a route disjoint from the
implementation under test: brute-force quadrature, eigenfunction sums,
finite differences, closed-form derivatives.
"""

import numpy as np
from scipy.integrate import quad

from grushin.hermite import hermite_functions


def eigen_sum_heat_kernel(t, x, y, terms=160):
    """Truncated eigenfunction sum for the 1-d heat kernel at lam = 1."""
    hx = hermite_functions(terms, np.atleast_1d(np.asarray(x, dtype=float)))
    hy = hermite_functions(terms, np.atleast_1d(np.asarray(y, dtype=float)))
    k = np.arange(terms + 1)
    vals = np.sum(np.exp(-(2 * k + 1) * t)[:, None] * hx * hy, axis=0)
    return vals if vals.size > 1 else float(vals[0])


def fd_ladder(fn, lam, pts, kind, h=1e-3):
    """Apply -d/dx + lam x (creation) or d/dx + lam x by finite differences."""
    d1 = (fn(pts - 2 * h) - 8 * fn(pts - h) + 8 * fn(pts + h) - fn(pts + 2 * h)) / (12 * h)
    sgn = -1.0 if kind == "creation" else 1.0
    return sgn * d1 + lam * pts * fn(pts)


def semigroup_inverse_sqrt(mu):
    """Gamma(1/2)^(-1) integral of t^(-1/2) exp(-t mu) dt by adaptive quadrature."""
    val, _ = quad(lambda t: t**-0.5 * np.exp(-t * mu), 0.0, np.inf)
    return val / np.sqrt(np.pi)


def rational_symbol_derivative(k, mu):
    """Closed-form k-th derivative of (1 + mu)^(-1)."""
    import math

    return (-1.0) ** k * math.factorial(k) * (1.0 + np.asarray(mu)) ** -(k + 1)


def brute_force_g_star(coeffs, nus, lam, k_order, x0, K):
    """Dense nested quadrature for (g_k*)^2 at one point, 1-d slices.

    Uniform y grid over +-12/sqrt(lam) and a dense log time grid; independent
    of the tan-substitution rule inside the package.
    """
    y = np.linspace(-12 / np.sqrt(abs(lam)), 12 / np.sqrt(abs(lam)), 8001)
    dy = y[1] - y[0]
    B = abs(lam) ** 0.25 * hermite_functions(K, np.sqrt(abs(lam)) * y)
    t = np.exp(np.linspace(np.log(1e-9), np.log(50.0 / abs(lam)), 2400))
    wt = np.gradient(np.log(t)) * t
    total = 0.0
    for ti, wi in zip(t, wt):
        dT = np.einsum("m,my->y", coeffs * (-nus) * np.exp(-ti * nus), B[: len(coeffs)])
        ker = (1.0 + (x0 - y) ** 2 / ti) ** -k_order
        total += wi * ti * ti**-0.5 * np.sum(dy * ker * np.abs(dT) ** 2)
    return total


def fd_grushin(values, dx, dt, x_axis):
    """Second-order centered differences for -Laplacian - |x|^2 d_t^2, 1-d."""
    lap = (np.roll(values, -1, axis=1) - 2 * values + np.roll(values, 1, axis=1)) / dx**2
    dtt = (np.roll(values, -1, axis=0) - 2 * values + np.roll(values, 1, axis=0)) / dt**2
    return -lap - (x_axis**2)[None, :] * dtt
