"""Independent oracles used by the tests.

Every routine here deliberately avoids the code paths it is used to check:
norms come from adaptive 1-D quadrature instead of fixed Gauss rules,
Carleson masses from a brute-force 2-D tensor rule, Taylor data from direct
polynomial algebra.
"""

import numpy as np
from scipy.integrate import quad


def radial_monomial_norm(n: int, p: float, alpha: float) -> float:
    """||z^n|| in the standard-weight Bergman space by adaptive quadrature.

    In s = r^2 the integral is (alpha+1) * int_0^1 s^{pn/2} (1-s)^alpha ds.
    """
    val, err = quad(lambda s: s ** (p * n / 2.0) * (1.0 - s) ** alpha, 0.0, 1.0,
                    epsabs=1e-14, epsrel=1e-13, limit=200)
    assert err < 1e-10
    return ((alpha + 1.0) * val) ** (1.0 / p)


def radial_weighted_moment(n: int, weight_fn) -> float:
    """int_0^1 r^n weight(r) 2 r dr by adaptive quadrature."""
    val, _ = quad(lambda r: r ** n * weight_fn(r) * 2.0 * r, 0.0, 1.0,
                  epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def carleson_mass_2d(weight_fn, a: complex, n_r: int = 4000, n_theta: int = 400) -> float:
    """Brute-force midpoint tensor quadrature of the weight over the square
    {r e^{i theta}: |a| <= r < 1, |theta - arg a| <= (1-|a|)/2}, normalized
    area convention."""
    a = complex(a)
    mod, arg = abs(a), np.angle(a)
    half = (1.0 - mod) / 2.0
    r = mod + (1.0 - mod) * (np.arange(n_r) + 0.5) / n_r
    th = arg - half + (2.0 * half) * (np.arange(n_theta) + 0.5) / n_theta
    dr = (1.0 - mod) / n_r
    dth = 2.0 * half / n_theta
    vals = weight_fn(r) * r
    return float(np.sum(vals) * dr * n_theta * dth / np.pi)


def poly_eval(coeffs, z):
    out = np.zeros_like(np.asarray(z, dtype=complex))
    for c in np.asarray(coeffs, dtype=complex)[::-1]:
        out = out * z + c
    return out


def poly_derivative_coeffs(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def coefficient_l2(coeffs) -> float:
    return float(np.linalg.norm(np.asarray(coeffs, dtype=complex)))


def hardy_p_mean_at(fn, radius: float, p: float, nodes: int = 8192) -> float:
    """Plain single-circle p-mean (no extrapolation), for decay oracles."""
    z = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return float(np.mean(np.abs(fn(z)) ** p) ** (1.0 / p))
