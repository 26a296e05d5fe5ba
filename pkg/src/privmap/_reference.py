"""Pure-Python kernels: Gaussian-kernel mass/density and 2-state Kalman steps.

This is the fallback used when the compiled extension is unavailable. The
compiled twin in _kernels.pyx follows the same formulas in the same order
so both backends agree to rounding error.
"""

from __future__ import annotations

import math

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gaussian_interval_mass(points, h: float, lo: float, hi: float) -> float:
    """Mean kernel mass over [lo, hi]: (1/n) sum of CDF differences."""
    n = len(points)
    if n == 0:
        return 0.0
    acc = 0.0
    for x in points:
        acc += 0.5 * (math.erf((hi - x) / h * _INV_SQRT2) - math.erf((lo - x) / h * _INV_SQRT2))
    out = acc / n
    if out < 0.0:
        return 0.0
    if out > 1.0:
        return 1.0
    return out


def gaussian_density_at(points, h: float, x: float) -> float:
    """Kernel density estimate at x: (1/(n*h)) sum of standard-normal pdfs."""
    n = len(points)
    if n == 0:
        return 0.0
    acc = 0.0
    for p in points:
        z = (x - p) / h
        acc += math.exp(-0.5 * z * z)
    return acc * _INV_SQRT2PI / (n * h)


def kalman_predict_step(x0, x1, p00, p01, p10, p11, u, t, sigma_a):
    """Constant-velocity predict: x <- F x + B u, P <- F P F' + Q.

    F = [[1, t], [0, 1]], B = [t^2/2, t], Q = sigma_a^2 * [[t^4/4, t^3/2],
    [t^3/2, t^2]]. P is re-symmetrized by averaging with its transpose.
    """
    s2 = sigma_a * sigma_a
    q00 = s2 * t * t * t * t * 0.25
    q01 = s2 * t * t * t * 0.5
    q11 = s2 * t * t
    nx0 = x0 + t * x1 + 0.5 * t * t * u
    nx1 = x1 + t * u
    np00 = p00 + t * (p01 + p10) + t * t * p11 + q00
    np01 = p01 + t * p11 + q01
    np10 = p10 + t * p11 + q01
    np11 = p11 + q11
    m01 = 0.5 * (np01 + np10)
    return nx0, nx1, np00, m01, m01, np11


def kalman_update_step(x0, x1, p00, p01, p10, p11, z, r_obs):
    """Scalar-measurement update with H = [1, 0].

    S = p00 + r must be positive; guaranteed for r_obs > 0 and PSD P.
    """
    s = p00 + r_obs
    if s <= 0.0:
        raise ValueError("non-positive innovation covariance")
    k0 = p00 / s
    k1 = p10 / s
    y = z - x0
    nx0 = x0 + k0 * y
    nx1 = x1 + k1 * y
    np00 = (1.0 - k0) * p00
    np01 = (1.0 - k0) * p01
    np10 = p10 - k1 * p00
    np11 = p11 - k1 * p01
    m01 = 0.5 * (np01 + np10)
    return nx0, nx1, np00, m01, m01, np11
