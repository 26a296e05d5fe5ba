"""Shared test oracles.

The Kalman oracle is an independent dense-matrix implementation: numpy
arrays, textbook update equations, no shared code with the package.
"""

from __future__ import annotations

import numpy as np


def oracle_predict(x, p, u, t, sigma_a):
    """Constant-velocity predict with acceleration input, dense form."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    f = np.array([[1.0, t], [0.0, 1.0]])
    b = np.array([0.5 * t * t, t])
    q = sigma_a**2 * np.array([[t**4 / 4.0, t**3 / 2.0], [t**3 / 2.0, t**2]])
    x_new = f @ x + b * u
    p_new = f @ p @ f.T + q
    return x_new, 0.5 * (p_new + p_new.T)


def oracle_update(x, p, z, r_obs):
    """Scalar position measurement, H = [1, 0], dense form."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    h = np.array([[1.0, 0.0]])
    s = (h @ p @ h.T).item() + r_obs
    k = (p @ h.T / s).ravel()
    y = z - (h @ x).item()
    x_new = x + k * y
    p_new = (np.eye(2) - np.outer(k, h.ravel())) @ p
    return x_new, 0.5 * (p_new + p_new.T)
