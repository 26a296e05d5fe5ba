# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Gaussian-kernel mass/density and 2-state Kalman steps.

Formula-for-formula twin of privmap._reference; see that module for the
documented contracts. Kept free of package imports so it builds stand-alone.
"""

from libc.math cimport erf, exp

cdef double _INV_SQRT2 = 0.7071067811865476
cdef double _INV_SQRT2PI = 0.3989422804014327


def gaussian_interval_mass(double[:] points, double h, double lo, double hi):
    cdef Py_ssize_t i, n = points.shape[0]
    if n == 0:
        return 0.0
    cdef double acc = 0.0
    cdef double x
    for i in range(n):
        x = points[i]
        acc += 0.5 * (erf((hi - x) / h * _INV_SQRT2) - erf((lo - x) / h * _INV_SQRT2))
    cdef double out = acc / n
    if out < 0.0:
        return 0.0
    if out > 1.0:
        return 1.0
    return out


def gaussian_density_at(double[:] points, double h, double x):
    cdef Py_ssize_t i, n = points.shape[0]
    if n == 0:
        return 0.0
    cdef double acc = 0.0
    cdef double z
    for i in range(n):
        z = (x - points[i]) / h
        acc += exp(-0.5 * z * z)
    return acc * _INV_SQRT2PI / (n * h)


def kalman_predict_step(double x0, double x1, double p00, double p01,
                        double p10, double p11, double u, double t,
                        double sigma_a):
    cdef double s2 = sigma_a * sigma_a
    cdef double q00 = s2 * t * t * t * t * 0.25
    cdef double q01 = s2 * t * t * t * 0.5
    cdef double q11 = s2 * t * t
    cdef double nx0 = x0 + t * x1 + 0.5 * t * t * u
    cdef double nx1 = x1 + t * u
    cdef double np00 = p00 + t * (p01 + p10) + t * t * p11 + q00
    cdef double np01 = p01 + t * p11 + q01
    cdef double np10 = p10 + t * p11 + q01
    cdef double np11 = p11 + q11
    cdef double m01 = 0.5 * (np01 + np10)
    return nx0, nx1, np00, m01, m01, np11


def kalman_update_step(double x0, double x1, double p00, double p01,
                       double p10, double p11, double z, double r_obs):
    cdef double s = p00 + r_obs
    if s <= 0.0:
        raise ValueError("non-positive innovation covariance")
    cdef double k0 = p00 / s
    cdef double k1 = p10 / s
    cdef double y = z - x0
    cdef double nx0 = x0 + k0 * y
    cdef double nx1 = x1 + k1 * y
    cdef double np00 = (1.0 - k0) * p00
    cdef double np01 = (1.0 - k0) * p01
    cdef double np10 = p10 - k1 * p00
    cdef double np11 = p11 - k1 * p01
    cdef double m01 = 0.5 * (np01 + np10)
    return nx0, nx1, np00, m01, m01, np11
