# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Semantics mirror ``_kernels_np`` exactly; see that module for contracts.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, cos, sin, fabs

cnp.import_array()

BACKEND_NAME = "compiled"


def gaussian_eval(x, double c, double sigma, double amp, int order):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double u, g
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    for i in range(n):
        u = (xv[i] - c) / sigma
        g = amp * exp(-0.5 * u * u)
        out[i] = g if order == 0 else -u / sigma * g
    return out.reshape(np.shape(x))


def bump_eval(x, double c, double w, double amp, int order):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double t, q, g
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    for i in range(n):
        t = (xv[i] - c) / w
        if fabs(t) < 1.0:
            q = 1.0 - t * t
            g = amp * exp(1.0 - 1.0 / q)
            out[i] = g if order == 0 else g * (-2.0 * t / (q * q)) / w
    return out.reshape(np.shape(x))


def pwcubic_eval(x, breaks, coefs, int order):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] br = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cf = np.ascontiguousarray(coefs, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t ncell = br.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i, lo, hi, mid
    cdef double u, xi
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    for i in range(n):
        xi = xv[i]
        if xi < br[0] or xi > br[ncell]:
            continue
        lo = 0
        hi = ncell
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if xi >= br[mid]:
                lo = mid
            else:
                hi = mid
        u = xi - br[lo]
        if order == 0:
            out[i] = ((cf[0, lo] * u + cf[1, lo]) * u + cf[2, lo]) * u + cf[3, lo]
        else:
            out[i] = (3.0 * cf[0, lo] * u + 2.0 * cf[1, lo]) * u + cf[2, lo]
    return out.reshape(np.shape(x))


def inv_cube_kernel(xa, xb, double shift):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.ascontiguousarray(xa, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.ascontiguousarray(xb, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double d
    for i in range(n):
        for j in range(m):
            d = b[j] - a[i] + shift
            out[i, j] = 1.0 / (d * d * d)
    return out


def phase_sum(omega, weights, phases, int sign):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef Py_ssize_t n = om.shape[0], m = wt.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k, j
    cdef double s = 1.0 if sign >= 0 else -1.0
    cdef double re, im, arg, w0
    for k in range(n):
        re = 0.0
        im = 0.0
        for j in range(m):
            arg = s * om[k] * ph[j]
            w0 = wt[j]
            re += w0 * cos(arg)
            im += w0 * sin(arg)
        out[k] = re + 1j * im
    return out
