"""Pure numpy implementations of the hot kernels.

These are the reference semantics for the compiled core in
``_kernels_c.pyx``; both backends must agree to rounding error.  All
functions take and return contiguous float64/complex128 arrays.
"""

import numpy as np

BACKEND_NAME = "pure"

# Cap on the size of the temporary (n_omega x n_phase) matrix in phase_sum.
_CHUNK_ELEMS = 4_000_000


def gaussian_eval(x, c, sigma, amp, order):
    """amp * exp(-(x-c)^2 / (2 sigma^2)), or its first derivative."""
    x = np.asarray(x, dtype=float)
    u = (x - c) / sigma
    g = amp * np.exp(-0.5 * u * u)
    if order == 0:
        return g
    if order == 1:
        return -u / sigma * g
    raise ValueError("order must be 0 or 1")


def bump_eval(x, c, w, amp, order):
    """Compactly supported mollifier amp * exp(1 - 1/(1-t^2)), t=(x-c)/w."""
    x = np.asarray(x, dtype=float)
    t = (x - c) / w
    inside = np.abs(t) < 1.0
    out = np.zeros_like(x)
    ti = t[inside]
    q = 1.0 - ti * ti
    g = amp * np.exp(1.0 - 1.0 / q)
    if order == 0:
        out[inside] = g
    elif order == 1:
        out[inside] = g * (-2.0 * ti / (q * q)) / w
    else:
        raise ValueError("order must be 0 or 1")
    return out


def pwcubic_eval(x, breaks, coefs, order):
    """Piecewise cubic in scipy PPoly layout; zero outside the breaks.

    ``coefs[k, i]`` multiplies (x - breaks[i])^(3-k) on cell i.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x >= breaks[0]) & (x <= breaks[-1])
    xi = x[inside]
    idx = np.clip(np.searchsorted(breaks, xi, side="right") - 1, 0, len(breaks) - 2)
    u = xi - breaks[idx]
    c0, c1, c2, c3 = coefs[0, idx], coefs[1, idx], coefs[2, idx], coefs[3, idx]
    if order == 0:
        out[inside] = ((c0 * u + c1) * u + c2) * u + c3
    elif order == 1:
        out[inside] = (3.0 * c0 * u + 2.0 * c1) * u + c2
    else:
        raise ValueError("order must be 0 or 1")
    return out


def inv_cube_kernel(xa, xb, shift):
    """Matrix K[i, j] = 1 / (xb[j] - xa[i] + shift)^3."""
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    d = xb[None, :] - xa[:, None] + shift
    return 1.0 / (d * d * d)


def phase_sum(omega, weights, phases, sign):
    """S(omega_k) = sum_j weights[j] * exp(sign * i * omega_k * phases[j]).

    Summation order is fixed for a given backend and build, so repeated
    runs are bit-reproducible.
    """
    omega = np.asarray(omega, dtype=float)
    weights = np.asarray(weights, dtype=float)
    phases = np.asarray(phases, dtype=float)
    out = np.empty(omega.shape, dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(1, len(phases)))
    s = 1.0 if sign >= 0 else -1.0
    for k0 in range(0, len(omega), step):
        k1 = min(k0 + step, len(omega))
        m = np.exp((1j * s) * omega[k0:k1, None] * phases[None, :])
        out[k0:k1] = m @ weights
    return out
