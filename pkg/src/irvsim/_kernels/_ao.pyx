# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled AO kernels.

Same contract as ``_pyao``: contiguous complex128 inputs, ``H`` of shape
(N_r, N_b). Inside the AO loop each iteration makes a single pass over the rows of
``H``: projection ``H @ w``, phase alignment and the reflected sum are fused,
and phases stay as unit phasors until the end, so the loop calls no
trigonometric functions.
"""

import numpy as np

from libc.math cimport atan2, cos, sin, sqrt, fmod

ctypedef double complex cplx

cdef double TWO_PI = 6.283185307179586


cdef inline double _wrap(double x) noexcept nogil:
    # mirrors numpy's float remainder so both backends agree to the last bit
    cdef double r = fmod(x, TWO_PI)
    if r != 0.0:
        if r < 0.0:
            r += TWO_PI
    else:
        r = 0.0
    if r >= TWO_PI:
        r = 0.0
    return r


cdef inline double _abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef bint _mrt(const cplx[::1] e, cplx[::1] w) noexcept nogil:
    cdef Py_ssize_t b, nb = e.shape[0]
    cdef double acc = 0.0
    for b in range(nb):
        acc += _abs2(e[b])
    if acc == 0.0:
        for b in range(nb):
            w[b] = 0.0
        w[0] = 1.0
        return True
    acc = sqrt(acc)
    for b in range(nb):
        w[b] = (e[b].real - 1j * e[b].imag) / acc
    return False


cdef void _align(const cplx[::1] g, const cplx[:, ::1] H, const cplx[::1] f,
                 const cplx[::1] w, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n, b, nr = H.shape[0], nb = H.shape[1]
    cdef cplx d = 0.0, acc, chi
    cdef double phi0 = 0.0
    for b in range(nb):
        d = d + f[b] * w[b]
    if d.real != 0.0 or d.imag != 0.0:
        phi0 = atan2(d.imag, d.real)
    for n in range(nr):
        acc = 0.0
        for b in range(nb):
            acc = acc + H[n, b] * w[b]
        chi = g[n] * acc
        if chi.real == 0.0 and chi.imag == 0.0:
            out[n] = _wrap(phi0)
        else:
            out[n] = _wrap(phi0 - atan2(chi.imag, chi.real))


cdef void _effective(const cplx[::1] g, const double[::1] phases, const cplx[:, ::1] H,
                     const cplx[::1] f, cplx[::1] e) noexcept nogil:
    cdef Py_ssize_t n, b, nr = H.shape[0], nb = H.shape[1]
    cdef cplx c
    for b in range(nb):
        e[b] = 0.0
    for n in range(nr):
        c = g[n] * (cos(phases[n]) + 1j * sin(phases[n]))
        for b in range(nb):
            e[b] = e[b] + c * H[n, b]
    for b in range(nb):
        e[b] = e[b] + f[b]


def effective_channel(const cplx[::1] g, const double[::1] phases,
                      const cplx[:, ::1] H, const cplx[::1] f):
    out = np.empty(H.shape[1], dtype=np.complex128)
    cdef cplx[::1] e = out
    with nogil:
        _effective(g, phases, H, f, e)
    return out


def align_phases(const cplx[::1] g, const cplx[:, ::1] H,
                 const cplx[::1] f, const cplx[::1] w):
    out = np.empty(H.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        _align(g, H, f, w, o)
    return out


cdef inline cplx _phasor(cplx gn, cplx proj, cplx u0) noexcept nogil:
    # unit phasor aligning g_n * (h_n^T w) with the direct path: u0 * conj(chi)/|chi|
    cdef cplx chi = gn * proj
    cdef double mag = sqrt(_abs2(chi))
    if mag == 0.0:
        return u0
    return u0 * (chi.real - 1j * chi.imag) / mag


cdef void _ao_step(const cplx[::1] g, const cplx[:, ::1] H, const cplx[::1] f,
                   const cplx[::1] w, cplx[::1] coef, cplx[::1] e) noexcept nogil:
    # One phase half-step plus the resulting effective channel, fused over the
    # rows of H. Rows go in blocks of four so the four projections accumulate
    # in independent chains.
    cdef Py_ssize_t n, b, nr = H.shape[0], nb = H.shape[1]
    cdef Py_ssize_t nr4 = nr - nr % 4
    cdef cplx d = 0.0, u0 = 1.0, a0, a1, a2, a3, c0, c1, c2, c3, wb
    cdef double mag
    for b in range(nb):
        d = d + f[b] * w[b]
    mag = sqrt(_abs2(d))
    if mag != 0.0:
        u0 = d / mag
    for b in range(nb):
        e[b] = 0.0
    for n in range(0, nr4, 4):
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        a3 = 0.0
        for b in range(nb):
            wb = w[b]
            a0 = a0 + H[n, b] * wb
            a1 = a1 + H[n + 1, b] * wb
            a2 = a2 + H[n + 2, b] * wb
            a3 = a3 + H[n + 3, b] * wb
        c0 = _phasor(g[n], a0, u0)
        c1 = _phasor(g[n + 1], a1, u0)
        c2 = _phasor(g[n + 2], a2, u0)
        c3 = _phasor(g[n + 3], a3, u0)
        coef[n] = c0
        coef[n + 1] = c1
        coef[n + 2] = c2
        coef[n + 3] = c3
        c0 = g[n] * c0
        c1 = g[n + 1] * c1
        c2 = g[n + 2] * c2
        c3 = g[n + 3] * c3
        for b in range(nb):
            e[b] = e[b] + (c0 * H[n, b] + c1 * H[n + 1, b]) + (c2 * H[n + 2, b] + c3 * H[n + 3, b])
    for n in range(nr4, nr):
        a0 = 0.0
        for b in range(nb):
            a0 = a0 + H[n, b] * w[b]
        c0 = _phasor(g[n], a0, u0)
        coef[n] = c0
        c0 = g[n] * c0
        for b in range(nb):
            e[b] = e[b] + c0 * H[n, b]
    for b in range(nb):
        e[b] = e[b] + f[b]


def alternating_optimize(const cplx[::1] g, const cplx[:, ::1] H,
                         const cplx[::1] f, int iterations, double tol):
    """Returns ``(phases, w, trace, degenerate)``; ``tol < 0`` disables early stop."""
    cdef Py_ssize_t nr = H.shape[0], nb = H.shape[1], b, n
    phases_arr = np.zeros(nr, dtype=np.float64)
    w_arr = np.empty(nb, dtype=np.complex128)
    e_arr = np.empty(nb, dtype=np.complex128)
    coef_arr = np.ones(nr, dtype=np.complex128)
    trace_arr = np.empty(max(iterations, 0), dtype=np.float64)
    cdef double[::1] phases = phases_arr
    cdef cplx[::1] w = w_arr
    cdef cplx[::1] e = e_arr
    cdef cplx[::1] coef = coef_arr
    cdef double[::1] trace = trace_arr
    cdef bint degenerate
    cdef int it, done = 0
    cdef cplx z
    with nogil:
        degenerate = _mrt(f, w)
        for it in range(iterations):
            _ao_step(g, H, f, w, coef, e)
            degenerate = _mrt(e, w)
            z = 0.0
            for b in range(nb):
                z = z + e[b] * w[b]
            trace[it] = _abs2(z)
            done = it + 1
            if tol >= 0.0 and it > 0 and trace[it] - trace[it - 1] <= tol * trace[it - 1]:
                break
        for n in range(nr):
            phases[n] = _wrap(atan2(coef[n].imag, coef[n].real))
    return phases_arr, w_arr, trace_arr[:done].copy(), bool(degenerate)
