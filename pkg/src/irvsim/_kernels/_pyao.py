"""Pure numpy implementation of the AO kernels (fallback backend).

Inputs are expected as contiguous complex128 arrays; the public wrappers in
:mod:`irvsim.beamforming` take care of coercion and shape checks.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def _wrap(x):
    out = np.mod(x, TWO_PI)
    out[out >= TWO_PI] = 0.0
    return out


def _mrt(e):
    norm = np.sqrt(np.sum(e.real**2 + e.imag**2))
    if norm == 0.0:
        w = np.zeros(e.shape[0], dtype=complex)
        w[0] = 1.0
        return w, True
    return e.conj() / norm, False


def effective_channel(g, phases, H, f):
    return (g * np.exp(1j * phases)) @ H + f


def align_phases(g, H, f, w):
    direct = f @ w
    phi0 = 0.0 if direct == 0 else np.arctan2(direct.imag, direct.real)
    chi = g * (H @ w)
    out = phi0 - np.arctan2(chi.imag, chi.real)
    out[chi == 0] = phi0
    return _wrap(out)


def alternating_optimize(g, H, f, iterations, tol):
    """Returns ``(phases, w, trace, degenerate)``; ``tol < 0`` disables early stop."""
    w, degenerate = _mrt(f)
    phases = np.zeros(H.shape[0])
    trace = []
    for _ in range(iterations):
        phases = align_phases(g, H, f, w)
        e = effective_channel(g, phases, H, f)
        w, degenerate = _mrt(e)
        z = e @ w
        trace.append(z.real * z.real + z.imag * z.imag)
        if tol >= 0 and len(trace) > 1 and trace[-1] - trace[-2] <= tol * trace[-2]:
            break
    return phases, w, np.array(trace), degenerate
