"""Joint active/passive beamforming for one user slot.

Alternating optimization: with the transmit vector fixed, every reflected path
is phase-aligned with the direct path (closed form); with the phases fixed,
maximal-ratio transmission (MRT) on the effective channel is optimal. The
stacked forms are used throughout: ``g`` (N_r,), ``H`` (N_r, N_b), ``f`` (N_b,).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "AoResult",
    "effective_channel",
    "optimal_phases_given_w",
    "mrt",
    "alternating_optimize",
    "objective",
]

log = logging.getLogger(__name__)


def _vec(x, name: str) -> np.ndarray:
    a = np.ascontiguousarray(x, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {a.shape}")
    return a


def _operands(g, H, f):
    g = _vec(g, "g")
    f = _vec(f, "f")
    H = np.ascontiguousarray(H, dtype=np.complex128)
    if H.ndim != 2:
        H = H.reshape(g.shape[0], f.shape[0])
    if H.shape != (g.shape[0], f.shape[0]):
        raise ValueError(f"H has shape {H.shape}, expected {(g.shape[0], f.shape[0])}")
    return g, H, f


def effective_channel(g, phases, H, f) -> np.ndarray:
    """Composite row channel ``g^T diag(exp(j*phases)) H + f^T`` of length N_b."""
    g, H, f = _operands(g, H, f)
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    if phases.shape != g.shape:
        raise ValueError(f"{phases.shape[0]} phases for {g.shape[0]} elements")
    return _kernels.effective_channel(g, phases, H, f)


def optimal_phases_given_w(g, H, f, w) -> np.ndarray:
    """Phases that co-phase every reflected term with the direct term for a fixed ``w``.

    ``phi_n = arg(f^T w) - arg(g_n * h_n^T w)`` wrapped to ``[0, 2*pi)``. A zero
    direct term uses reference phase 0, and elements whose reflected term is
    zero get the reference phase.
    """
    g, H, f = _operands(g, H, f)
    w = _vec(w, "w")
    if w.shape != f.shape:
        raise ValueError("w and f must have the same length")
    if not np.any(w):
        raise ValueError("w must be nonzero")
    return _kernels.align_phases(g, H, f, w)


def mrt(effective) -> np.ndarray:
    """Unit-norm matched filter ``conj(effective) / ||effective||``.

    An all-zero channel has no preferred direction; the first basis vector is
    returned and the event is logged.
    """
    e = _vec(effective, "effective")
    norm = np.linalg.norm(e)
    if norm == 0.0:
        log.warning("MRT on an all-zero channel; using the first basis vector")
        w = np.zeros_like(e)
        w[0] = 1.0
        return w
    return e.conj() / norm


def objective(effective, w) -> float:
    """Received power gain ``|effective . w|^2``."""
    return float(abs(np.dot(effective, w)) ** 2)


@dataclass(frozen=True)
class AoResult:
    """Outcome of :func:`alternating_optimize` for one user slot.

    ``objective_trace[i]`` is ``|effective . w|^2`` after iteration ``i + 1``.
    ``degenerate`` flags an all-zero effective channel (basis-vector MRT).
    """

    phases: np.ndarray
    w: np.ndarray
    objective_trace: np.ndarray
    degenerate: bool = field(default=False)

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def alternating_optimize(g, H, f, iterations: int = 3, tol: float | None = None) -> AoResult:
    """Alternate phase alignment and MRT, starting from MRT on the direct channel.

    Runs exactly ``iterations`` rounds by default. With ``tol`` set, stops early
    once the relative objective gain of a round drops to ``tol`` or below, and
    ``iterations`` acts as the cap.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    g, H, f = _operands(g, H, f)
    phases, w, trace, degenerate = _kernels.alternating_optimize(
        g, H, f, int(iterations), -1.0 if tol is None else float(tol)
    )
    return AoResult(phases=phases, w=w, objective_trace=trace, degenerate=degenerate)
