"""Phase-shift configurations of the reflecting elements.

A phase vector is a float array of length ``N_r`` (all surfaces, stacked in
surface order) with entries in ``[0, 2*pi)``. Reflection amplitude is one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TWO_PI",
    "DiscretePhaseSet",
    "wrap_phase",
    "reflection_coefficients",
    "quantize_mid_tread",
    "random_phases",
]

TWO_PI = 2.0 * np.pi


def wrap_phase(phi):
    """Reduce angles into ``[0, 2*pi)``.

    ``np.mod`` can return exactly ``2*pi`` for tiny negative inputs; those map to 0.
    """
    out = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DiscretePhaseSet:
    """The ``2**bits`` uniformly spaced phases ``{0, step, ..., (levels-1)*step}``."""

    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @property
    def step(self) -> float:
        return TWO_PI / self.levels

    def values(self) -> np.ndarray:
        return np.arange(self.levels) * self.step

    def contains(self, phi) -> np.ndarray:
        """Exact membership test (index times step, bit for bit)."""
        phi = np.asarray(phi, dtype=float)
        idx = np.rint(phi / self.step)
        return (idx >= 0) & (idx < self.levels) & (idx * self.step == phi)


def reflection_coefficients(phases) -> np.ndarray:
    """Unit-modulus coefficients ``exp(j*phi)``."""
    return np.exp(1j * np.asarray(phases, dtype=float))


def quantize_mid_tread(phi, phase_set: DiscretePhaseSet):
    """Round to the nearest level with ``step * floor(phi/step + 0.5)``, modulo 2*pi.

    Half-step ties round up. The result is rebuilt as ``index * step`` so it is
    bit-identical to a member of :meth:`DiscretePhaseSet.values`.
    """
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise ValueError("phases must be finite")
    idx = np.floor(phi / phase_set.step + 0.5)
    idx = np.mod(idx, phase_set.levels)
    out = idx * phase_set.step
    return float(out) if out.ndim == 0 else out


def random_phases(
    n: int, phase_set: DiscretePhaseSet | None, rng: np.random.Generator
) -> np.ndarray:
    """Uniform random phases: continuous on ``[0, 2*pi)`` or uniform over a discrete set."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if phase_set is None:
        return wrap_phase(rng.uniform(0.0, TWO_PI, size=n))
    return rng.integers(0, phase_set.levels, size=n) * phase_set.step
