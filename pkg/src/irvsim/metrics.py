"""Noise power, spectral efficiency and percentile statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BOLTZMANN",
    "DropResult",
    "CdfSummary",
    "noise_power",
    "user_rate",
    "sum_rate",
    "percentile",
    "summarize",
    "empirical_cdf",
]

BOLTZMANN = 1.380649e-23  # J/K


def noise_power(bandwidth_hz: float, temperature_k: float, noise_figure_db: float) -> float:
    """Thermal noise power ``k * B * T * NF`` in watts (noise figure in dB)."""
    if bandwidth_hz <= 0 or temperature_k <= 0:
        raise ValueError("bandwidth and temperature must be positive")
    return BOLTZMANN * bandwidth_hz * temperature_k * 10.0 ** (noise_figure_db / 10.0)


def user_rate(effective, w, tx_power: float, noise_var: float, n_users: int) -> float:
    """TDMA slot rate ``(1/K) log2(1 + P |effective . w|^2 / noise)`` in bps/Hz."""
    w = np.asarray(w)
    if np.linalg.norm(w) > 1.0 + 1e-12:
        raise ValueError("beamformer norm exceeds 1")
    gain = abs(np.dot(np.asarray(effective), w)) ** 2
    return float(np.log2(1.0 + gain * tx_power / noise_var) / n_users)


def sum_rate(per_user_rates: Iterable[float]) -> float:
    """Sum of per-user rates (each already carries its own slot share)."""
    return float(math.fsum(per_user_rates))


def percentile(samples: Sequence[float], q: float) -> float:
    """Nearest-rank percentile: the ``ceil(q*N)``-th smallest sample (1-based).

    ``q = 0.05`` gives the 95%-likely value and ``q = 0.5`` the median.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    data = np.sort(np.asarray(samples, dtype=float))
    if data.size == 0:
        raise ValueError("percentile of an empty sample")
    # rounding guards against q*N landing a hair above an integer
    rank = max(1, math.ceil(round(q * data.size, 9)))
    return float(data[rank - 1])


def empirical_cdf(samples: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Sorted samples and CDF values ``i/N`` for ``i = 1..N``."""
    data = np.sort(np.asarray(samples, dtype=float))
    return data, np.arange(1, data.size + 1) / data.size


@dataclass(frozen=True)
class DropResult:
    """Per-user and sum rates of one scheme in one drop."""

    drop_index: int
    scheme: str
    per_user_rates: tuple[float, ...]
    sum_rate: float

    @classmethod
    def from_rates(cls, drop_index: int, scheme: str, rates: Iterable[float]) -> "DropResult":
        rates = tuple(float(r) for r in rates)
        return cls(drop_index, scheme, rates, sum_rate(rates))


@dataclass(frozen=True)
class CdfSummary:
    """95%-likely (5th percentile) and median sum rate of one scheme."""

    scheme: str
    p5: float
    p50: float
    samples: int


def summarize(results: Iterable[DropResult], schemes: Sequence[str] | None = None) -> list[CdfSummary]:
    """Per-scheme percentile summary; scheme order follows ``schemes`` or first appearance."""
    by_scheme: dict[str, list[float]] = {}
    for r in results:
        by_scheme.setdefault(r.scheme, []).append(r.sum_rate)
    order = list(schemes) if schemes is not None else list(by_scheme)
    out = []
    for name in order:
        vals = by_scheme.get(name)
        if not vals:
            raise ValueError(f"no results for scheme {name}")
        out.append(CdfSummary(name, percentile(vals, 0.05), percentile(vals, 0.50), len(vals)))
    return out
