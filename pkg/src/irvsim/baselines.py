"""Comparison schemes: TDMA and NOMA without surfaces, random phase shifts with MRT."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamforming import effective_channel, mrt
from .metrics import user_rate
from .reflection import DiscretePhaseSet, random_phases

__all__ = [
    "NomaAllocation",
    "noma_allocation",
    "tdma_rate_no_irs",
    "noma_rates",
    "rps_rate",
]


def tdma_rate_no_irs(f, tx_power: float, noise_var: float) -> np.ndarray:
    """Per-user TDMA rates with direct-link MRT: ``(1/K) log2(1 + P ||f_k||^2 / noise)``.

    ``f`` holds one direct channel per row.
    """
    f = np.atleast_2d(np.asarray(f, dtype=complex))
    K = f.shape[0]
    gains = np.sum(np.abs(f) ** 2, axis=1)
    return np.log2(1.0 + gains * tx_power / noise_var) / K


@dataclass(frozen=True)
class NomaAllocation:
    """SIC decoding order (weakest first) and per-user power fractions.

    ``coefficients`` is indexed by user, not by decoding position.
    """

    order: np.ndarray
    coefficients: np.ndarray


def noma_allocation(f) -> NomaAllocation:
    """Sort users by ``||f_k||^2`` and hand out ``2i/(K(K+1))``, largest to the weakest.

    Equal gains keep index order (lower index decoded first).
    """
    f = np.atleast_2d(np.asarray(f, dtype=complex))
    K = f.shape[0]
    gains = np.sum(np.abs(f) ** 2, axis=1)
    order = np.argsort(gains, kind="stable")
    levels = 2.0 * np.arange(1, K + 1) / (K * (K + 1))
    coefficients = np.empty(K)
    coefficients[order] = levels[::-1]
    return NomaAllocation(order=order, coefficients=coefficients)


def noma_rates(f, tx_power: float, noise_var: float, gain_model: str = "common") -> np.ndarray:
    """Per-user NOMA rates after SIC, all users served over the whole frame.

    Each user cancels the users decoded before it and treats the remaining
    (stronger) users' layers as interference. Every layer is beamformed with
    MRT toward its own user.

    ``gain_model`` selects how a receiver sees the other layers:
    ``"common"`` uses the receiver's own matched gain ``||f_k||^2`` for every
    layer; ``"per_beam"`` uses the actual cross gains ``|f_k^T w_j|^2``.
    """
    f = np.atleast_2d(np.asarray(f, dtype=complex))
    K = f.shape[0]
    alloc = noma_allocation(f)
    a = alloc.coefficients
    if gain_model == "common":
        own = np.sum(np.abs(f) ** 2, axis=1)
        cross = np.repeat(own[:, None], K, axis=1)
    elif gain_model == "per_beam":
        W = np.array([mrt(fk) for fk in f])  # rows are w_j
        cross = np.abs(f @ W.T) ** 2  # cross[k, j] = |f_k^T w_j|^2
    else:
        raise ValueError(f"unknown NOMA gain model {gain_model!r}")

    rates = np.zeros(K)
    for pos, k in enumerate(alloc.order):
        later = alloc.order[pos + 1:]
        signal = a[k] * tx_power * cross[k, k]
        interference = tx_power * np.sum(a[later] * cross[k, later])
        rates[k] = np.log2(1.0 + signal / (interference + noise_var))
    return rates


def rps_rate(
    g,
    H,
    f,
    phase_set: DiscretePhaseSet | None,
    tx_power: float,
    noise_var: float,
    n_users: int,
    rng: np.random.Generator,
) -> float:
    """Slot rate with random reflection phases and MRT on the resulting channel.

    ``phase_set=None`` draws continuous phases; otherwise phases are drawn
    uniformly from the discrete set.
    """
    g = np.asarray(g, dtype=complex)
    phases = random_phases(g.shape[0], phase_set, rng)
    eff = effective_channel(g, phases, H, f)
    return user_rate(eff, mrt(eff), tx_power, noise_var, n_users)
