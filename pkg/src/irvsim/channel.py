"""Large-scale and small-scale channel synthesis for one Monte Carlo drop.

BS-UE and IRVS-UE links: COST-Hata three-slope path loss with lognormal
shadowing and Rayleigh fading. BS-IRVS links: Rician fading with an all-ones
(broadside) LOS component and no shadowing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import DropGeometry, SystemConfig

__all__ = [
    "LargeScaleGains",
    "ChannelRealization",
    "cost_hata_constant",
    "three_slope_pathloss_db",
    "shadowed_gain",
    "los_pathloss_linear",
    "rayleigh_vector",
    "rician_matrix",
    "large_scale_gains",
    "realize_channels",
    "dump_realization",
    "load_realization",
]


def cost_hata_constant(fc_mhz: float, tx_height_m: float, rx_height_m: float) -> float:
    """COST-Hata constant ``L`` in dB (carrier in MHz, heights in meters)."""
    if fc_mhz <= 0 or tx_height_m <= 0 or rx_height_m <= 0:
        raise ValueError("carrier frequency and heights must be positive")
    lf = np.log10(fc_mhz)
    return float(
        46.3
        + 33.9 * lf
        - 13.82 * np.log10(tx_height_m)
        - (1.1 * lf - 0.7) * rx_height_m
        + 1.56 * lf
        - 0.8
    )


def three_slope_pathloss_db(d_km, L_db: float, d0_km: float = 0.01, d1_km: float = 0.05):
    """Three-slope path loss (negative dB) at distance ``d_km`` kilometers.

    Slopes are 35 dB/decade beyond ``d1_km``, 20 dB/decade between the break
    points and flat inside ``d0_km``. Accepts scalars or arrays.
    """
    d = np.asarray(d_km, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    # clamp keeps log10 finite on the flat branch; its value there is unused
    dl = np.log10(np.maximum(d, d0_km))
    far = -L_db - 35.0 * dl
    mid = -L_db - 15.0 * np.log10(d1_km) - 20.0 * dl
    near = -L_db - 15.0 * np.log10(d1_km) - 20.0 * np.log10(d0_km)
    out = np.where(d > d1_km, far, np.where(d > d0_km, mid, near))
    return float(out) if out.ndim == 0 else out


def shadowed_gain(pathloss_db, sigma_sd_db: float, rng: np.random.Generator):
    """Linear gain ``10^((P + S)/10)`` with fresh shadowing ``S ~ N(0, sigma^2)`` dB."""
    if sigma_sd_db < 0:
        raise ValueError("shadowing deviation must be non-negative")
    p = np.asarray(pathloss_db, dtype=float)
    s = rng.normal(0.0, sigma_sd_db, size=p.shape) if sigma_sd_db > 0 else 0.0
    out = 10.0 ** ((p + s) / 10.0)
    return float(out) if np.ndim(out) == 0 else out


def los_pathloss_linear(d_m, L0_db: float = -30.0, alpha: float = 2.5):
    """Power-law LOS gain ``10^(L0/10) * d^-alpha``; ``d`` in meters, clamped at 1 m."""
    d = np.maximum(np.asarray(d_m, dtype=float), 1.0)
    out = 10.0 ** (L0_db / 10.0) * d ** (-alpha)
    return float(out) if out.ndim == 0 else out


def _cn01(rng: np.random.Generator, shape) -> np.ndarray:
    # CN(0, 1): real and imaginary parts each N(0, 1/2)
    z = rng.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def rayleigh_vector(n: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from CN(0, variance)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not variance > 0:
        raise ValueError("variance must be positive")
    return np.sqrt(variance) * _cn01(rng, (n,))


def rician_matrix(
    n_rows: int,
    n_cols: int,
    variance: float,
    rician_factor: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rician matrix with all-ones LOS part and CN(0,1) scattered part.

    Returns ``sqrt(G v/(G+1)) * ones + sqrt(v/(G+1)) * H_nlos`` with
    ``G = rician_factor`` and ``v = variance``.
    """
    if rician_factor < 0:
        raise ValueError("rician_factor must be non-negative")
    if not variance > 0:
        raise ValueError("variance must be positive")
    nlos = _cn01(rng, (n_rows, n_cols))
    los_amp = np.sqrt(rician_factor * variance / (rician_factor + 1.0))
    nlos_amp = np.sqrt(variance / (rician_factor + 1.0))
    return los_amp + nlos_amp * nlos


@dataclass(frozen=True)
class LargeScaleGains:
    """Linear large-scale gains of every link in one drop."""

    bs_ue_var: np.ndarray  # (K,)
    surf_ue_var: np.ndarray  # (S, K)
    bs_surf_var: np.ndarray  # (S,)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-drop channels and their stacked forms.

    ``direct`` is (K, N_b); ``surf_ue[s]`` is (K, N_s); ``bs_surf[s]`` is
    (N_s, N_b); ``stacked_h`` is (N_r, N_b); ``stacked_g`` is (K, N_r).
    """

    direct: np.ndarray
    surf_ue: tuple[np.ndarray, ...]
    bs_surf: tuple[np.ndarray, ...]
    stacked_h: np.ndarray
    stacked_g: np.ndarray

    @classmethod
    def from_blocks(cls, direct, surf_ue, bs_surf) -> "ChannelRealization":
        direct = np.asarray(direct, dtype=complex)
        n_users, n_bs = direct.shape
        surf_ue = tuple(np.asarray(x, dtype=complex).reshape(n_users, -1) for x in surf_ue)
        bs_surf = tuple(np.asarray(x, dtype=complex).reshape(-1, n_bs) for x in bs_surf)
        if surf_ue:
            stacked_h = np.ascontiguousarray(np.vstack(bs_surf))
            stacked_g = np.ascontiguousarray(np.hstack(surf_ue))
        else:
            stacked_h = np.zeros((0, n_bs), dtype=complex)
            stacked_g = np.zeros((n_users, 0), dtype=complex)
        return cls(direct, surf_ue, bs_surf, stacked_h, stacked_g)

    @property
    def n_users(self) -> int:
        return self.direct.shape[0]

    @property
    def n_reflecting(self) -> int:
        return self.stacked_h.shape[0]

    def unstack_h(self) -> list[np.ndarray]:
        """Split ``stacked_h`` back into per-surface row blocks."""
        edges = np.cumsum([b.shape[0] for b in self.bs_surf])[:-1]
        return np.split(self.stacked_h, edges, axis=0) if self.bs_surf else []


def large_scale_gains(
    config: SystemConfig, geometry: DropGeometry, rng: np.random.Generator
) -> LargeScaleGains:
    L_bs = cost_hata_constant(config.carrier_freq_mhz, config.bs_height_m, config.ue_height_m)
    L_surf = cost_hata_constant(
        config.carrier_freq_mhz, config.surface_height_m, config.ue_height_m
    )
    d0, d1 = config.breakpoint_d0_km, config.breakpoint_d1_km

    pl_k = three_slope_pathloss_db(geometry.user_distances() / 1000.0, L_bs, d0, d1)
    bs_ue = np.atleast_1d(shadowed_gain(pl_k, config.shadow_sigma_db, rng))

    d_sk = geometry.surface_user_distances().reshape(config.n_surfaces, config.n_users)
    pl_sk = three_slope_pathloss_db(d_sk / 1000.0, L_surf, d0, d1)
    surf_ue = np.asarray(shadowed_gain(pl_sk, config.shadow_sigma_db, rng)).reshape(d_sk.shape)

    if config.bs_surface_pathloss == "unit":
        bs_surf = np.ones(config.n_surfaces)
    else:
        bs_surf = np.atleast_1d(
            los_pathloss_linear(
                geometry.surface_distances(), config.los_ref_loss_db, config.los_exponent
            )
        )
    return LargeScaleGains(bs_ue, surf_ue, bs_surf)


def realize_channels(
    config: SystemConfig, geometry: DropGeometry, rng: np.random.Generator
) -> ChannelRealization:
    """Draw every channel of one drop from ``rng``.

    Draw order is fixed (large-scale gains, direct links, then per surface the
    surface-user block followed by the BS-surface matrix) so a realization is
    a pure function of the generator state.
    """
    K, Nb = config.n_users, config.n_bs_antennas
    gains = large_scale_gains(config, geometry, rng)
    direct = np.sqrt(gains.bs_ue_var)[:, None] * _cn01(rng, (K, Nb))
    surf_ue, bs_surf = [], []
    for s, ns in enumerate(config.elements_per_surface):
        surf_ue.append(np.sqrt(gains.surf_ue_var[s])[:, None] * _cn01(rng, (K, ns)))
        bs_surf.append(rician_matrix(ns, Nb, gains.bs_surf_var[s], config.rician_factor, rng))
    return ChannelRealization.from_blocks(direct, surf_ue, bs_surf)


def _encode(a: np.ndarray) -> list:
    flat = np.asarray(a, dtype=complex).ravel().tolist()  # row-major, Python complex
    return [f"{z.real!r},{z.imag!r}" for z in flat]


def _decode(entries: list, shape) -> np.ndarray:
    vals = [complex(*map(float, e.split(","))) for e in entries]
    return np.array(vals, dtype=complex).reshape(shape)


def dump_realization(real: ChannelRealization, path: str | Path) -> None:
    """Write a realization as JSON; complex entries are ``"re,im"`` strings, row-major."""
    doc = {
        "direct": {"shape": list(real.direct.shape), "data": _encode(real.direct)},
        "surf_ue": [{"shape": list(x.shape), "data": _encode(x)} for x in real.surf_ue],
        "bs_surf": [{"shape": list(x.shape), "data": _encode(x)} for x in real.bs_surf],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_realization(path: str | Path) -> ChannelRealization:
    doc = json.loads(Path(path).read_text())

    def dec(block):
        return _decode(block["data"], block["shape"])

    return ChannelRealization.from_blocks(
        dec(doc["direct"]),
        [dec(b) for b in doc["surf_ue"]],
        [dec(b) for b in doc["bs_surf"]],
    )
