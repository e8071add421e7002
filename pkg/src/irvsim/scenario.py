"""Simulation configuration, drop geometry and per-drop random streams."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

__all__ = [
    "ConfigError",
    "SystemConfig",
    "DropGeometry",
    "load_config",
    "drop_rng",
    "sample_geometry",
    "planar_distance",
    "STREAM_GEOMETRY",
    "STREAM_CHANNEL",
    "STREAM_RANDOM_PHASES",
]

# Stream tags for the per-drop seed tree.
STREAM_GEOMETRY = 0
STREAM_CHANNEL = 1
STREAM_RANDOM_PHASES = 2

BS_SURFACE_MODELS = ("unit", "power_law")
NOMA_GAIN_MODELS = ("common", "per_beam")


class ConfigError(ValueError):
    """Raised for an invalid or unreadable configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of one IRVS-aided downlink experiment.

    Defaults describe the two-user, two-surface setup. ``elements_per_surface``
    may be given as a single integer, which is broadcast to every surface.
    """

    n_bs_antennas: int = 16
    n_users: int = 2
    n_surfaces: int = 2
    elements_per_surface: tuple[int, ...] | int = 200
    tx_power_watts: float = 20.0
    bandwidth_hz: float = 20e6
    carrier_freq_mhz: float = 1900.0
    bs_height_m: float = 5.0
    surface_height_m: float = 3.0
    ue_height_m: float = 1.65
    area_m: float = 1000.0
    bs_position: tuple[float, float] = (500.0, 500.0)
    breakpoint_d0_km: float = 0.01
    breakpoint_d1_km: float = 0.05
    shadow_sigma_db: float = 8.0
    rician_factor: float = 5.0
    los_ref_loss_db: float = -30.0
    los_exponent: float = 2.5
    noise_figure_db: float = 9.0
    temperature_k: float = 290.0
    quantizer_bits: int = 1
    ao_iterations: int = 3
    n_drops: int = 1000
    master_seed: int = 0
    # "unit" reproduces the reference sum rates; "power_law" uses los_ref_loss_db * d^-los_exponent
    bs_surface_pathloss: str = "unit"
    # "common": every NOMA layer is seen with the receiver's own matched gain ||f_k||^2
    noma_gain: str = "common"

    def __post_init__(self) -> None:
        eps = self.elements_per_surface
        if isinstance(eps, (int, np.integer)):
            eps = (int(eps),) * self.n_surfaces
        else:
            eps = tuple(int(n) for n in eps)
            if len(eps) == 1 and self.n_surfaces != 1:
                eps = eps * self.n_surfaces
        object.__setattr__(self, "elements_per_surface", eps)
        object.__setattr__(self, "bs_position", tuple(float(c) for c in self.bs_position))
        self.validate()

    def validate(self) -> None:
        for name in ("n_bs_antennas", "n_users", "ao_iterations", "n_drops"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.n_surfaces < 0:
            raise ConfigError(f"n_surfaces must be >= 0, got {self.n_surfaces}")
        if len(self.elements_per_surface) != self.n_surfaces:
            raise ConfigError(
                f"elements_per_surface has {len(self.elements_per_surface)} entries "
                f"for {self.n_surfaces} surfaces"
            )
        if any(n < 1 for n in self.elements_per_surface):
            raise ConfigError("every surface needs at least one element")
        if self.quantizer_bits < 1:
            raise ConfigError("quantizer_bits must be >= 1")
        if not self.tx_power_watts > 0:
            raise ConfigError("tx_power_watts must be positive")
        if not self.bandwidth_hz > 0:
            raise ConfigError("bandwidth_hz must be positive")
        if not self.rician_factor >= 0:
            raise ConfigError("rician_factor must be >= 0")
        if not self.breakpoint_d0_km < self.breakpoint_d1_km:
            raise ConfigError("breakpoint_d0_km must be below breakpoint_d1_km")
        if not self.area_m > 0:
            raise ConfigError("area_m must be positive")
        if len(self.bs_position) != 2 or not all(
            0.0 <= c <= self.area_m for c in self.bs_position
        ):
            raise ConfigError(f"bs_position {self.bs_position} outside the area")
        if self.bs_surface_pathloss not in BS_SURFACE_MODELS:
            raise ConfigError(f"bs_surface_pathloss must be one of {BS_SURFACE_MODELS}")
        if self.noma_gain not in NOMA_GAIN_MODELS:
            raise ConfigError(f"noma_gain must be one of {NOMA_GAIN_MODELS}")

    @property
    def n_reflecting(self) -> int:
        """Total number of reflecting elements over all surfaces."""
        return int(sum(self.elements_per_surface))

    def replace(self, **changes: Any) -> "SystemConfig":
        """Copy with some fields changed; re-broadcasts uniform element counts."""
        if "n_surfaces" in changes and "elements_per_surface" not in changes:
            eps = set(self.elements_per_surface)
            if len(eps) > 1:
                raise ConfigError(
                    "cannot change n_surfaces with non-uniform elements_per_surface"
                )
            changes["elements_per_surface"] = eps.pop() if eps else 200
        return dataclasses.replace(self, **changes)


def load_config(path: str | Path, **overrides: Any) -> SystemConfig:
    """Read a flat key/value YAML (or JSON) file into a :class:`SystemConfig`.

    Keyword overrides that are not ``None`` take precedence over file values.
    """
    path = Path(path)
    try:
        with path.open() as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError(f"config file {path} must hold a flat mapping")
    return config_from_mapping(data, **overrides)


def config_from_mapping(data: Mapping[str, Any], **overrides: Any) -> SystemConfig:
    known = {f.name for f in dataclasses.fields(SystemConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values = dict(data)
    values.update({k: v for k, v in overrides.items() if v is not None})
    # a uniform per-surface list from the file must follow an overridden surface count
    eps = values.get("elements_per_surface")
    if "n_surfaces" in values and isinstance(eps, (list, tuple)) and len(set(eps)) == 1:
        values["elements_per_surface"] = int(eps[0])
    try:
        return SystemConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class DropGeometry:
    """Planar positions (meters) of the BS, users and surfaces in one drop."""

    bs: np.ndarray
    users: np.ndarray
    surfaces: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def user_distances(self) -> np.ndarray:
        return planar_distance(self.users, self.bs)

    def surface_distances(self) -> np.ndarray:
        return planar_distance(self.surfaces, self.bs)

    def surface_user_distances(self) -> np.ndarray:
        """Distances with shape (n_surfaces, n_users)."""
        return planar_distance(self.surfaces[:, None, :], self.users[None, :, :])


def planar_distance(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray):
    """Horizontal Euclidean distance; broadcasts over leading axes."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = np.hypot(diff[..., 0], diff[..., 1])
    return float(d) if d.ndim == 0 else d


def drop_rng(master_seed: int, drop_index: int, *tags: int) -> np.random.Generator:
    """Independent generator for ``(master_seed, drop_index, *tags)``.

    The stream depends only on the key, never on how many other streams were
    consumed before, so drops and schemes can be evaluated in any order.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(drop_index),) + tuple(int(t) for t in tags))
    return np.random.Generator(np.random.PCG64(seq))


def sample_geometry(config: SystemConfig, drop_index: int) -> DropGeometry:
    """Uniform user and surface positions over the square area for one drop."""
    if not 0 <= drop_index < config.n_drops:
        raise IndexError(f"drop_index {drop_index} outside [0, {config.n_drops})")
    rng = drop_rng(config.master_seed, drop_index, STREAM_GEOMETRY)
    users = rng.uniform(0.0, config.area_m, size=(config.n_users, 2))
    surfaces = rng.uniform(0.0, config.area_m, size=(config.n_surfaces, 2))
    return DropGeometry(bs=np.array(config.bs_position, dtype=float), users=users, surfaces=surfaces)
