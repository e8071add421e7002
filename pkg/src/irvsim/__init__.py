"""Monte Carlo simulator for downlinks aided by reflecting surfaces mounted on vehicles."""

from ._kernels import BACKEND
from .beamforming import AoResult, alternating_optimize, effective_channel, mrt, optimal_phases_given_w
from .channel import ChannelRealization, realize_channels
from .metrics import CdfSummary, DropResult, noise_power, percentile
from .reflection import DiscretePhaseSet, quantize_mid_tread, random_phases
from .runner import ExperimentSpec, parse_schemes, run_experiment, write_results
from .scenario import DropGeometry, SystemConfig, load_config, sample_geometry

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AoResult",
    "alternating_optimize",
    "effective_channel",
    "mrt",
    "optimal_phases_given_w",
    "ChannelRealization",
    "realize_channels",
    "CdfSummary",
    "DropResult",
    "noise_power",
    "percentile",
    "DiscretePhaseSet",
    "quantize_mid_tread",
    "random_phases",
    "ExperimentSpec",
    "parse_schemes",
    "run_experiment",
    "write_results",
    "DropGeometry",
    "SystemConfig",
    "load_config",
    "sample_geometry",
]
