"""Monte Carlo experiment driver and command-line entry point.

Every drop draws one geometry and one channel realization, then evaluates all
requested schemes on that same realization (paired comparison).
"""

from __future__ import annotations

import argparse
import csv
import functools
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .baselines import noma_rates, rps_rate, tdma_rate_no_irs
from .beamforming import alternating_optimize, effective_channel, mrt
from .channel import dump_realization, realize_channels
from .metrics import CdfSummary, DropResult, empirical_cdf, noise_power, summarize, user_rate
from .reflection import DiscretePhaseSet, quantize_mid_tread
from .scenario import (
    STREAM_CHANNEL,
    STREAM_RANDOM_PHASES,
    ConfigError,
    SystemConfig,
    config_from_mapping,
    drop_rng,
    load_config,
    sample_geometry,
)

__all__ = [
    "Scheme",
    "SimulationError",
    "ExperimentSpec",
    "parse_schemes",
    "evaluate_drop",
    "run_experiment",
    "write_results",
    "main",
    "DEFAULT_SCHEMES",
]

log = logging.getLogger(__name__)

DEFAULT_SCHEMES = "TDMA,NOMA,RPS,DPS-1bit,DPS-2bit,CPS"


class SimulationError(RuntimeError):
    """A drop produced a non-finite rate or results could not be written."""


@dataclass(frozen=True)
class Scheme:
    """One evaluated scheme; ``bits`` is 0 for continuous or surface-free schemes."""

    kind: str  # TDMA, NOMA, RPS, DPS, CPS
    bits: int = 0

    @property
    def name(self) -> str:
        if self.kind in ("RPS", "DPS") and self.bits:
            return f"{self.kind}-{self.bits}bit"
        return self.kind

    def __str__(self) -> str:
        return self.name


_SCHEME_RE = re.compile(r"^(TDMA|NOMA|CPS|RPS|DPS)(?:-(\d+)BIT|-(CONTINUOUS|DISCRETE))?$")


def parse_schemes(text: str | Sequence[str], default_bits: int = 1) -> tuple[Scheme, ...]:
    """Parse a comma list such as ``"TDMA,RPS,DPS-2bit,CPS"``.

    ``DPS`` and ``RPS-discrete`` take ``default_bits``; ``RPS`` and
    ``RPS-continuous`` draw continuous phases. Duplicates are dropped.
    """
    tokens = text.split(",") if isinstance(text, str) else list(text)
    out: list[Scheme] = []
    for raw in tokens:
        tok = raw.strip().upper()
        if not tok:
            continue
        m = _SCHEME_RE.match(tok)
        if not m:
            raise ConfigError(f"unknown scheme {raw.strip()!r}")
        kind, bits, variant = m.group(1), m.group(2), m.group(3)
        if bits is not None and int(bits) < 1:
            raise ConfigError(f"{raw.strip()}: bit count must be >= 1")
        if kind in ("TDMA", "NOMA", "CPS"):
            if bits or variant:
                raise ConfigError(f"scheme {kind} takes no qualifier")
            scheme = Scheme(kind)
        elif kind == "DPS":
            if variant:
                raise ConfigError("DPS takes a bit count, e.g. DPS-2bit")
            scheme = Scheme(kind, int(bits) if bits else default_bits)
        else:
            if bits:
                scheme = Scheme(kind, int(bits))
            elif variant == "DISCRETE":
                scheme = Scheme(kind, default_bits)
            else:
                scheme = Scheme(kind)
        if scheme not in out:
            out.append(scheme)
    if not out:
        raise ConfigError("at least one scheme is required")
    return tuple(out)


@dataclass(frozen=True)
class ExperimentSpec:
    config: SystemConfig
    schemes: tuple[Scheme, ...] = field(default_factory=lambda: parse_schemes(DEFAULT_SCHEMES))
    output_dir: Path | None = None
    emit_cdf: bool = False

    def __post_init__(self):
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        if isinstance(self.schemes, str):
            object.__setattr__(
                self, "schemes", parse_schemes(self.schemes, self.config.quantizer_bits)
            )


def evaluate_drop(config: SystemConfig, drop_index: int, schemes: Sequence[Scheme]) -> list[DropResult]:
    """All requested schemes on one shared realization of drop ``drop_index``."""
    geometry = sample_geometry(config, drop_index)
    real = realize_channels(config, geometry, drop_rng(config.master_seed, drop_index, STREAM_CHANNEL))
    noise = noise_power(config.bandwidth_hz, config.temperature_k, config.noise_figure_db)
    P, K = config.tx_power_watts, config.n_users
    H = real.stacked_h

    ao = None
    if any(s.kind in ("CPS", "DPS") for s in schemes):
        ao = []
        for k in range(K):
            res = alternating_optimize(real.stacked_g[k], H, real.direct[k], config.ao_iterations)
            if res.degenerate:
                log.warning("drop %d user %d: all-zero effective channel", drop_index, k)
            ao.append(res)

    results = []
    for scheme in schemes:
        if scheme.kind == "TDMA":
            rates = tdma_rate_no_irs(real.direct, P, noise)
        elif scheme.kind == "NOMA":
            rates = noma_rates(real.direct, P, noise, config.noma_gain)
        elif scheme.kind == "CPS":
            rates = [
                user_rate(effective_channel(real.stacked_g[k], ao[k].phases, H, real.direct[k]), ao[k].w, P, noise, K)
                for k in range(K)
            ]
        elif scheme.kind == "DPS":
            phase_set = DiscretePhaseSet(scheme.bits)
            rates = []
            for k in range(K):
                q = quantize_mid_tread(ao[k].phases, phase_set)
                eff = effective_channel(real.stacked_g[k], q, H, real.direct[k])
                rates.append(user_rate(eff, mrt(eff), P, noise, K))
        else:  # RPS
            phase_set = DiscretePhaseSet(scheme.bits) if scheme.bits else None
            rates = [
                rps_rate(
                    real.stacked_g[k], H, real.direct[k], phase_set, P, noise, K,
                    drop_rng(config.master_seed, drop_index, STREAM_RANDOM_PHASES, scheme.bits, k),
                )
                for k in range(K)
            ]
        result = DropResult.from_rates(drop_index, scheme.name, rates)
        if not np.all(np.isfinite(result.per_user_rates)) or not np.isfinite(result.sum_rate):
            raise SimulationError(f"non-finite rate in drop {drop_index}, scheme {scheme.name}")
        results.append(result)
    return results


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> tuple[list[DropResult], list[CdfSummary]]:
    """Evaluate every drop and summarize per scheme.

    Output is independent of ``workers``: each drop owns its random streams and
    results are ordered by drop index, then by requested scheme order.
    """
    config = spec.config
    job = functools.partial(evaluate_drop, config, schemes=spec.schemes)
    drops = range(config.n_drops)
    if workers <= 1:
        per_drop = [job(d) for d in drops]
    else:
        chunk = max(1, config.n_drops // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_drop = list(pool.map(job, drops, chunksize=chunk))
    per_drop.sort(key=lambda rs: rs[0].drop_index)
    results = [r for rs in per_drop for r in rs]
    summaries = summarize(results, [s.name for s in spec.schemes])
    return results, summaries


def write_results(
    results: Sequence[DropResult],
    summaries: Sequence[CdfSummary],
    output_dir: str | Path,
    emit_cdf: bool = False,
) -> list[Path]:
    """Write ``drops.csv``, ``summary.csv`` and optionally ``cdf_<scheme>.csv`` files."""
    if not results:
        raise ValueError("no results to write")
    out = Path(output_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / "drops.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["drop", "scheme", "sum_rate_bpshz"])
            for r in results:
                w.writerow([r.drop_index, r.scheme, f"{r.sum_rate:.6f}"])
        written.append(path)

        path = out / "summary.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scheme", "samples", "p5_bpshz", "p50_bpshz"])
            for s in summaries:
                w.writerow([s.scheme, s.samples, f"{s.p5:.6f}", f"{s.p50:.6f}"])
        written.append(path)

        if emit_cdf:
            for s in summaries:
                values, cdf = empirical_cdf([r.sum_rate for r in results if r.scheme == s.scheme])
                path = out / f"cdf_{s.scheme}.csv"
                with path.open("w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["sum_rate_bpshz", "cdf"])
                    for v, c in zip(values, cdf):
                        w.writerow([f"{v:.6f}", f"{c:.6f}"])
                written.append(path)
    except OSError as exc:
        raise SimulationError(f"cannot write results to {exc.filename or out}: {exc.strerror or exc}") from exc
    return written


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="irvsim",
        description="Sum spectral efficiency of an IRVS-aided vehicular downlink (Monte Carlo).",
    )
    p.add_argument("--config", type=Path, help="flat YAML/JSON file with SystemConfig fields")
    p.add_argument("--drops", type=int, help="number of Monte Carlo drops")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--users", type=int, help="number of users K")
    p.add_argument("--surfaces", type=int, help="number of surfaces S")
    p.add_argument("--elements", type=int, help="reflecting elements per surface N_s")
    p.add_argument("--bits", type=int, help="phase bits for bare DPS / RPS-discrete")
    p.add_argument("--schemes", default=DEFAULT_SCHEMES, help=f"comma list (default {DEFAULT_SCHEMES})")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--emit-cdf", action="store_true", help="also write cdf_<scheme>.csv files")
    p.add_argument("--dump-channel", type=int, metavar="DROP", help="write the channel realization of DROP as JSON")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = dict(
        n_drops=args.drops,
        master_seed=args.seed,
        n_users=args.users,
        n_surfaces=args.surfaces,
        elements_per_surface=args.elements,
        quantizer_bits=args.bits,
    )
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.config is not None:
            config = load_config(args.config, **overrides)
        else:
            config = config_from_mapping({}, **overrides)
        schemes = parse_schemes(args.schemes, config.quantizer_bits)
    except ConfigError as exc:
        print(f"irvsim: configuration error: {exc}", file=sys.stderr)
        return 2

    spec = ExperimentSpec(config, schemes, args.out, args.emit_cdf)
    log.info("backend=%s drops=%d K=%d S=%d", _kernels.BACKEND, config.n_drops, config.n_users, config.n_surfaces)
    try:
        if args.dump_channel is not None:
            d = args.dump_channel
            real = realize_channels(
                config, sample_geometry(config, d), drop_rng(config.master_seed, d, STREAM_CHANNEL)
            )
            args.out.mkdir(parents=True, exist_ok=True)
            dump_realization(real, args.out / f"channel_drop{d}.json")
        t0 = time.perf_counter()
        results, summaries = run_experiment(spec, workers=args.workers)
        write_results(results, summaries, args.out, args.emit_cdf)
    except (SimulationError, IndexError, OSError) as exc:
        print(f"irvsim: error: {exc}", file=sys.stderr)
        return 1

    print(f"{'scheme':<10} {'95%-likely':>11} {'median':>9}   [bps/Hz, {config.n_drops} drops, {time.perf_counter() - t0:.1f} s]")
    for s in summaries:
        print(f"{s.scheme:<10} {s.p5:>11.2f} {s.p50:>9.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
