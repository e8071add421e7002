"""Acceptance criteria, one test per criterion.

Each test records a single ``[PASS]``/``[FAIL]`` line that is printed in the
"acceptance criteria" section of the pytest terminal summary, then asserts.
"""

import math

import numpy as np
import pytest

from conftest import cn
from oracles import grid_maximum
from irvsim.baselines import noma_allocation
from irvsim.beamforming import alternating_optimize, effective_channel, mrt, optimal_phases_given_w
from irvsim.channel import cost_hata_constant, realize_channels, three_slope_pathloss_db
from irvsim.metrics import noise_power
from irvsim.reflection import DiscretePhaseSet, quantize_mid_tread, reflection_coefficients
from irvsim.runner import ExperimentSpec, parse_schemes, run_experiment, write_results
from irvsim.scenario import STREAM_CHANNEL, SystemConfig, drop_rng, sample_geometry

ORDER = ["TDMA", "NOMA", "RPS", "DPS-1bit", "DPS-2bit", "CPS"]

# reference sum rates in bps/Hz: (95%-likely, median)
REFERENCE_K2 = {
    "TDMA": (1.98, 5.23),
    "NOMA": (2.21, 6.62),
    "RPS": (8.78, 12.67),
    "DPS-1bit": (15.42, 19.15),
    "DPS-2bit": (16.43, 20.17),
    "CPS": (16.82, 20.49),
}
REFERENCE_K20_CPS_MEDIAN = 24.33


def _ascending(stats, order):
    return all(stats[a] < stats[b] for a, b in zip(order, order[1:]))


def _run(config, workers=1):
    spec = ExperimentSpec(config, parse_schemes(",".join(ORDER)))
    return run_experiment(spec, workers=workers)


@pytest.fixture(scope="session")
def k2_config():
    return SystemConfig(n_users=2, n_surfaces=2, elements_per_surface=200, n_drops=1000, master_seed=0)


@pytest.fixture(scope="session")
def k2_run(k2_config):
    return _run(k2_config)


@pytest.fixture(scope="session")
def k2_summary(k2_run):
    return {s.scheme: s for s in k2_run[1]}


def test_criterion_1_two_user_table(k2_summary, report):
    failures = []
    for name, (p5_ref, p50_ref) in REFERENCE_K2.items():
        s = k2_summary[name]
        for label, got, ref in (("p5", s.p5, p5_ref), ("p50", s.p50, p50_ref)):
            if abs(got - ref) > 0.25 * ref:
                failures.append(f"{name} {label} {got:.2f} vs {ref}")
    p5 = {n: s.p5 for n, s in k2_summary.items()}
    p50 = {n: s.p50 for n, s in k2_summary.items()}
    ref_p5_order = sorted(REFERENCE_K2, key=lambda n: REFERENCE_K2[n][0])
    ref_p50_order = sorted(REFERENCE_K2, key=lambda n: REFERENCE_K2[n][1])
    if not _ascending(p5, ref_p5_order):
        failures.append("95%-likely ordering differs")
    if not _ascending(p50, ref_p50_order):
        failures.append("median ordering differs")
    table = " ".join(f"{n}={p5[n]:.2f}/{p50[n]:.2f}" for n in ORDER)
    ok = not failures
    report("criterion 1 (K=2 table within 25%, exact ordering)", ok, table + ("" if ok else " | " + "; ".join(failures)))
    assert ok, failures


def test_criterion_2_twenty_user_ordering(report):
    config = SystemConfig(n_users=20, n_surfaces=5, elements_per_surface=200, n_drops=500, master_seed=0)
    summary = {s.scheme: s for s in _run(config)[1]}
    p5 = {n: s.p5 for n, s in summary.items()}
    p50 = {n: s.p50 for n, s in summary.items()}
    cps = p50["CPS"]
    checks = {
        "95%-likely ordering": _ascending(p5, ORDER),
        "median ordering": _ascending(p50, ORDER),
        f"CPS median {cps:.2f} within 25% of {REFERENCE_K20_CPS_MEDIAN}": abs(cps - REFERENCE_K20_CPS_MEDIAN)
        <= 0.25 * REFERENCE_K20_CPS_MEDIAN,
    }
    ok = all(checks.values())
    table = " ".join(f"{n}={p5[n]:.2f}/{p50[n]:.2f}" for n in ORDER)
    failed = [k for k, v in checks.items() if not v]
    report("criterion 2 (K=20, S=5 ordering and CPS median)", ok, table + ("" if ok else " | failed: " + "; ".join(failed)))
    assert ok, failed


def test_criterion_3_quantization_gaps(k2_summary, report):
    m = {n: s.p50 for n, s in k2_summary.items()}
    # gaps measured from the 1-bit scheme: to continuous phases, and to 2 bits
    gap_continuous = m["CPS"] - m["DPS-1bit"]
    gap_2bit = m["DPS-2bit"] - m["DPS-1bit"]
    ok = gap_continuous > gap_2bit > 0
    report(
        "criterion 3 (median CPS-DPS1 > DPS2-DPS1 > 0)",
        ok,
        f"CPS-DPS1={gap_continuous:.3f}, DPS2-DPS1={gap_2bit:.3f}, CPS-DPS2={m['CPS'] - m['DPS-2bit']:.3f}",
    )
    assert ok


def _quantization_bound(g, H, f, phases_beam, levels):
    """Lower bound on the quantized objective from the beam the phases were aligned to."""
    direct = abs(f @ phases_beam)
    reflected = np.sum(np.abs(g * (H @ phases_beam)))
    return (direct + math.cos(math.pi / levels) * reflected) ** 2


def test_criterion_4_brute_force_oracle(report):
    rng = np.random.default_rng(4040)
    n_instances = 200
    short_continuous, bad_discrete, bad_bound = [], [], []
    three_iter_short = 0
    worst = 0.0
    for i in range(n_instances):
        nb, nr = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        g, H, f = cn(rng, nr), cn(rng, nr, nb), cn(rng, nb)
        grid_best, _ = grid_maximum(g, H, f, 200)

        ao = alternating_optimize(g, H, f, iterations=1000, tol=1e-12)
        rel = (grid_best - ao.objective) / grid_best
        worst = max(worst, rel)
        if rel > 1e-3:
            short_continuous.append(i)
        if alternating_optimize(g, H, f).objective < grid_best * (1 - 1e-3):
            three_iter_short += 1
        continuous_best = max(grid_best, ao.objective)

        n_iter = len(ao.objective_trace)
        beam = mrt(f) if n_iter == 1 else alternating_optimize(g, H, f, iterations=n_iter - 1).w
        for bits in (1, 2):
            ps = DiscretePhaseSet(bits)
            q = quantize_mid_tread(ao.phases, ps)
            dps = float(np.linalg.norm(effective_channel(g, q, H, f)) ** 2)
            discrete_best, _ = grid_maximum(g, H, f, ps.levels)
            if dps > discrete_best * (1 + 1e-12) or dps > continuous_best + 1e-9:
                bad_discrete.append((i, bits))
            if dps < _quantization_bound(g, H, f, beam, ps.levels) * (1 - 1e-12):
                bad_bound.append((i, bits))

    ok = not (short_continuous or bad_discrete or bad_bound)
    detail = (
        f"{n_instances} instances; converged AO worst shortfall vs grid {max(worst, 0.0):.2e} "
        f"({len(short_continuous)} over 1e-3); discrete violations {len(bad_discrete)}; "
        f"bound violations {len(bad_bound)}; 3-iteration AO short on {three_iter_short}"
    )
    report("criterion 4 (brute-force oracle on tiny instances)", ok, detail)
    assert ok, (short_continuous, bad_discrete, bad_bound)


def test_criterion_5_invariants(k2_config, k2_run, report):
    failures = []

    # per-drop dominance on the shared realizations of criterion 1
    by_drop = {}
    for r in k2_run[0]:
        by_drop.setdefault(r.drop_index, {})[r.scheme] = r.sum_rate
    for d, rates in by_drop.items():
        if not (rates["CPS"] >= rates["DPS-1bit"] and rates["CPS"] >= rates["DPS-2bit"] and rates["CPS"] >= rates["RPS"]):
            failures.append(f"drop {d}: CPS below DPS or RPS")

    phase_sets = [DiscretePhaseSet(1), DiscretePhaseSet(2)]
    config = k2_config
    for d in range(config.n_drops):
        real = realize_channels(config, sample_geometry(config, d), drop_rng(config.master_seed, d, STREAM_CHANNEL))
        alloc = noma_allocation(real.direct)
        if abs(math.fsum(alloc.coefficients) - 1.0) > 1e-12:
            failures.append(f"drop {d}: NOMA coefficients sum {math.fsum(alloc.coefficients)}")
        for k in range(config.n_users):
            g, f = real.stacked_g[k], real.direct[k]
            ao = alternating_optimize(g, real.stacked_h, f, config.ao_iterations)
            t = ao.objective_trace
            if np.any(np.diff(t) < -1e-12 * t[1:]):
                failures.append(f"drop {d} user {k}: objective decreased")
            if abs(np.linalg.norm(ao.w) - 1.0) > 1e-12:
                failures.append(f"drop {d} user {k}: beam norm {np.linalg.norm(ao.w)}")
            if np.max(np.abs(np.abs(reflection_coefficients(ao.phases)) - 1.0)) > 1e-12:
                failures.append(f"drop {d} user {k}: coefficient modulus")
            phases = optimal_phases_given_w(g, real.stacked_h, f, ao.w)
            lhs = abs(effective_channel(g, phases, real.stacked_h, f) @ ao.w)
            rhs = abs(f @ ao.w) + np.sum(np.abs(g * (real.stacked_h @ ao.w)))
            if abs(lhs - rhs) > 1e-9 * rhs:
                failures.append(f"drop {d} user {k}: alignment residual {abs(lhs - rhs) / rhs:.1e}")
            for ps in phase_sets:
                q = quantize_mid_tread(ao.phases, ps)
                err = np.abs(np.angle(np.exp(1j * (ao.phases - q))))
                if not (np.all(ps.contains(q)) and np.array_equal(quantize_mid_tread(q, ps), q)
                        and np.all(err <= ps.step / 2 + 1e-12)):
                    failures.append(f"drop {d} user {k}: quantizer property ({ps.bits} bit)")

    L = cost_hata_constant(config.carrier_freq_mhz, config.bs_height_m, config.ue_height_m)
    for bp in (config.breakpoint_d0_km, config.breakpoint_d1_km):
        jump = abs(three_slope_pathloss_db(bp, L) - three_slope_pathloss_db(np.nextafter(bp, 1.0), L))
        if jump > 1e-9:
            failures.append(f"path loss jumps {jump} dB at {bp} km")
    n = noise_power(config.bandwidth_hz, config.temperature_k, config.noise_figure_db)
    if abs(n - 6.36e-13) > 0.005 * 6.36e-13:
        failures.append(f"noise power {n}")

    ok = not failures
    report(
        "criterion 5 (invariants over 1000 drops)",
        ok,
        f"{config.n_drops} drops x {config.n_users} users, noise {n:.4e} W" + ("" if ok else " | " + "; ".join(failures[:5])),
    )
    assert ok, failures[:20]


def test_criterion_6_determinism(k2_config, k2_run, tmp_path, report):
    first = tmp_path / "first"
    second = tmp_path / "second"
    parallel = tmp_path / "parallel"
    write_results(*k2_run, first)
    write_results(*_run(k2_config), second)
    write_results(*_run(k2_config, workers=8), parallel)
    a = (first / "drops.csv").read_bytes()
    b = (second / "drops.csv").read_bytes()
    c = (parallel / "drops.csv").read_bytes()
    summaries_equal = (first / "summary.csv").read_bytes() == (parallel / "summary.csv").read_bytes()
    ok = a == b and a == c and summaries_equal
    report(
        "criterion 6 (byte-identical reruns, 1 vs 8 workers)",
        ok,
        f"drops.csv {len(a)} bytes; rerun {'identical' if a == b else 'differs'}; "
        f"8 workers {'identical' if a == c and summaries_equal else 'differs'}",
    )
    assert ok
