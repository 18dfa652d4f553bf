import math

import numpy as np
import pytest

from dpbdris.channel import LoS, Rayleigh, SystemConfig
from dpbdris.closedform import ArchClass, Scenario, finite_gain, scaling_law
from dpbdris.montecarlo import (EstimateReport, estimate_gain, estimate_gain_rician,
                                estimate_gain_rician_report, estimate_mean_power, judge,
                                scenario_config, trial_powers, verify_scaling_law)
from dpbdris.scattering import RisArchitecture

TRIALS = 100_000


def test_report_stderr_definition():
    cfg = SystemConfig(4, 0.5)
    arch = RisArchitecture.single(4)
    rep = estimate_mean_power(cfg, arch, 5000, seed=1)
    powers = trial_powers(cfg, [arch], 5000, 1)[0]
    assert rep.mean == pytest.approx(powers.mean(), rel=1e-13)
    assert rep.stderr == pytest.approx(powers.std(ddof=1) / math.sqrt(5000), rel=1e-10)
    assert rep.target is None and rep.verdict is None


def test_single_trial_has_zero_stderr():
    rep = estimate_mean_power(SystemConfig(4, 0.5), RisArchitecture.fully(4), 1, seed=0)
    assert rep.stderr == 0.0


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        estimate_mean_power(SystemConfig(4, 0.5), RisArchitecture.fully(4), 0, seed=0)


def test_architecture_size_must_match():
    with pytest.raises(ValueError):
        estimate_mean_power(SystemConfig(4, 0.5), RisArchitecture.fully(6), 10, seed=0)


@pytest.mark.parametrize("arch", [RisArchitecture.single(8), RisArchitecture.fully(8),
                                  RisArchitecture.parse("1,5;2,6", 8)], ids=str)
def test_los_opposite_power_is_deterministic(arch):
    cfg = SystemConfig(8, 0.3, tx_pol="V", rx_pol="H", fading=LoS())
    rep = estimate_mean_power(cfg, arch, 2000, seed=4)
    assert rep.stderr <= 1e-12 * rep.mean


def test_uni_rayleigh_single_n16():
    cfg = SystemConfig(16, 1.0)
    rep = estimate_mean_power(cfg, RisArchitecture.single(16), TRIALS, seed=0)
    target = 16 + 16 * 15 * math.pi ** 2 / 16
    assert abs(rep.mean - target) <= 3 * rep.stderr


def test_same_rayleigh_fully_n16():
    cfg = SystemConfig(16, 0.5)
    rep = estimate_mean_power(cfg, RisArchitecture.fully(16), TRIALS, seed=0)
    assert abs(rep.mean - 144.0) <= 3 * rep.stderr


def test_verify_examples():
    rep = verify_scaling_law("opposite-rayleigh", "single", 32, 0.3, TRIALS, seed=2)
    assert rep.target == pytest.approx(0.3 * (32 + 32 * 31 * math.pi ** 2 / 16))
    assert rep.target == pytest.approx(193.2, abs=0.05)
    assert rep.passed

    rep = verify_scaling_law("opposite-los", "fully", 64, 0.1, 1, seed=0)
    assert rep.passed and rep.target == pytest.approx(1239.04)
    assert rep.mean == pytest.approx(1239.04, rel=1e-12)

    rep = verify_scaling_law("same-rayleigh", "fully", 8, 0.0, TRIALS, seed=3)
    assert rep.target == 16.0 and rep.passed


def test_verify_rejects_laws_without_closed_form():
    with pytest.raises(ValueError):
        verify_scaling_law("opposite-rician", "single", 8, 0.5, 10, 0)
    with pytest.raises(TypeError):
        verify_scaling_law(object(), "single", 8, 0.5, 10, 0)


def test_negative_control_fails():
    rep = verify_scaling_law("same-rayleigh", "single", 16, 0.5, 20_000, 0, law_scale=1.1)
    assert rep.verdict == "fail"


def test_judge_rule():
    rep = EstimateReport(mean=101.0, stderr=0.1, trials=10, seed=0)
    assert judge(rep, 100.0, rel_tol=0.01).passed
    assert not judge(rep, 100.0, rel_tol=0.005).passed
    assert judge(EstimateReport(101.0, 0.4, 10, 0), 100.0, rel_tol=0.0).passed


def test_reproducible_bit_identical():
    cfg = SystemConfig(8, 0.4, rx_pol="H")
    arch = RisArchitecture.parse("1,5;2,6", 8)
    a = estimate_mean_power(cfg, arch, 10_000, seed=17)
    b = estimate_mean_power(cfg, arch, 10_000, seed=17)
    assert a == b
    assert estimate_mean_power(cfg, arch, 10_000, seed=18) != a


def test_parallel_equivalence():
    cfg = SystemConfig(8, 0.4, rx_pol="H")
    arch = RisArchitecture.single(8)
    serial = estimate_mean_power(cfg, arch, 20_000, seed=5)
    parallel = estimate_mean_power(cfg, arch, 20_000, seed=5, workers=4)
    assert serial == parallel


def test_prefix_stability():
    # trial t depends only on (seed, t): a shorter run is a prefix of a longer one
    cfg = SystemConfig(4, 0.4)
    arch = RisArchitecture.single(4)
    short = trial_powers(cfg, [arch], 5000, 9)[0]
    long = trial_powers(cfg, [arch], 9000, 9)[0]
    assert np.array_equal(short[:4096], long[:4096])


def test_gain_estimate_standard_error_is_calibrated():
    cfg = scenario_config(Scenario.parse("opposite-rayleigh"), 16, 0.3)
    ratios = [estimate_gain(cfg, 2000, seed=s).ratio for s in range(40)]
    est = estimate_gain(cfg, 2000, seed=100)
    spread = np.std(ratios, ddof=1)
    assert 0.7 * spread < est.stderr < 1.4 * spread


def test_rician_zero_matches_rayleigh_ratio():
    n, chi = 64, 0.2
    rep = estimate_gain_rician_report(0.0, chi, n, TRIALS, seed=1)
    ray = finite_gain(Scenario.parse("opposite-rayleigh"), n, chi)
    assert abs(rep.ratio - ray) <= 3 * rep.stderr


def test_rician_large_k_approaches_los():
    g = estimate_gain_rician(1e4, 0.2, 64, 20_000, seed=1)
    assert g == pytest.approx(1.2 ** 2 / (4 * 0.2), rel=0.02)


def test_rician_gain_decreases_with_k():
    reps = [estimate_gain_rician_report(k, 0.2, 64, 50_000, seed=3) for k in (0.5, 2.0, 8.0)]
    for lo, hi in zip(reps, reps[1:]):
        assert lo.ratio >= hi.ratio - 3 * math.hypot(lo.stderr, hi.stderr)


def test_rician_division_guard():
    cfg = SystemConfig(8, 0.0, tx_pol="V", rx_pol="H", fading=LoS())
    assert estimate_gain(cfg, 10, seed=0).ratio == math.inf


@pytest.mark.parametrize("name,arch_class", [("uni-rayleigh", "single"), ("same-rayleigh", "single"),
                                             ("opposite-rayleigh", "fully")])
def test_estimates_track_laws(name, arch_class):
    sc = Scenario.parse(name)
    rep = estimate_mean_power(scenario_config(sc, 8, 0.6), RisArchitecture.single(8)
                              if arch_class == "single" else RisArchitecture.fully(8), 50_000, 8)
    law = scaling_law(sc, ArchClass(arch_class), 8, 0.6)
    assert abs(rep.mean - law) <= max(3 * rep.stderr, 0.01 * law)


def test_scenario_config_uni_forces_chi_one():
    cfg = scenario_config(Scenario.parse("uni-rayleigh"), 8, 0.2)
    assert cfg.chi == 1.0 and isinstance(cfg.fading, Rayleigh)
