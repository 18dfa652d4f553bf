"""Seeded Monte Carlo estimates of the optimized received power.

Each trial draws a channel realization, applies the optimal scattering matrix
of the architecture (through the closed-form optimum ``max_power``) and
records the power. Trials are drawn in fixed-size blocks with one random
substream per ``(seed, block)``, and the reductions use exactly rounded sums,
so results do not depend on how many workers evaluate the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import LoS, Rayleigh, Rician, SystemConfig, sample_realizations, trial_blocks
from .closedform import ArchClass, Fading, Relation, Scenario, scaling_law
from .scattering import RisArchitecture, max_power

DEFAULT_TRIALS = 100_000
DEFAULT_REL_TOL = 0.01


@dataclass(frozen=True)
class EstimateReport:
    mean: float
    stderr: float
    trials: int
    seed: int
    target: Optional[float] = None
    verdict: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GainEstimate:
    """Ratio of mean fully-connected to mean single-connected power."""

    ratio: float
    stderr: float
    mean_fully: float
    mean_single: float
    trials: int
    seed: int


def _mean_stderr(x: np.ndarray) -> tuple:
    n = x.size
    mean = math.fsum(x) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def trial_powers(config: SystemConfig, archs: Sequence[RisArchitecture], trials: int,
                 seed: int, workers: Optional[int] = None) -> np.ndarray:
    """Optimal power of every architecture in every trial; shape ``(len(archs), trials)``.

    All architectures see the same channel realizations.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    for arch in archs:
        if arch.n_elements != config.n_elements:
            raise ValueError(
                f"architecture has {arch.n_elements} elements, config has {config.n_elements}")

    def run_block(block: int) -> np.ndarray:
        real = sample_realizations(config, trials, seed, block)
        return np.stack([max_power(a, real.h_r, real.h_t, config.tx_power) for a in archs])

    blocks = [b for b, _, _ in trial_blocks(trials)]
    if workers and workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, blocks))
    else:
        parts = [run_block(b) for b in blocks]
    return np.concatenate(parts, axis=1)


def estimate_mean_power(config: SystemConfig, arch: RisArchitecture, trials: int,
                        seed: int, workers: Optional[int] = None) -> EstimateReport:
    powers = trial_powers(config, [arch], trials, seed, workers)[0]
    mean, stderr = _mean_stderr(powers)
    return EstimateReport(mean=mean, stderr=stderr, trials=trials, seed=seed)


def judge(report: EstimateReport, target: float, rel_tol: float = DEFAULT_REL_TOL) -> EstimateReport:
    """Attach ``target`` and a verdict: pass iff ``|mean - target| <= max(3 stderr, rel_tol |target|)``."""
    bound = max(3.0 * report.stderr, rel_tol * abs(target))
    verdict = "pass" if abs(report.mean - target) <= bound else "fail"
    return EstimateReport(report.mean, report.stderr, report.trials, report.seed, target, verdict)


def scenario_config(scenario: Scenario, n_elements: int, chi: float, fading=None) -> SystemConfig:
    """System configuration realizing ``scenario`` (Tx vertical; ``uni`` forces chi = 1)."""
    tx, rx = scenario.polarizations()
    if scenario.relation is Relation.UNI:
        chi = 1.0
    if fading is None:
        fading = Rayleigh() if scenario.fading is Fading.RAYLEIGH else LoS()
    return SystemConfig(n_elements, chi, tx_pol=tx, rx_pol=rx, fading=fading)


def class_architecture(arch_class, n_elements: int) -> RisArchitecture:
    if ArchClass(arch_class) is ArchClass.SINGLE:
        return RisArchitecture.single(n_elements)
    return RisArchitecture.fully(n_elements)


def verify_scaling_law(scenario, arch_class, n_elements: int, chi: float,
                       trials: int = DEFAULT_TRIALS, seed: int = 0,
                       rel_tol: float = DEFAULT_REL_TOL, law_scale: float = 1.0,
                       workers: Optional[int] = None) -> EstimateReport:
    """Monte Carlo check of one closed-form law.

    ``law_scale`` multiplies the closed form before comparison; it exists as a
    negative control and should stay 1 otherwise.
    """
    if isinstance(scenario, str):
        scenario = Scenario.parse(scenario)
    if not isinstance(scenario, Scenario):
        raise TypeError(f"no closed form for scenario {scenario!r}")
    target = law_scale * scaling_law(scenario, arch_class, n_elements, chi)
    config = scenario_config(scenario, n_elements, chi)
    report = estimate_mean_power(config, class_architecture(arch_class, n_elements),
                                 trials, seed, workers)
    return judge(report, target, rel_tol)


def estimate_gain(config: SystemConfig, trials: int, seed: int,
                  workers: Optional[int] = None) -> GainEstimate:
    """Ratio of means over shared realizations, with a delta-method standard error."""
    n = config.n_elements
    fully, single = trial_powers(
        config, [RisArchitecture.fully(n), RisArchitecture.single(n)], trials, seed, workers)
    mf, _ = _mean_stderr(fully)
    ms, _ = _mean_stderr(single)
    if ms == 0.0:
        return GainEstimate(math.inf, math.nan, mf, ms, trials, seed)
    ratio = mf / ms
    if trials == 1:
        return GainEstimate(ratio, 0.0, mf, ms, trials, seed)
    df = fully - mf
    ds = single - ms
    var_f = math.fsum(df * df) / (trials - 1)
    var_s = math.fsum(ds * ds) / (trials - 1)
    cov = math.fsum(df * ds) / (trials - 1)
    var_ratio = (var_f - 2.0 * ratio * cov + ratio * ratio * var_s) / (ms * ms * trials)
    return GainEstimate(ratio, math.sqrt(max(var_ratio, 0.0)), mf, ms, trials, seed)


def estimate_gain_rician_report(k: float, chi: float, n_elements: int, trials: int,
                                seed: int, workers: Optional[int] = None) -> GainEstimate:
    """Gain estimate under Rician(K) fading with opposite Tx/Rx polarization."""
    scenario = Scenario(Relation.OPPOSITE, Fading.RAYLEIGH)
    config = scenario_config(scenario, n_elements, chi, fading=Rician(k))
    return estimate_gain(config, trials, seed, workers)


def estimate_gain_rician(k: float, chi: float, n_elements: int, trials: int, seed: int) -> float:
    return estimate_gain_rician_report(k, chi, n_elements, trials, seed).ratio
