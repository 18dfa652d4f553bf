"""Analytical received-power scaling laws, BD-RIS gains and the LoS Pareto frontier.

Powers are for unit transmit power. Rayleigh laws are expectations over the
fading; LoS laws are deterministic and hold for any element phases.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .channel import Polarization, check_chi, check_n_elements
from .scattering import RisArchitecture

PI2_16 = math.pi ** 2 / 16.0


class Relation(enum.Enum):
    SAME = "same"
    OPPOSITE = "opposite"
    UNI = "uni"


class Fading(enum.Enum):
    RAYLEIGH = "rayleigh"
    LOS = "los"


class ArchClass(enum.Enum):
    SINGLE = "single"
    FULLY = "fully"


@dataclass(frozen=True)
class Scenario:
    relation: Relation
    fading: Fading

    def __post_init__(self):
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "fading", Fading(self.fading))

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        """``"opposite-los"``, ``"same-rayleigh"``, ``"uni-rayleigh"``, ..."""
        rel, sep, fad = text.strip().lower().partition("-")
        if not sep:
            raise ValueError(f"scenario must look like 'same-rayleigh', got {text!r}")
        try:
            return cls(Relation(rel), Fading(fad))
        except ValueError:
            raise ValueError(f"unknown scenario {text!r}") from None

    @property
    def name(self) -> str:
        return f"{self.relation.value}-{self.fading.value}"

    def polarizations(self) -> tuple:
        """(tx, rx) polarizations representing this scenario."""
        tx = Polarization.VERTICAL
        rx = tx.opposite() if self.relation is Relation.OPPOSITE else tx
        return tx, rx


ALL_SCENARIOS = tuple(Scenario(r, f) for f in Fading for r in Relation)
FIGURE_SCENARIOS = (
    Scenario(Relation.SAME, Fading.RAYLEIGH),
    Scenario(Relation.OPPOSITE, Fading.RAYLEIGH),
    Scenario(Relation.SAME, Fading.LOS),
    Scenario(Relation.OPPOSITE, Fading.LOS),
)


def _single_rayleigh_uni(n: float) -> float:
    return n + n * (n - 1) * PI2_16


def scaling_law(scenario: Scenario, arch_class, n_elements: int, chi: float = 1.0) -> float:
    """Expected (Rayleigh) or deterministic (LoS) received power for ``P_T = 1``."""
    arch_class = ArchClass(arch_class)
    n = n_elements
    if scenario.relation is Relation.UNI:
        if n < 1 or int(n) != n:
            raise ValueError(f"number of elements must be a positive integer, got {n}")
        if scenario.fading is Fading.LOS or arch_class is ArchClass.FULLY:
            return float(n * n)
        return _single_rayleigh_uni(n)

    check_n_elements(n)
    check_chi(chi)
    fully = (1.0 + chi) ** 2 / 4.0 * n * n
    if arch_class is ArchClass.FULLY:
        return fully

    if scenario.fading is Fading.LOS:
        if scenario.relation is Relation.SAME:
            return fully
        return chi * n * n

    if scenario.relation is Relation.SAME:
        half_law = n + n * (n / 2.0 - 1.0) * PI2_16
        return (1.0 + chi * chi) / 2.0 * half_law + math.pi ** 2 * chi / 32.0 * n * n
    return chi * _single_rayleigh_uni(n)


def gain(scenario: Scenario, chi: float = 1.0) -> float:
    """Asymptotic (N -> infinity) ratio of fully- to single-connected mean power.

    Opposite-polarization scenarios diverge at ``chi = 0`` and return ``inf``.
    """
    if scenario.relation is Relation.UNI:
        return 16.0 / math.pi ** 2 if scenario.fading is Fading.RAYLEIGH else 1.0
    check_chi(chi)
    if scenario.relation is Relation.SAME:
        return 16.0 / math.pi ** 2 if scenario.fading is Fading.RAYLEIGH else 1.0
    if chi == 0.0:
        return math.inf
    if scenario.fading is Fading.RAYLEIGH:
        return 4.0 * (1.0 + chi) ** 2 / (math.pi ** 2 * chi)
    return (1.0 + chi) ** 2 / (4.0 * chi)


def finite_gain(scenario: Scenario, n_elements: int, chi: float = 1.0) -> float:
    """Fully/single ratio of the scaling laws at finite N (a diagnostic, not the asymptotic gain)."""
    num = scaling_law(scenario, ArchClass.FULLY, n_elements, chi)
    den = scaling_law(scenario, ArchClass.SINGLE, n_elements, chi)
    if den == 0.0:
        return math.inf
    return num / den


# --------------------------------------------------------------------------
# Pareto frontier for opposite polarization with LoS channels
# --------------------------------------------------------------------------

def _check_pairs(n_elements: int, n: int) -> None:
    check_n_elements(n_elements)
    if isinstance(n, bool) or int(n) != n or not 0 <= n <= n_elements // 2:
        raise ValueError(f"number of pairs must be in 0..{n_elements // 2}, got {n}")


def pareto_power(n_elements: int, n: int, chi: float) -> float:
    """Best received power with complexity ``N + n``: ``(n (1+chi) + (N-2n) sqrt(chi))^2``."""
    _check_pairs(n_elements, n)
    check_chi(chi)
    amp = n * (1.0 + chi) + (n_elements - 2 * n) * math.sqrt(chi)
    return amp * amp


def optimal_architecture(n_elements: int, n: int) -> RisArchitecture:
    """``n`` opposite-polarization pairs ``{i, N/2 + i}`` followed by singletons."""
    _check_pairs(n_elements, n)
    half = n_elements // 2
    groups = [(i, half + i) for i in range(n)]
    groups += [(i,) for i in range(n, half)]
    groups += [(half + i,) for i in range(n, half)]
    return RisArchitecture(n_elements, tuple(groups))


@dataclass(frozen=True)
class ParetoPoint:
    n: int
    complexity: int
    power: float
    architecture: RisArchitecture


def pareto_frontier(n_elements: int, chi: float) -> list:
    check_n_elements(n_elements)
    check_chi(chi)
    points = []
    for n in range(n_elements // 2 + 1):
        arch = optimal_architecture(n_elements, n)
        points.append(ParetoPoint(n, n_elements + n, pareto_power(n_elements, n, chi), arch))
    return points
