"""Dual-polarized beyond-diagonal RIS: channels, optimal scattering, scaling laws and oracles."""

from .channel import (ChannelRealization, LoS, Polarization, Rayleigh, Rician, SystemConfig,
                      compose, element_polarization, polarization_profile, sample_fading)
from .closedform import (ArchClass, Fading, ParetoPoint, Relation, Scenario, finite_gain, gain,
                         optimal_architecture, pareto_frontier, pareto_power, scaling_law)
from .montecarlo import (EstimateReport, GainEstimate, estimate_gain, estimate_gain_rician,
                         estimate_mean_power, verify_scaling_law)
from .oracle import (PartitionBudget, brute_force_best, enumerate_partitions, oracle_check,
                     verify_prop1)
from .scattering import (RisArchitecture, ScatteringMatrix, complexity, map_symmetric_unitary,
                         max_power, received_power, synth_diagonal, synth_group_optimal)

__version__ = "0.1.0"
