"""Throughput-optimal data offloading from a ground base station to a circling UAV."""

__version__ = "0.1.0"

from .analytic import DesignVars, Scheme, ThroughputReport, throughput_report
from .energy import EnergyParams, energy_efficiency, optimal_speed, propulsion_power
from .geometry import RingSegment, optimal_radius, worst_case_distance
from .montecarlo import estimate_mu, generate_fields, mu_estimator, simulate
from .optimizer import Solution, SolverSettings, max_density, solve
from .phy import ConfigError, SystemParams

__all__ = [
    "ConfigError", "DesignVars", "EnergyParams", "RingSegment", "Scheme", "Solution", "SolverSettings",
    "SystemParams", "ThroughputReport", "energy_efficiency", "estimate_mu", "generate_fields",
    "max_density", "mu_estimator", "optimal_radius", "optimal_speed", "propulsion_power", "simulate",
    "solve", "throughput_report", "worst_case_distance",
]
