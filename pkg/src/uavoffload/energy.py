"""Fixed-wing propulsion power on a circular trajectory and UAV energy efficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .analytic import DesignVars
from .phy import SystemParams


@dataclass(frozen=True)
class EnergyParams:
    c1: float = 9.26e-4   # parasitic-drag coefficient
    c2: float = 2250.0    # induced-drag coefficient
    g: float = 9.8

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0 or self.g <= 0:
            raise ValueError("c1, c2 and g must be positive")


@dataclass(frozen=True)
class EnergyReport:
    r_U: float
    theta_U: float
    V_opt: float
    propulsion_power: float
    transmit_power: float
    bits_per_period: float
    period: float
    energy_efficiency: float   # bits/J


def propulsion_power(V, r_U, ep: EnergyParams = EnergyParams()):
    """Power (W) for steady level flight at speed ``V`` on a circle of radius ``r_U``."""
    if V <= 0:
        raise ValueError("speed must be positive")
    if r_U <= 0:
        raise ValueError("turn radius must be positive")
    return (ep.c1 + ep.c2 / (ep.g**2 * r_U**2)) * V**3 + ep.c2 / V


def optimal_speed(r_U, ep: EnergyParams = EnergyParams()):
    # stationary point of (a V^3 + c2 / V): 3 a V^4 = c2
    a = ep.c1 + ep.c2 / (ep.g**2 * r_U**2)
    return (ep.c2 / (3 * a)) ** 0.25


def optimal_speed_numeric(r_U, ep: EnergyParams = EnergyParams(), tol=1e-10):
    """Golden-section minimiser of :func:`propulsion_power`, the check on the closed form."""
    res = minimize_scalar(lambda v: propulsion_power(v, r_U, ep), bracket=(1.0, 20.0, 200.0),
                          method="golden", tol=tol)
    return float(res.x)


def energy_efficiency(theta_U, vars: DesignVars, params: SystemParams, ep: EnergyParams = EnergyParams()):
    """Delivered UAV bits per Joule of transmit plus propulsion energy.

    The flying period cancels: bits per period over energy per period.
    """
    if theta_U < 0:
        raise ValueError("spatial throughput must be non-negative")
    bits_rate = params.W * math.pi * (params.r_G**2 - vars.r_I**2) * theta_U
    return bits_rate / (params.P_U + propulsion_power(optimal_speed(vars.r_U, ep), vars.r_U, ep))


def energy_report(theta_U, vars: DesignVars, params: SystemParams, ep: EnergyParams = EnergyParams()) -> EnergyReport:
    V = optimal_speed(vars.r_U, ep)
    P = propulsion_power(V, vars.r_U, ep)
    T = 2 * math.pi * vars.r_U / V
    bits = T * params.W * math.pi * (params.r_G**2 - vars.r_I**2) * theta_U
    return EnergyReport(vars.r_U, theta_U, V, P, params.P_U, bits, T, bits / (T * (params.P_U + P)))
