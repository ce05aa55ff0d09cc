"""Bits per Joule for a fixed-wing UAV on the optimal circle."""

import numpy as np

from uavoffload import analytic as an
from uavoffload import energy, montecarlo
from uavoffload.analytic import DesignVars, Scheme
from uavoffload.phy import SystemParams

p = SystemParams(P_U=1.0)
v = DesignVars.at_optimal_radius(Scheme.ORTHOGONAL, 0.5, 500.0, p)
fields = montecarlo.generate_fields(p.lam, p.r_G, 100, master_seed=0)
p = p.replace(mu=montecarlo.estimate_mu(fields, v, p))
theta_U = p.lam * an.uav_common_throughput(v, p)
rep = energy.energy_report(theta_U, v, p)

print(f"mu = {p.mu:.3f}, theta_U = {theta_U * 1e6:.2f} bps/Hz/km^2")
print(f"V* = {rep.V_opt:.2f} m/s, propulsion {rep.propulsion_power:.2f} W, transmit {rep.transmit_power:.1f} W")
print(f"energy efficiency {rep.energy_efficiency / 1e3:.1f} kbits/J")

# %% Tighter circles cost more: the induced drag of banking grows as 1/r^2
for r in (200, 400, 776, 1500):
    V = energy.optimal_speed(r)
    print(f"  r_U = {r:5d} m   V* = {V:5.2f} m/s   P = {energy.propulsion_power(V, r):7.2f} W")
speeds = np.linspace(10, 60, 6)
print("power vs speed at r_U*:", np.round([energy.propulsion_power(s, v.r_U) for s in speeds], 1))
