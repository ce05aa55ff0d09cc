"""A ring of M micro cells against one circling UAV at the same power.

The micro cells are placed on a circle of radius d_micro with coverage
radius r_micro; their band share rho_micro is tuned jointly. The search
here uses 20 user fields so it runs in under a minute.
"""

from concurrent.futures import ThreadPoolExecutor

from uavoffload import microcell, montecarlo, optimizer
from uavoffload.analytic import Scheme
from uavoffload.phy import SystemParams, dbm_to_watt

p = SystemParams(P_G=float(dbm_to_watt(46.0)), P_U=float(dbm_to_watt(40.0)))
fields = montecarlo.generate_fields(p.lam, p.r_G, 20, master_seed=0)
base = microcell.MicroLayout(1, 500.0, 100.0, P_micro=p.P_U)

with ThreadPoolExecutor() as pool:
    for M in (1, 4, 8, 12, 16):
        res = microcell.optimize_layout(M, p, fields, base=base, pool=pool)
        lay = res.layout
        print(f"M = {M:2d}  theta = {res.theta * 1e6:.2f}  d_micro = {lay.d_micro:.0f} m"
              f"  r_micro = {lay.r_micro:.0f} m  rho_micro = {lay.rho_micro:.2f}")

uav = optimizer.solve(Scheme.ORTHOGONAL, p, mu_model=montecarlo.mu_estimator())
gbs = optimizer.solve(Scheme.GBS_ONLY, p)
print(f"UAV (orthogonal) theta = {uav.theta * 1e6:.2f}, GBS only theta = {gbs.theta * 1e6:.2f}")
