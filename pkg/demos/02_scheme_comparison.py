"""Orthogonal sharing, spectrum reuse and the GBS alone, versus UAV power.

Each scheme is solved for its max-min common throughput. The crowding
factor mu is calibrated by Monte Carlo at every optimum.
"""

from uavoffload import optimizer
from uavoffload.analytic import Scheme
from uavoffload.montecarlo import mu_estimator
from uavoffload.phy import SystemParams, dbm_to_watt

mu_model = mu_estimator(n_fields=100, master_seed=0)
settings = optimizer.SolverSettings(r_I_grid=501)

print(" P_U |  theta orth  reuse  GBS  (bps/Hz/km^2) |  rho_opt  r_I_opt  r_I_opt'")
for dbm in (0, 10, 20, 30):
    p = SystemParams(P_U=float(dbm_to_watt(dbm)))
    o = optimizer.solve(Scheme.ORTHOGONAL, p, settings, mu_model)
    r = optimizer.solve(Scheme.REUSE, p, settings, mu_model)
    g = optimizer.solve(Scheme.GBS_ONLY, p)
    print(f"{dbm:3d}  |  {o.theta * 1e6:9.3f} {r.theta * 1e6:6.3f} {g.theta * 1e6:5.3f}"
          f"                |  {o.vars.rho:7.3f}  {o.vars.r_I:7.1f}  {r.vars.r_I:8.1f}")

# %% How many users per km^2 can each scheme carry at 100 kbps?
p = SystemParams()
for s in Scheme:
    lam = optimizer.max_density(s, p, 1e5, settings, mu_model, rel_tol=1e-3)
    print(f"lambda_max {s.value:10s} {lam * 1e6:6.1f} users/km^2")
