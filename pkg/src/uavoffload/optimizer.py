"""Max-min throughput solvers for the hybrid GBS/UAV cell.

``solve_orthogonal`` follows the decomposition: an outer bisection on the
common throughput, whose feasibility test picks, for every partition radius,
the smallest UAV bandwidth share that still meets the target and keeps the
GBS outage exponent as small as possible. ``solve_reuse`` exploits that the
UAV side increases and the GBS side decreases in ``r_I`` and bisects on
their crossing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic as an
from . import geometry
from .analytic import DesignVars, Scheme, ThroughputReport
from .phy import SystemParams
from .search import bisect_monotone, golden_section_min

log = logging.getLogger(__name__)

MuModel = Callable[[SystemParams, DesignVars], float]


@dataclass(frozen=True)
class SolverSettings:
    nu_tol: float = 1e-6
    rho_tol: float = 1e-9
    r_I_grid: int = 2001
    r_I_refine: bool = True

    def __post_init__(self):
        if self.nu_tol <= 0 or self.rho_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.r_I_grid < 3:
            raise ValueError("r_I_grid must be >= 3")


@dataclass
class Solution:
    vars: DesignVars
    report: ThroughputReport
    trace: list = field(default_factory=list)
    converged: bool = True
    diagnostics: list = field(default_factory=list)
    iterations: int = 0
    mu: float = 1.0

    @property
    def nu_bar(self):
        return self.report.nu_bar

    @property
    def theta(self):
        return self.report.theta


def _min_rho(nu, r_I, params, tol):
    """Smallest rho with R_U^max(rho, r_I) >= nu, elementwise; nan if none."""
    r_I = np.asarray(r_I, dtype=float)
    ok_full = an.uav_max_throughput(1.0, r_I, params) >= nu
    lo = np.zeros_like(r_I)
    hi = np.ones_like(r_I)
    n_iter = max(1, math.ceil(math.log2(1.0 / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        good = an.uav_max_throughput(mid, r_I, params) >= nu
        hi = np.where(good, mid, hi)
        lo = np.where(good, lo, mid)
    return np.where(ok_full, hi, np.nan)


def _exponent_at_min_rho(nu, r_I, params, tol):
    rho = _min_rho(nu, r_I, params, tol)
    f = np.where(np.isnan(rho), np.inf, an.outage_exponent(np.nan_to_num(rho, nan=0.5), r_I, nu, params))
    return f, rho


def _best_partition(nu, grid, params, settings):
    """Minimise the outage exponent over r_I for target ``nu``.

    Grid first, then golden-section refinement inside the best cell's
    neighbours. Returns ``(f, r_I, rho)``.
    """
    f, rho = _exponent_at_min_rho(nu, grid, params, settings.rho_tol)
    i = int(np.argmin(f))
    best = (float(f[i]), float(grid[i]), float(rho[i]))
    if settings.r_I_refine and math.isfinite(best[0]):
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]

        def obj(r):
            return float(_exponent_at_min_rho(nu, np.array([r]), params, settings.rho_tol)[0][0])

        r_star, f_star = golden_section_min(obj, float(a), float(b), 1e-6 * params.r_G)
        if f_star < best[0]:
            rho_star = float(_min_rho(nu, np.array([r_star]), params, settings.rho_tol)[0])
            best = (f_star, r_star, rho_star)
    return best


def solve_orthogonal(params: SystemParams, settings: SolverSettings = SolverSettings()) -> Solution:
    """Max-min common throughput with an orthogonal bandwidth split."""
    cap = params.outage_exponent_cap
    # r_I = 0 leaves the GBS without users and r_I = r_G the UAV; both excluded
    grid = np.linspace(0.0, params.r_G, settings.r_I_grid)[1:-1]
    trace = []

    def feasible(nu):
        f, r_I, rho = _best_partition(nu, grid, params, settings)
        ok = f <= cap
        trace.append({"iteration": len(trace), "nu": nu, "f_min": f, "r_I": r_I, "rho": rho, "feasible": ok})
        return ok, (f, r_I, rho)

    nu = an.gbs_only_throughput_closed(params)
    ok, best = feasible(nu)
    if not ok:
        # even the GBS-only level is out of reach; shrink towards zero
        hi = nu
        while not ok:
            hi, nu = nu, nu / 2
            if nu < 1e-30:
                raise AssertionError("no feasible common throughput (outage cap must be positive)")
            ok, best = feasible(nu)
        lo = nu
    else:
        lo = nu
        while ok:
            lo, lo_best = nu, best
            nu *= 2
            ok, best = feasible(nu)
        hi, best = nu, lo_best
    while hi - lo > settings.nu_tol * lo:
        mid = 0.5 * (lo + hi)
        ok, cand = feasible(mid)
        if ok:
            lo, best = mid, cand
        else:
            hi = mid
    _, r_I, rho = best
    vars = DesignVars.at_optimal_radius(Scheme.ORTHOGONAL, rho, r_I, params)
    report = an.throughput_report(vars, params)
    sol = Solution(vars, report, trace, converged=True, iterations=len(trace))
    _note_clamping(sol, params)
    return sol


def _reuse_gap(r_I, params):
    return an.uav_max_throughput(1.0, r_I, params, Scheme.REUSE) - an.gbs_max_throughput(0.0, r_I, params)


def solve_reuse(params: SystemParams, settings: SolverSettings = SolverSettings()) -> Solution:
    """Max-min common throughput with interference-free spectrum reuse."""
    r_G = params.r_G
    grid = np.linspace(0.0, r_G, settings.r_I_grid)[1:-1]
    gap = _reuse_gap(grid, params)
    trace = []
    diagnostics = []
    if settings.r_I_refine and gap[0] < 0 < gap[-1]:
        # the crossing lies in the open interval; bracket it by the grid first
        j = int(np.argmax(gap >= 0))
        lo, hi = float(grid[j - 1]), float(grid[j])

        def below(r):
            g = float(_reuse_gap(r, params))
            trace.append({"iteration": len(trace), "r_I": r, "gap": g})
            return g < 0

        lo, hi = bisect_monotone(below, lo, hi, tol=settings.rho_tol * r_G)
        cands = [lo, hi]
    else:
        if not gap[0] < 0 < gap[-1]:
            diagnostics.append("no_crossing")
            log.warning("reuse: UAV and GBS throughput curves do not cross; using best grid point")
        cands = list(grid)
    vals = np.minimum(an.uav_max_throughput(1.0, np.array(cands), params, Scheme.REUSE),
                      an.gbs_max_throughput(0.0, np.array(cands), params))
    r_I = float(cands[int(np.argmax(vals))])
    vars = DesignVars.at_optimal_radius(Scheme.REUSE, 1.0, r_I, params)
    report = an.throughput_report(vars, params)
    sol = Solution(vars, report, trace, converged=True, diagnostics=diagnostics, iterations=len(trace))
    _note_clamping(sol, params)
    return sol


def solve_gbs_only(params: SystemParams, settings: SolverSettings | None = None) -> Solution:
    """GBS alone, with the UAV's power budget added to the GBS."""
    pooled = params.replace(P_G=params.P_G + params.P_U)
    nu = an.gbs_only_throughput(pooled)
    vars = DesignVars.gbs_only(params)
    p_out = an.outage_from_exponent(an.outage_exponent(0.0, params.r_G, nu, pooled))
    report = ThroughputReport(nu, params.lam * nu, 0.0, nu, p_out)
    return Solution(vars, report)


SOLVERS = {
    Scheme.ORTHOGONAL: solve_orthogonal,
    Scheme.REUSE: solve_reuse,
    Scheme.GBS_ONLY: solve_gbs_only,
}


def solve(scheme, params: SystemParams, settings: SolverSettings = SolverSettings(),
          mu_model: MuModel | None = None, mu_rtol=1e-3, max_mu_iter=10) -> Solution:
    """Solve ``scheme``; with ``mu_model`` iterate mu to a fixed point.

    ``mu_model(params, vars)`` returns the crowding factor measured at a
    design (typically a Monte Carlo estimate). The solve/estimate loop stops
    once mu moves by less than ``mu_rtol`` relative.
    """
    scheme = Scheme(scheme)
    solver = SOLVERS[scheme]
    sol = solver(params, settings)
    sol.mu = params.mu
    if mu_model is None or scheme is Scheme.GBS_ONLY:
        return sol
    mu = params.mu
    for _ in range(max_mu_iter):
        new_mu = float(mu_model(params.replace(mu=mu), sol.vars))
        if abs(new_mu - mu) <= mu_rtol * mu:
            return sol
        mu = new_mu
        sol = solver(params.replace(mu=mu), settings)
        sol.mu = mu
    sol.converged = False
    sol.diagnostics.append("mu_not_converged")
    log.warning("mu fixed point did not converge after %d updates (mu=%g)", max_mu_iter, mu)
    return sol


def max_density(scheme, params: SystemParams, nu_min: float, settings: SolverSettings = SolverSettings(),
                mu_model: MuModel | None = None, rel_tol=1e-4) -> float:
    """Largest user density (users/m^2) whose common rate ``nu_bar * W`` reaches ``nu_min`` bps."""
    if nu_min <= 0:
        raise ValueError("nu_min must be positive")

    def rate(lam):
        return solve(scheme, params.replace(lam=lam), settings, mu_model).nu_bar * params.W

    # the common throughput scales as 1/lambda at fixed mu: start from that guess
    guess = params.lam * rate(params.lam) / nu_min
    lo, hi = guess / 1.5, guess * 1.5
    while rate(lo) < nu_min:
        hi, lo = lo, lo / 2
        if lo < 1e-15:
            raise ValueError(f"{nu_min} bps unreachable even as density -> 0")
    while rate(hi) >= nu_min:
        lo, hi = hi, hi * 2
    lo, _ = bisect_monotone(lambda lam: rate(lam) >= nu_min, lo, hi, rel_tol=rel_tol)
    return lo


def brute_force_max_min(scheme, params: SystemParams, n=50):
    """Exhaustive max-min over a (rho, r_I, r_U) grid; a solver oracle.

    ``r_U`` is sampled on ``[r_I, r_G]`` for every ``r_I``. Returns
    ``(nu, rho, r_I, r_U)`` of the best grid point.
    """
    scheme = Scheme(scheme)
    r_G = params.r_G
    r_I = np.linspace(0, r_G, n + 2)[1:-1]
    rho = np.linspace(0, 1, n + 2)[1:-1] if scheme is Scheme.ORTHOGONAL else np.array([1.0])
    t = np.linspace(0, 1, n)
    R, T = np.meshgrid(r_I, t, indexing="ij")
    r_U = R + T * (r_G - R)
    d = np.maximum(geometry._cosine_law(r_U, R, params.psi), geometry._cosine_law(r_U, r_G, params.psi))
    best = (-np.inf, None, None, None)
    for p in rho:
        u = an.uav_rate_bound(p, R, d, params)
        g = an.gbs_max_throughput(p if scheme is Scheme.ORTHOGONAL else 0.0, R, params)
        v = np.minimum(u, g)
        k = np.unravel_index(np.argmax(v), v.shape)
        if v[k] > best[0]:
            best = (float(v[k]), float(p), float(R[k]), float(r_U[k]))
    return best


def _note_clamping(sol: Solution, params: SystemParams):
    seg = geometry.RingSegment(sol.vars.r_I, params.r_G, params.psi)
    if geometry.optimal_radius(seg).clamped:
        sol.diagnostics.append("r_U_clamped")
        log.warning("optimal trajectory radius clamped into [r_I, r_G]")

