"""Stochastic-geometry validation of the analytic throughput results.

Users are an HPPP on the cell disk. One UAV period is simulated on a grid of
``ticks`` UAV azimuths: the UAV serves the users in the ring segment centred
on its azimuth, and under spectrum reuse the GBS serves the inner-disk users
in the sector diametrically opposite. GBS links see block Rayleigh fading,
redrawn every tick.

Seeds: realization ``i`` of master seed ``s`` uses
``SeedSequence(s, spawn_key=(i, 0))`` for user positions and
``SeedSequence(s, spawn_key=(i, 1))`` for fading, so results do not depend
on how realizations are distributed over threads.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic as an
from . import geometry
from .analytic import DesignVars, Scheme
from .phy import SystemParams, uav_beam_gain

log = logging.getLogger(__name__)

POLICIES = ("bound", "adaptive")


@dataclass(frozen=True, eq=False)
class UserField:
    r: np.ndarray
    phi: np.ndarray
    lam: float
    r_G: float
    seed: object = None

    def __len__(self):
        return len(self.r)

    @property
    def points(self):
        """``(K, 2)`` array of polar coordinates ``(r, phi)``."""
        return np.column_stack([self.r, self.phi])

    @property
    def xy(self):
        return np.column_stack([self.r * np.cos(self.phi), self.r * np.sin(self.phi)])


def realization_seed(master_seed, index, stream=0) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(index, stream))


def generate_field(lam, r_G, seed) -> UserField:
    if lam <= 0:
        raise ValueError("user density must be positive")
    rng = np.random.default_rng(seed)
    k = rng.poisson(lam * math.pi * r_G**2)
    r = r_G * np.sqrt(rng.random(k))
    phi = rng.random(k) * 2 * math.pi
    return UserField(r, phi, lam, r_G, seed)


def generate_fields(lam, r_G, n, master_seed=0):
    return [generate_field(lam, r_G, realization_seed(master_seed, i)) for i in range(n)]


@dataclass(frozen=True)
class Schedule:
    """Time discretisation of one UAV period on a circle of radius ``r_U``."""

    r_U: float
    V: float = 30.0
    ticks: int = 720

    def __post_init__(self):
        if self.r_U <= 0 or self.V <= 0 or self.ticks < 1:
            raise ValueError("need r_U > 0, V > 0 and ticks >= 1")

    @property
    def T(self):
        return 2 * math.pi * self.r_U / self.V

    @property
    def dt(self):
        return self.T / self.ticks

    def angles(self):
        return np.arange(self.ticks) * (2 * math.pi / self.ticks)

    def association_window(self, phi, psi):
        """``(t_s, t_e)`` of the UAV association of a ring user at azimuth ``phi``."""
        t_s = ((np.asarray(phi) - psi / 2) % (2 * math.pi)) / (2 * math.pi) * self.T
        return t_s, t_s + psi * self.T / (2 * math.pi)

    def association_time(self, psi):
        return psi * self.T / (2 * math.pi)

    def access_delay(self, psi):
        return self.T - self.association_time(psi)

    def gbs_access_delay(self, Phi_G):
        return (1 - Phi_G / (2 * math.pi)) * self.T


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def segment_membership(phi, angles, width):
    """Users (rows) inside an angular window of ``width`` centred at each tick angle."""
    return np.abs(_wrap(phi[:, None] - angles[None, :])) <= width / 2


def segment_counts(phi, angles, width):
    """Number of azimuths ``phi`` in each window, without the full matrix."""
    s = np.sort(np.asarray(phi, dtype=float) % (2 * math.pi))
    ext = np.concatenate([s - 2 * math.pi, s, s + 2 * math.pi])
    lo = np.searchsorted(ext, angles - width / 2, side="left")
    hi = np.searchsorted(ext, angles + width / 2, side="right")
    return hi - lo


def mu_of_field(field: UserField, r_I, params: SystemParams, ticks=720) -> float:
    """Peak-to-mean segment occupancy ``K_a,max / K_a`` of one field; nan if empty."""
    ring = field.phi[field.r >= r_I]
    counts = segment_counts(ring, np.arange(ticks) * (2 * math.pi / ticks), params.psi)
    k_max = int(counts.max()) if counts.size else 0
    if k_max == 0:
        return math.nan
    K_a = geometry.RingSegment(r_I, params.r_G, params.psi).expected_count(params.lam)
    return k_max / K_a


def estimate_mu(fields, vars: DesignVars, params: SystemParams, ticks=720) -> float:
    """Mean over fields of the peak-to-mean UAV association count."""
    vals = np.array([mu_of_field(f, vars.r_I, params, ticks) for f in fields])
    empty = np.isnan(vals)
    if empty.any():
        warnings.warn(f"{int(empty.sum())} field(s) with an empty ring segment excluded from mu", RuntimeWarning)
    if empty.all():
        raise ValueError("every field has an empty ring region; mu undefined")
    return math.fsum(vals[~empty]) / int((~empty).sum())


def mu_estimator(n_fields=100, master_seed=0, ticks=720, floor=1.0):
    """A ``mu_model`` for :func:`optimizer.solve`, backed by cached HPPP fields.

    The estimate is floored at ``floor`` since the analytic formulas need
    ``mu >= 1``.
    """
    cache = {}

    def model(params: SystemParams, vars: DesignVars) -> float:
        key = (params.lam, params.r_G)
        if key not in cache:
            cache[key] = generate_fields(params.lam, params.r_G, n_fields, master_seed)
        return max(floor, estimate_mu(cache[key], vars, params, ticks))

    return model


@dataclass
class RealizationResult:
    n_users: int
    K_G: int
    K_U: int
    K_a_max: int
    mu: float
    uav_bound: np.ndarray       # per ring user, constant-rate policy
    uav_adaptive: np.ndarray    # per ring user, true per-tick rates
    assoc_time: np.ndarray      # per ring user, seconds
    gbs_mean_rate: np.ndarray   # per inner user, time-averaged rate
    nu_G: float                 # outage-constrained common GBS throughput
    outage: float               # fraction of (user, tick) draws below the target
    theta_U_bound: float
    theta_U_adaptive: float
    theta_G: float
    gbs_power: float            # largest per-tick total GBS power
    max_assoc_distance: float
    coverage_radius: float
    empty_ticks: int


def simulate_realization(field: UserField, vars: DesignVars, params: SystemParams,
                         schedule: Schedule, rng=None, fading=True, nu_target=None) -> RealizationResult:
    """Simulate one user field over one UAV period.

    ``nu_target`` is the common throughput whose empirical outage is
    reported; it defaults to the analytic GBS-side value for ``vars``.
    """
    if vars.scheme is Scheme.GBS_ONLY:
        raise ValueError("simulation covers hybrid schemes only")
    if vars.scheme is Scheme.REUSE and params.Phi_G + params.psi > 2 * math.pi:
        raise ValueError("reuse needs Phi_G + psi <= 2 pi so GBS sector and UAV segment do not overlap")
    rng = np.random.default_rng(rng)
    angles = schedule.angles()
    seg = vars.segment(params)
    rho = vars.uav_bandwidth
    ring = field.r >= vars.r_I
    r_u, phi_u = field.r[ring], field.phi[ring]
    r_g, phi_g = field.r[~ring], field.phi[~ring]

    # UAV tier
    d_max = float(geometry.worst_case_distance(vars.r_U, seg))
    gain = uav_beam_gain(d_max, params.H_U)
    member = segment_membership(phi_u, angles, params.psi)
    counts = member.sum(axis=0)
    k_max = int(counts.max()) if counts.size else 0
    empty_ticks = int((counts == 0).sum())
    if empty_ticks:
        log.info("%d tick(s) without UAV-associated users", empty_ticks)
    n_in = member.sum(axis=1)
    d2 = r_u[:, None] ** 2 + vars.r_U**2 - 2 * r_u[:, None] * vars.r_U * np.cos(phi_u[:, None] - angles[None, :])
    d2 = np.maximum(d2, 0.0)
    max_dist = float(np.sqrt(d2[member].max())) if member.any() else 0.0
    if k_max and rho > 0:
        const_rate = rho / k_max * math.log2(1 + params.eta0 * params.P_U * gain / (rho * (d_max**2 + params.H_U**2)))
        uav_bound = n_in / schedule.ticks * const_rate
        inst = rho / np.maximum(counts, 1)[None, :] * np.log2(
            1 + params.eta0 * params.P_U * gain / (rho * (d2 + params.H_U**2)))
        uav_adaptive = np.where(member, inst, 0.0).sum(axis=1) / schedule.ticks
    else:
        uav_bound = np.zeros(len(r_u))
        uav_adaptive = np.zeros(len(r_u))
    ring_area = math.pi * (params.r_G**2 - vars.r_I**2)
    K_a = seg.expected_count(params.lam)

    # GBS tier
    K_G = len(r_g)
    weight = (params.H_G**2 + r_g**2) ** (params.n / 2)
    zeta = rng.exponential(1.0, size=(K_G, schedule.ticks)) if fading else np.ones((K_G, schedule.ticks))
    if nu_target is None:
        nu_target = an.gbs_max_throughput(vars.rho if vars.scheme is Scheme.ORTHOGONAL else 0.0, vars.r_I, params)
    if K_G == 0:
        warnings.warn("realization without GBS users", RuntimeWarning)
        nu_G = outage = theta_G = gbs_power = math.nan
        gbs_mean = np.zeros(0)
    elif vars.scheme is Scheme.ORTHOGONAL:
        b = (1 - vars.rho) / K_G
        gamma = params.kappa0 * params.P_G / (b * weight.sum())
        gbs_power = float((gamma * b * weight / params.kappa0).sum())
        rates = b * np.log2(1 + gamma * zeta)
        nu_G = float(np.quantile(rates, params.P_out_max))
        outage = float((rates < nu_target).mean())
        gbs_mean = rates.mean(axis=1)
        theta_G = K_G * nu_G / (math.pi * vars.r_I**2)
    else:
        active = segment_membership(phi_g, angles + math.pi, params.Phi_G)
        n_act = active.sum(axis=0)
        s_act = (weight[:, None] * active).sum(axis=0)
        ok = n_act > 0
        b_t = np.where(ok, 1.0 / np.maximum(n_act, 1), 0.0)
        gamma_t = np.where(ok, params.kappa0 * params.P_G / np.where(ok, b_t * s_act, 1.0), 0.0)
        gbs_power = float(np.max(np.where(ok, (gamma_t * b_t * s_act) / params.kappa0, 0.0)))
        inst = b_t[None, :] * np.log2(1 + gamma_t[None, :] * zeta)
        duty = params.Phi_G / (2 * math.pi)
        samples = inst[active]
        nu_G = duty * float(np.quantile(samples, params.P_out_max))
        outage = float((samples < nu_target / duty).mean())
        gbs_mean = np.where(active, inst, 0.0).sum(axis=1) / schedule.ticks
        theta_G = K_G * nu_G / (math.pi * vars.r_I**2)

    return RealizationResult(
        n_users=len(field), K_G=K_G, K_U=len(r_u), K_a_max=k_max,
        mu=k_max / K_a if K_a > 0 else math.nan,
        uav_bound=uav_bound, uav_adaptive=uav_adaptive, assoc_time=n_in * schedule.dt,
        gbs_mean_rate=gbs_mean, nu_G=nu_G, outage=outage,
        theta_U_bound=float(uav_bound.sum()) / ring_area,
        theta_U_adaptive=float(uav_adaptive.sum()) / ring_area,
        theta_G=theta_G, gbs_power=gbs_power,
        max_assoc_distance=max_dist, coverage_radius=d_max, empty_ticks=empty_ticks,
    )


def _mean_se(values):
    v = np.asarray(values, dtype=float)
    v = v[~np.isnan(v)]
    if v.size == 0:
        return math.nan, math.nan
    mean = math.fsum(v) / v.size
    se = math.sqrt(math.fsum((v - mean) ** 2) / (v.size - 1) / v.size) if v.size > 1 else 0.0
    return mean, se


@dataclass
class SimulationSummary:
    vars: DesignVars
    mu: float
    realizations: list
    aggregates: dict     # name -> (mean, standard error)
    analytic: dict       # name -> analytic counterpart at the estimated mu

    def relative_gap(self, name, analytic_name=None):
        sim = self.aggregates[name][0]
        ref = self.analytic[analytic_name or name]
        return (sim - ref) / ref


AGGREGATED = ("theta_U_bound", "theta_U_adaptive", "theta_G", "nu_G", "outage", "mu", "K_G", "K_U", "K_a_max")


def simulate(vars: DesignVars, params: SystemParams, n_realizations=100, master_seed=0,
             ticks=720, V=30.0, threads=1, fading=True, fields=None) -> SimulationSummary:
    """Run ``n_realizations`` paired realizations and compare with the analytic model.

    mu is estimated from the same fields and plugged into the analytic
    UAV throughput, so the comparison is paired.
    """
    if fields is None:
        fields = generate_fields(params.lam, params.r_G, n_realizations, master_seed)
    schedule = Schedule(vars.r_U, V, ticks)
    mu = max(1.0, estimate_mu(fields, vars, params, ticks))
    tuned = params.replace(mu=mu)
    nu_target = an.gbs_max_throughput(vars.rho if vars.scheme is Scheme.ORTHOGONAL else 0.0, vars.r_I, tuned)

    def run(i):
        return simulate_realization(fields[i], vars, tuned, schedule,
                                    rng=realization_seed(master_seed, i, 1), fading=fading, nu_target=nu_target)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(len(fields))))
    else:
        results = [run(i) for i in range(len(fields))]
    aggregates = {name: _mean_se([getattr(r, name) for r in results]) for name in AGGREGATED}
    R_U = an.uav_common_throughput(vars, tuned)
    analytic = {
        "theta_U_bound": tuned.lam * R_U,
        "theta_G": tuned.lam * nu_target,
        "nu_G": nu_target,
        "outage": params.P_out_max,
        "mu": mu,
    }
    return SimulationSummary(vars, mu, results, aggregates, analytic)
