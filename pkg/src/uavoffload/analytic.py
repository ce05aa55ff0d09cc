"""Closed-form throughput and outage expressions for both sharing schemes.

All throughputs are normalised to the total bandwidth W (bps/Hz). The
array-level helpers (``uav_rate_bound``, ``outage_exponent``,
``gbs_max_throughput`` ...) broadcast over numpy arrays so the optimizer can
evaluate whole grids at once; the ``DesignVars`` wrappers are the scalar API.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .phy import SystemParams, uav_beam_gain
from .search import bisect_monotone


class Scheme(str, enum.Enum):
    ORTHOGONAL = "orthogonal"
    REUSE = "reuse"
    GBS_ONLY = "gbs-only"


# exp(-f) underflows to zero well before f = 745; saturate outage there
OUTAGE_SATURATION = 700.0


class DomainError(ValueError):
    """Operation undefined for the given design (empty tier, zero bandwidth ...)."""


@dataclass(frozen=True)
class DesignVars:
    scheme: Scheme
    rho: float
    r_I: float
    r_U: float

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.GBS_ONLY:
            return
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.r_I < 0 or self.r_U < self.r_I - 1e-9 * max(self.r_U, 1.0):
            raise ValueError(f"need 0 <= r_I <= r_U, got r_I={self.r_I}, r_U={self.r_U}")

    @classmethod
    def gbs_only(cls, params: SystemParams) -> "DesignVars":
        return cls(Scheme.GBS_ONLY, 0.0, params.r_G, params.r_G)

    @classmethod
    def at_optimal_radius(cls, scheme, rho, r_I, params: SystemParams) -> "DesignVars":
        seg = geometry.RingSegment(r_I, params.r_G, params.psi)
        return cls(scheme, rho, r_I, geometry.optimal_radius(seg).r_U)

    @property
    def uav_bandwidth(self):
        """Bandwidth fraction usable by the UAV (1 under reuse)."""
        if self.scheme is Scheme.REUSE:
            return 1.0
        if self.scheme is Scheme.GBS_ONLY:
            return 0.0
        return self.rho

    @property
    def gbs_bandwidth(self):
        return 1.0 if self.scheme is not Scheme.ORTHOGONAL else 1.0 - self.rho

    def segment(self, params: SystemParams) -> geometry.RingSegment:
        return geometry.RingSegment(self.r_I, params.r_G, params.psi)


@dataclass(frozen=True)
class ThroughputReport:
    nu_bar: float
    theta: float
    R_U_bar: float
    R_G_bar: float
    p_out: float


# --- expected user counts --------------------------------------------------

def user_counts(r_I, params: SystemParams):
    """Mean counts ``(K, K_G, K_U, K_a)`` for partition radius ``r_I``."""
    lam, r_G = params.lam, params.r_G
    K = lam * math.pi * r_G**2
    K_G = lam * math.pi * r_I**2
    K_a = lam * (r_G**2 - r_I**2) * params.psi / 2
    return K, K_G, K - K_G, K_a


def bandwidth_terms(vars: DesignVars, params: SystemParams):
    """Per-user normalised bandwidths ``(b_G, b_min)``.

    ``b_G`` is the GBS per-user share (per active sector under reuse),
    ``b_min`` the worst-case UAV share ``rho / (mu K_a)``.
    """
    _, K_G, _, K_a = user_counts(vars.r_I, params)
    if K_G <= 0:
        raise DomainError("GBS serves no users (r_I = 0): b_G undefined")
    if K_a <= 0:
        raise DomainError("UAV serves no users (r_I = r_G): b_min undefined")
    if vars.scheme is Scheme.REUSE:
        b_G = 2 / (params.lam * vars.r_I**2 * params.Phi_G)
    else:
        b_G = vars.gbs_bandwidth / K_G
    b_min = vars.uav_bandwidth / (params.mu * K_a)
    return b_G, b_min


# --- UAV side --------------------------------------------------------------

def uav_rate_bound(rho, r_I, d_max, params: SystemParams):
    """UAV common throughput for bandwidth share ``rho`` and worst distance ``d_max``."""
    rho = np.asarray(rho, dtype=float)
    r_I = np.asarray(r_I, dtype=float)
    gain = uav_beam_gain(d_max, params.H_U)
    snr = params.eta0 * params.P_U * gain / (d_max**2 + params.H_U**2)
    denom = params.mu * params.lam * math.pi * (params.r_G**2 - r_I**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(rho > 0, rho / denom * np.log2(1 + snr / np.where(rho > 0, rho, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def uav_common_throughput(vars: DesignVars, params: SystemParams) -> float:
    seg = vars.segment(params)
    d_max = float(geometry.worst_case_distance(vars.r_U, seg))
    return uav_rate_bound(vars.uav_bandwidth, vars.r_I, d_max, params)


def uav_common_throughput_precancel(vars: DesignVars, params: SystemParams) -> float:
    """Same quantity assembled as association fraction x per-user bound rate.

    Written without cancelling psi so tests can confirm the cancellation.
    """
    rho = vars.uav_bandwidth
    if rho == 0:
        return 0.0
    seg = vars.segment(params)
    d_max = float(geometry.worst_case_distance(vars.r_U, seg))
    _, b_min = bandwidth_terms(vars, params)
    snr = params.eta0 * params.P_U * uav_beam_gain(d_max, params.H_U) / (rho * (d_max**2 + params.H_U**2))
    return params.psi / (2 * math.pi) * b_min * math.log2(1 + snr)


def uav_max_throughput(rho, r_I, params: SystemParams, scheme=Scheme.ORTHOGONAL):
    """UAV throughput at the optimal trajectory radius for ``r_I``.

    Under reuse the UAV holds the whole band and ``rho`` is ignored.
    """
    if Scheme(scheme) is Scheme.REUSE:
        rho = 1.0
    d = geometry.optimal_worst_distance(r_I, params.r_G, params.psi)
    return uav_rate_bound(rho, r_I, d, params)


# --- GBS side --------------------------------------------------------------

def radial_power_integral(r_I, params: SystemParams):
    """Closed form of the integral of (H_G^2 + r^2)^(n/2) r dr over [0, r_I]."""
    m = 2 + params.n
    return ((params.H_G**2 + np.asarray(r_I, dtype=float) ** 2) ** (m / 2) - params.H_G**m) / m


def _snr_factor(r_I, params):
    # kappa0 P_G r_I^2 / (2 L(r_I)): the average SNR with the whole band
    r_I = np.asarray(r_I, dtype=float)
    return params.kappa0 * params.P_G * r_I**2 / (2 * radial_power_integral(r_I, params))


def gbs_avg_snr(vars: DesignVars, params: SystemParams) -> float:
    if vars.r_I <= 0:
        raise DomainError("GBS serves no users (r_I = 0)")
    share = vars.gbs_bandwidth
    if share <= 0:
        raise DomainError("GBS has zero bandwidth (rho = 1) but users to serve")
    return float(_snr_factor(vars.r_I, params) / share)


def gbs_power_profile(r, vars: DesignVars, params: SystemParams):
    """Slow channel-inversion transmit power for a user at distance ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > vars.r_I * (1 + 1e-12)):
        raise DomainError("power profile only defined for 0 <= r <= r_I")
    b_G = _gbs_share(vars, params)
    gamma = gbs_avg_snr(vars, params)
    out = gamma * b_G * (params.H_G**2 + r**2) ** (params.n / 2) / params.kappa0
    return float(out) if out.ndim == 0 else out


def _gbs_share(vars, params):
    if vars.r_I <= 0:
        raise DomainError("GBS serves no users (r_I = 0): b_G undefined")
    if vars.scheme is Scheme.REUSE:
        return 2 / (params.lam * vars.r_I**2 * params.Phi_G)
    return vars.gbs_bandwidth / (params.lam * math.pi * vars.r_I**2)


def outage_exponent(rho, r_I, nu, params: SystemParams):
    """``f(rho, r_I, nu)``: the outage probability is ``1 - exp(-f)``.

    Pass ``rho = 0`` for the reuse scheme. Overflow of the exponential
    yields ``inf``.
    """
    rho = np.asarray(rho, dtype=float)
    r_I = np.asarray(r_I, dtype=float)
    nu = np.asarray(nu, dtype=float)
    share = 1.0 - rho
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        x = math.pi * r_I**2 * params.lam * nu / share
        out = np.expm1(x * math.log(2)) * share / _snr_factor(r_I, params)
        out = np.where(nu == 0, 0.0, out)
        out = np.where(share <= 0, np.inf, out)
    return float(out) if out.ndim == 0 else out


def outage_from_exponent(f):
    f = np.asarray(f, dtype=float)
    out = np.where(f > OUTAGE_SATURATION, 1.0, -np.expm1(-np.minimum(f, OUTAGE_SATURATION)))
    return float(out) if out.ndim == 0 else out


def gbs_outage(vars: DesignVars, nu_bar, params: SystemParams) -> float:
    if vars.r_I <= 0:
        raise DomainError("GBS serves no users (r_I = 0)")
    if nu_bar < 0:
        raise ValueError("target throughput must be non-negative")
    if vars.scheme is Scheme.ORTHOGONAL and vars.rho >= 1:
        raise DomainError("GBS has zero bandwidth (rho = 1) but users to serve")
    rho = vars.rho if vars.scheme is Scheme.ORTHOGONAL else 0.0
    return outage_from_exponent(outage_exponent(rho, vars.r_I, nu_bar, params))


def gbs_max_throughput(rho, r_I, params: SystemParams):
    """Largest common GBS throughput meeting the outage cap (closed form).

    Inverts ``f(rho, r_I, nu) = -ln(1 - P_out_max)``; ``rho = 0`` gives the
    reuse (whole band) value.
    """
    rho = np.asarray(rho, dtype=float)
    r_I = np.asarray(r_I, dtype=float)
    share = 1.0 - rho
    with np.errstate(divide="ignore", invalid="ignore"):
        x = params.outage_exponent_cap * _snr_factor(r_I, params) / np.where(share > 0, share, 1.0)
        out = share * np.log2(1 + x) / (math.pi * r_I**2 * params.lam)
        out = np.where(share > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def gbs_max_throughput_bisect(rho, r_I, params: SystemParams, rel_tol=1e-12) -> float:
    """Bisection counterpart of :func:`gbs_max_throughput`."""
    cap = params.outage_exponent_cap

    def ok(nu):
        return outage_exponent(rho, r_I, nu, params) <= cap

    hi = 1.0 / (params.lam * math.pi * r_I**2)
    while ok(hi):
        hi *= 2
    lo, _ = bisect_monotone(ok, 0.0, hi, rel_tol=rel_tol)
    return lo


def gbs_only_throughput(params: SystemParams, rel_tol=1e-10) -> float:
    """Common throughput of a GBS serving the whole cell with the whole band."""
    return gbs_max_throughput_bisect(0.0, params.r_G, params, rel_tol)


def gbs_only_throughput_closed(params: SystemParams) -> float:
    return gbs_max_throughput(0.0, params.r_G, params)


def throughput_report(vars: DesignVars, params: SystemParams) -> ThroughputReport:
    """Evaluate both tiers at a design and combine them into the common throughput."""
    if vars.scheme is Scheme.GBS_ONLY:
        nu = gbs_max_throughput(0.0, params.r_G, params)
        p = outage_from_exponent(outage_exponent(0.0, params.r_G, nu, params))
        return ThroughputReport(nu, params.lam * nu, 0.0, nu, p)
    R_U = uav_common_throughput(vars, params)
    rho_G = vars.rho if vars.scheme is Scheme.ORTHOGONAL else 0.0
    R_G = gbs_max_throughput(rho_G, vars.r_I, params)
    nu = min(R_U, R_G)
    p = outage_from_exponent(outage_exponent(rho_G, vars.r_I, nu, params))
    return ThroughputReport(nu, params.lam * nu, R_U, R_G, p)
