"""Micro-cell offloading benchmark: M small cells on a ring around the GBS.

Each micro BS gets ``rho_micro / M`` of the band and ``P_micro / M`` of the
power, shares both among its own users (equal bandwidth, slow channel
inversion) and the GBS serves everyone left uncovered with the rest of the
band. Per-tier throughput is the outage-constrained common rate; since the
average SNR is fixed once the locations are, the Rayleigh outage is exact
given the realization and no fading draws are needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .phy import SystemParams, db_to_linear, dbm_to_watt

DEFAULT_RHO_GRID = tuple(np.round(np.arange(0.05, 0.951, 0.05), 10))
DEFAULT_R_GRID = tuple(float(r) for r in range(50, 501, 50))


def default_d_grid(r_G):
    return tuple(float(x) * r_G for x in np.round(np.arange(0.5, 0.951, 0.05), 10))


@dataclass(frozen=True)
class MicroLayout:
    M: int
    d_micro: float
    r_micro: float
    rho_micro: float = 0.5
    H_micro: float = 10.0
    G_micro: float = float(db_to_linear(8.0))
    P_micro: float = float(dbm_to_watt(40.0))

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("need at least one micro BS")
        if self.d_micro <= 0 or self.r_micro < 0:
            raise ValueError("need d_micro > 0 and r_micro >= 0")
        if not 0 < self.rho_micro < 1:
            raise ValueError("rho_micro must lie in (0, 1)")

    def positions(self):
        ang = 2 * math.pi * np.arange(self.M) / self.M
        return np.column_stack([self.d_micro * np.cos(ang), self.d_micro * np.sin(ang)])


def assign_users(field, layout: MicroLayout):
    """Serving micro BS index per user, or -1 for the GBS.

    A covered user goes to its nearest micro BS; ties go to the lower index.
    """
    d = _distances(field, layout)
    nearest = np.argmin(d, axis=1)
    covered = d[np.arange(len(d)), nearest] <= layout.r_micro
    return np.where(covered, nearest, -1)


def _distances(field, layout):
    xy = field.xy
    bs = layout.positions()
    return np.hypot(xy[:, None, 0] - bs[None, :, 0], xy[:, None, 1] - bs[None, :, 1])


def allocations(field, layout: MicroLayout, params: SystemParams):
    """Per-user normalised bandwidth and transmit power under ``layout``.

    Returns ``(labels, bandwidth, power)``; used to check that the tiers'
    budgets balance.
    """
    labels = assign_users(field, layout)
    d = _distances(field, layout)
    band = np.zeros(len(labels))
    power = np.zeros(len(labels))
    for m in range(-1, layout.M):
        sel = labels == m
        if not sel.any():
            continue
        if m < 0:
            share, ptot = 1 - layout.rho_micro, params.P_G
            w = (params.H_G**2 + field.r[sel] ** 2) ** (params.n / 2)
        else:
            share, ptot = layout.rho_micro / layout.M, layout.P_micro / layout.M
            w = (layout.H_micro**2 + d[sel, m] ** 2) ** (params.n / 2)
        band[sel] = share / sel.sum()
        power[sel] = ptot * w / w.sum()
    return labels, band, power


def _tier_stats(field, layout, params):
    """Counts and channel-inversion sums for the GBS and each micro BS."""
    labels = assign_users(field, layout)
    d = _distances(field, layout)
    g_sel = labels < 0
    gbs = (int(g_sel.sum()), float(((params.H_G**2 + field.r[g_sel] ** 2) ** (params.n / 2)).sum()))
    micro = []
    for m in range(layout.M):
        sel = labels == m
        if sel.any():
            micro.append((int(sel.sum()), float(((layout.H_micro**2 + d[sel, m] ** 2) ** (params.n / 2)).sum())))
    return gbs, micro


def _common_rate(share, count, weight_sum, power, kappa, cap):
    # per-user outage-constrained rate with equal bandwidth and slow channel inversion
    share = np.asarray(share, dtype=float)
    return share / count * np.log2(1 + cap * kappa * power * count / (share * weight_sum))


def realization_curve(field, layout: MicroLayout, params: SystemParams, rho_grid):
    """``min(nu_G, nu_micro)`` of one realization for every ``rho_micro`` in the grid."""
    rho = np.asarray(rho_grid, dtype=float)
    cap = params.outage_exponent_cap
    (n_g, s_g), micro = _tier_stats(field, layout, params)
    kappa_micro = params.alpha0 * layout.G_micro / params.sigma2
    nu = np.full(rho.shape, np.inf)
    if n_g:
        nu = _common_rate(1 - rho, n_g, s_g, params.P_G, params.kappa0, cap)
    for n_m, s_m in micro:
        nu = np.minimum(nu, _common_rate(rho / layout.M, n_m, s_m, layout.P_micro / layout.M, kappa_micro, cap))
    return nu


def evaluate_layout(fields, layout: MicroLayout, params: SystemParams):
    """Mean over realizations of the min-tier throughput; returns ``(nu_bar, theta)``."""
    vals = [float(realization_curve(f, layout, params, [layout.rho_micro])[0]) for f in fields]
    nu = math.fsum(vals) / len(vals)
    return nu, params.lam * nu


@dataclass(frozen=True)
class MicroResult:
    layout: MicroLayout
    nu_bar: float
    theta: float
    evaluated: int


def optimize_layout(M, params: SystemParams, fields, d_grid=None, r_grid=DEFAULT_R_GRID,
                    rho_grid=DEFAULT_RHO_GRID, base: MicroLayout | None = None, pool=None) -> MicroResult:
    """Exhaustive search over ``(d_micro, r_micro)`` with an inner search over ``rho_micro``.

    ``rho_micro`` is common to all realizations: for each placement the
    realization-averaged min throughput is maximised over the ``rho`` grid.
    ``pool`` (an executor) parallelises over placements.
    """
    d_grid = default_d_grid(params.r_G) if d_grid is None else d_grid
    base = base or MicroLayout(M, d_grid[0], r_grid[0])
    base = replace(base, M=M)
    rho = np.asarray(rho_grid, dtype=float)
    cells = list(itertools.product(d_grid, r_grid))

    def score(cell):
        lay = replace(base, d_micro=float(cell[0]), r_micro=float(cell[1]))
        curves = np.array([realization_curve(f, lay, params, rho) for f in fields])
        mean = curves.mean(axis=0)
        j = int(np.argmax(mean))
        return float(mean[j]), float(rho[j])

    scores = list(pool.map(score, cells)) if pool is not None else [score(c) for c in cells]
    k = max(range(len(cells)), key=lambda i: (scores[i][0], -i))
    (dm, rm), (nu, rho_best) = cells[k], scores[k]
    best = replace(base, d_micro=float(dm), r_micro=float(rm), rho_micro=rho_best)
    nu, theta = evaluate_layout(fields, best, params)
    return MicroResult(best, nu, theta, len(cells) * len(rho))
