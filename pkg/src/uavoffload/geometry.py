"""Ring-segment association geometry and the optimal circular trajectory."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class RingSegment:
    """Annular sector between radii ``r_I`` and ``r_G`` spanning angle ``psi``.

    It is symmetric about the UAV's current azimuth; the users inside it are
    the ones associated with the UAV at that instant.
    """

    r_I: float
    r_G: float
    psi: float

    def __post_init__(self):
        if not 0 <= self.r_I < self.r_G:
            raise ValueError(f"need 0 <= r_I < r_G, got r_I={self.r_I}, r_G={self.r_G}")
        if not 0 < self.psi < math.pi:
            raise ValueError(f"need 0 < psi < pi, got {self.psi}")

    @property
    def area(self):
        return (self.r_G**2 - self.r_I**2) * self.psi / 2

    @property
    def inner_arc(self):
        return self.r_I * self.psi

    @property
    def outer_arc(self):
        return self.r_G * self.psi

    def association_time(self, T):
        """Per-user association time within one flying period ``T``."""
        return self.psi * T / (2 * math.pi)

    def expected_count(self, lam):
        """Mean number of users in the segment at any instant (``K_a``)."""
        return lam * self.area


class OptimalRadius(NamedTuple):
    r_U: float
    d_max: float
    clamped: bool


def _cosine_law(r_U, r, psi):
    # clip tiny negative values caused by cancellation at coincident points
    sq = r_U**2 + r**2 - 2 * r_U * r * np.cos(psi / 2)
    return np.sqrt(np.maximum(sq, 0.0))


def dist_to_inner_corner(r_U, seg: RingSegment):
    """Horizontal distance from the UAV at (r_U, 0) to corner A (radius r_I)."""
    return _cosine_law(r_U, seg.r_I, seg.psi)


def dist_to_outer_corner(r_U, seg: RingSegment):
    """Horizontal distance from the UAV at (r_U, 0) to corner B (radius r_G)."""
    return _cosine_law(r_U, seg.r_G, seg.psi)


def worst_case_distance(r_U, seg: RingSegment):
    r_U_arr = np.asarray(r_U, dtype=float)
    tol = 1e-9 * seg.r_G
    if np.any(r_U_arr < seg.r_I - tol) or np.any(r_U_arr > seg.r_G + tol):
        raise ValueError(f"trajectory radius must lie in [r_I, r_G] = [{seg.r_I}, {seg.r_G}]")
    return np.maximum(dist_to_inner_corner(r_U, seg), dist_to_outer_corner(r_U, seg))


def psi_threshold(seg: RingSegment) -> float:
    """Largest central angle for which the equal-corner-distance radius is optimal."""
    return math.acos(seg.r_I / seg.r_G)


def optimal_radius(seg: RingSegment) -> OptimalRadius:
    """Trajectory radius minimising the worst-case UAV-user distance.

    For ``psi <= psi_threshold`` the optimum equalises the distances to the
    two corners; beyond it the optimum sits at the midpoint of the outer
    chord. The result is clamped into ``[r_I, r_G]``, where ``d_max`` is
    monotone on either side of its unconstrained minimiser.
    """
    r_I, r_G, psi = seg.r_I, seg.r_G, seg.psi
    if psi <= psi_threshold(seg):
        r_U = (r_G + r_I) / (2 * math.cos(psi / 2))
        d_max = math.sqrt(max((r_G + r_I) ** 2 / (2 * (math.cos(psi) + 1)) - r_I * r_G, 0.0))
    else:
        r_U = r_G * math.cos(psi / 2)
        d_max = r_G * math.sin(psi / 2)
    clipped = min(max(r_U, r_I), r_G)
    if clipped != r_U:
        return OptimalRadius(clipped, float(worst_case_distance(clipped, seg)), True)
    return OptimalRadius(r_U, d_max, False)


def optimal_worst_distance(r_I, r_G, psi):
    """Vectorised ``d_max`` at the optimal radius, for arrays of ``r_I``.

    Matches :func:`optimal_radius` elementwise; used by the solvers' grid
    searches.
    """
    r_I = np.asarray(r_I, dtype=float)
    psi0 = np.arccos(r_I / r_G)
    equal = np.sqrt(np.maximum((r_G + r_I) ** 2 / (2 * (np.cos(psi) + 1)) - r_I * r_G, 0.0))
    chord = np.full_like(r_I, r_G * math.sin(psi / 2))
    r_U = np.where(psi <= psi0, (r_G + r_I) / (2 * math.cos(psi / 2)), r_G * math.cos(psi / 2))
    d = np.where(psi <= psi0, equal, chord)
    low = r_U < r_I
    if np.any(low):
        at_rI = np.maximum(_cosine_law(r_I, r_I, psi), _cosine_law(r_I, r_G, psi))
        d = np.where(low, at_rI, d)
    return d
