"""Bracketing searches shared by the solvers."""

from __future__ import annotations

import math

_INV_PHI = (math.sqrt(5) - 1) / 2


def bisect_monotone(pred, lo, hi, tol=0.0, rel_tol=0.0, max_iter=400):
    """Narrow ``[lo, hi]`` around the switch point of a monotone predicate.

    ``pred(lo)`` must hold and ``pred(hi)`` must fail. Stops once
    ``hi - lo <= max(tol, rel_tol * hi)`` (or when the midpoint stops moving)
    and returns ``(lo, hi)``; ``lo`` is always on the true side.
    """
    for _ in range(max_iter):
        if hi - lo <= max(tol, rel_tol * abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def golden_section_min(f, a, b, tol):
    """Minimise ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included,
    so an ill-shaped bracket never returns something worse than its ends.
    """
    best = min(((a, f(a)), (b, f(b))), key=lambda p: p[1])
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    for p in ((c, fc), (d, fd)):
        if p[1] < best[1]:
            best = p
    return best
