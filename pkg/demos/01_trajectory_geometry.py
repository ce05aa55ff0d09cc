"""Where should the UAV circle?

The UAV serves the users inside a ring segment of angle psi that rotates
with it. Its beam has to reach the farthest point of that segment, so the
best trajectory radius is the one that minimises the worst-case distance.
"""

import math

import numpy as np

from uavoffload import geometry as geo
from uavoffload.phy import uav_beam_gain

r_G = 1000.0
psi = math.pi / 6

# %% The reference layout: users beyond 500 m go to the UAV
seg = geo.RingSegment(500.0, r_G, psi)
opt = geo.optimal_radius(seg)
print(f"optimal radius   r_U* = {opt.r_U:.1f} m")
print(f"worst distance   d*   = {opt.d_max:.1f} m")
print(f"beam gain        G_U  = {uav_beam_gain(opt.d_max, 100.0):.3f}")

# %% Sweep r_U by brute force and see the V-shaped worst-case distance
r = np.linspace(seg.r_I, seg.r_G, 11)
closest = r[np.argmin(np.abs(r - opt.r_U))]
for ru, d in zip(r, geo.worst_case_distance(r, seg)):
    marker = "  <- closest to r_U*" if ru == closest else ""
    print(f"  r_U = {ru:6.1f} m   d_max = {d:6.1f} m{marker}")

# %% Past the threshold angle the optimum jumps to the outer chord midpoint
print(f"threshold angle for r_I = 500 m: {math.degrees(geo.psi_threshold(seg)):.1f} deg")
for deg in (30, 60, 90, 120):
    o = geo.optimal_radius(geo.RingSegment(500.0, r_G, math.radians(deg)))
    print(f"  psi = {deg:3d} deg   r_U* = {o.r_U:6.1f}   d* = {o.d_max:6.1f}   clamped = {o.clamped}")
