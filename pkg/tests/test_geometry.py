import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from uavoffload import geometry as geo
from uavoffload.geometry import RingSegment


SEG = RingSegment(500.0, 1000.0, math.pi / 6)


def test_segment_basics():
    assert_allclose(SEG.area, 7.5e5 * math.pi / 12)
    assert_allclose(SEG.expected_count(1e-3), SEG.area * 1e-3)
    assert_allclose(SEG.association_time(120.0), 10.0)
    assert_allclose(SEG.inner_arc, 500 * math.pi / 6)
    with pytest.raises(ValueError):
        RingSegment(1000.0, 1000.0, 0.5)
    with pytest.raises(ValueError):
        RingSegment(0.0, 1000.0, 0.0)


def test_corner_distances():
    tiny = RingSegment(500.0, 1000.0, 1e-12)
    assert_allclose(geo.dist_to_inner_corner(500.0, tiny), 0.0, atol=1e-6)
    assert_allclose(geo.dist_to_outer_corner(1000.0, tiny), 0.0, atol=1e-6)
    wide = RingSegment(500.0, 1000.0, math.pi * (1 - 1e-15))
    # corners sit at +-psi/2 from the UAV azimuth, so a half-disk puts A at 90 degrees
    assert_allclose(geo.dist_to_inner_corner(500.0, wide), 500.0 * math.sqrt(2), rtol=1e-9)
    assert_allclose(geo.dist_to_outer_corner(0.0, SEG), 1000.0)
    assert_allclose(geo.dist_to_inner_corner(776.46, SEG), 320.8, atol=0.1)
    assert_allclose(geo.dist_to_outer_corner(776.46, SEG), 320.8, atol=0.1)


def test_worst_case_distance():
    assert_allclose(geo.worst_case_distance(500.0, SEG), geo.dist_to_outer_corner(500.0, SEG))
    assert_allclose(geo.worst_case_distance(776.46, SEG), 320.8, atol=0.1)
    r = np.linspace(500, 1000, 11)
    expect = np.maximum(geo.dist_to_inner_corner(r, SEG), geo.dist_to_outer_corner(r, SEG))
    assert_allclose(geo.worst_case_distance(r, SEG), expect)
    with pytest.raises(ValueError):
        geo.worst_case_distance(400.0, SEG)


def test_psi_threshold():
    assert_allclose(geo.psi_threshold(SEG), math.pi / 3)
    assert_allclose(geo.psi_threshold(RingSegment(0.0, 1000.0, 0.1)), math.pi / 2)
    assert geo.psi_threshold(RingSegment(999.999, 1000.0, 0.1)) < 0.05


def test_optimal_radius_reference():
    opt = geo.optimal_radius(SEG)
    assert abs(opt.r_U - 776) <= 1
    assert_allclose(opt.d_max, 320.8, atol=0.05)
    assert not opt.clamped
    # brute force over 10^4 radii
    r = np.linspace(500, 1000, 10_000)
    d = geo.worst_case_distance(r, SEG)
    assert opt.d_max <= d.min() + 1e-9
    assert abs(r[np.argmin(d)] - opt.r_U) < 0.1


def test_branches_agree_at_threshold():
    psi0 = geo.psi_threshold(SEG)
    seg = RingSegment(500.0, 1000.0, psi0)
    equal = math.sqrt((1500.0) ** 2 / (2 * (math.cos(psi0) + 1)) - 500.0 * 1000.0)
    chord = 1000.0 * math.sin(psi0 / 2)
    assert_allclose(equal, chord, rtol=1e-9)
    assert_allclose(geo.optimal_radius(seg).d_max, chord, rtol=1e-9)


def test_clamping_wide_angle():
    # cos(psi/2) * r_G < r_I beyond twice the threshold
    seg = RingSegment(900.0, 1000.0, 2.0)
    opt = geo.optimal_radius(seg)
    assert opt.clamped and opt.r_U == 900.0
    assert_allclose(opt.d_max, geo.worst_case_distance(900.0, seg))


@settings(max_examples=500, deadline=None)
@given(st.floats(0.0, 0.98), st.floats(0.02, 3.1))
def test_grid_oracle(frac, psi):
    seg = RingSegment(frac * 1000.0, 1000.0, psi)
    opt = geo.optimal_radius(seg)
    r = np.linspace(seg.r_I, seg.r_G, 4001)
    d = geo.worst_case_distance(r, seg)
    # grid slack: d_max is 1-Lipschitz in r_U
    assert opt.d_max <= d.min() + 1e-9 * seg.r_G
    assert d.min() - opt.d_max <= (r[1] - r[0])
    assert_allclose(opt.d_max, geo.worst_case_distance(opt.r_U, seg), rtol=1e-9, atol=1e-9)


@given(st.lists(st.floats(0.0, 990.0), min_size=1, max_size=20), st.floats(0.05, 3.0))
def test_vectorised_matches_scalar(r_I, psi):
    vec = geo.optimal_worst_distance(np.array(r_I), 1000.0, psi)
    ref = [geo.optimal_radius(RingSegment(r, 1000.0, psi)).d_max for r in r_I]
    assert_allclose(vec, ref, rtol=1e-12, atol=1e-9)
