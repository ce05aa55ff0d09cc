import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate

from uavoffload import analytic as an
from uavoffload.analytic import DesignVars, DomainError, Scheme
from uavoffload.phy import SystemParams

P = SystemParams()
P1W = SystemParams(P_U=1.0)


def orth(rho, r_I, params=P):
    return DesignVars.at_optimal_radius(Scheme.ORTHOGONAL, rho, r_I, params)


def reuse(r_I, params=P):
    return DesignVars.at_optimal_radius(Scheme.REUSE, 1.0, r_I, params)


def test_bandwidth_terms_example():
    _, b_min = an.bandwidth_terms(orth(0.5, 500.0), P)
    assert_allclose(b_min, 2 * 0.5 / (1e-3 * 7.5e5 * math.pi / 6), rtol=1e-12)
    assert_allclose(b_min, 2.546e-3, rtol=1e-3)
    _, b0 = an.bandwidth_terms(DesignVars(Scheme.ORTHOGONAL, 0.0, 500.0, 776.0), P)
    assert b0 == 0.0
    with pytest.raises(DomainError):
        an.bandwidth_terms(DesignVars(Scheme.ORTHOGONAL, 1.0, 0.0, 500.0), P)


def test_uav_throughput_zero_bandwidth():
    assert an.uav_common_throughput(DesignVars(Scheme.ORTHOGONAL, 0.0, 500.0, 776.0), P) == 0.0


def test_reuse_is_orthogonal_at_full_band():
    for r_I in (200.0, 500.0, 800.0):
        a = an.uav_common_throughput(reuse(r_I), P)
        b = an.uav_common_throughput(orth(1.0, r_I), P)
        assert a == b


def test_precancel_form_matches():
    for rho, r_I in [(0.2, 300.0), (0.5, 500.0), (0.9, 850.0)]:
        v = orth(rho, r_I)
        assert_allclose(an.uav_common_throughput_precancel(v, P), an.uav_common_throughput(v, P), rtol=1e-13)


def test_theta_u_reference_design():
    # crowding factor from the Monte Carlo estimate at this design
    p = P1W.replace(mu=1.165)
    theta = p.lam * an.uav_common_throughput(orth(0.5, 500.0, p), p) * 1e6
    assert_allclose(theta, 3.0, rtol=0.01)


def test_uav_max_throughput_composition():
    v = orth(0.4, 600.0)
    assert_allclose(an.uav_max_throughput(0.4, 600.0, P), an.uav_common_throughput(v, P), rtol=1e-13)
    rho = np.linspace(0.1, 0.9, 9)
    assert np.all(np.diff(an.uav_max_throughput(rho, 500.0, P)) > 0)
    assert an.uav_max_throughput(0.5, 600.0, P) > an.uav_max_throughput(0.5, 500.0, P)


@pytest.mark.parametrize("n", [2.0, 3.0, 3.7])
def test_radial_integral_quadrature(n):
    p = P.replace(n=n)
    for r_I in (10.0, 500.0, 1000.0):
        ref, _ = integrate.quad(lambda r: (p.H_G**2 + r**2) ** (n / 2) * r, 0, r_I, epsabs=0, epsrel=1e-12)
        assert_allclose(an.radial_power_integral(r_I, p), ref, rtol=1e-9)
    if n == 2.0:
        r_I = 500.0
        assert_allclose(an.radial_power_integral(r_I, p), (p.H_G**2 * r_I**2 + r_I**4 / 2) / 2, rtol=1e-12)


def test_avg_snr_relations():
    g_orth0 = an.gbs_avg_snr(DesignVars(Scheme.ORTHOGONAL, 0.0, 500.0, 700.0), P)
    g_reuse = an.gbs_avg_snr(reuse(500.0), P)
    assert g_reuse == g_orth0
    vals = [an.gbs_avg_snr(reuse(500.0, P.replace(Phi_G=phi)), P.replace(Phi_G=phi))
            for phi in (math.pi / 2, math.pi, 4 * math.pi / 3)]
    assert vals[0] == vals[1] == vals[2]
    with pytest.raises(DomainError):
        an.gbs_avg_snr(DesignVars(Scheme.ORTHOGONAL, 1.0, 500.0, 700.0), P)


@pytest.mark.parametrize("scheme, width", [(Scheme.ORTHOGONAL, 2 * math.pi), (Scheme.REUSE, 4 * math.pi / 3)])
def test_power_conservation(scheme, width):
    v = orth(0.5, 500.0) if scheme is Scheme.ORTHOGONAL else reuse(500.0)
    radial, _ = integrate.quad(lambda r: P.lam * an.gbs_power_profile(r, v, P) * r, 0, v.r_I,
                               epsabs=0, epsrel=1e-12)
    assert_allclose(width * radial, P.P_G, rtol=1e-6)


def test_power_profile_increasing():
    r = np.linspace(0, 500.0, 300)
    p = an.gbs_power_profile(r, orth(0.5, 500.0), P)
    assert np.all(np.diff(p) > 0)
    with pytest.raises(DomainError):
        an.gbs_power_profile(600.0, orth(0.5, 500.0), P)


def test_outage_basics():
    assert an.gbs_outage(orth(0.5, 500.0), 0.0, P) == 0.0
    nu = an.gbs_max_throughput(0.5, 500.0, P)
    assert_allclose(an.gbs_outage(orth(0.5, 500.0), nu, P), P.P_out_max, rtol=1e-8)
    assert an.outage_from_exponent(1e6) == 1.0
    assert an.outage_exponent(1.0, 500.0, 1e-3, P) == math.inf


@given(st.floats(0.05, 0.95), st.floats(50.0, 950.0), st.floats(1e-5, 1e-2))
def test_reuse_outage_lower(rho, r_I, nu):
    o = an.gbs_outage(orth(rho, r_I), nu, P)
    r = an.gbs_outage(reuse(r_I), nu, P)
    assert r <= o


def test_outage_rayleigh_sampling():
    # empirical fraction of Rayleigh draws with rate below target
    v = orth(0.5, 500.0)
    nu = an.gbs_max_throughput(0.5, 500.0, P)
    b = (1 - v.rho) / (P.lam * math.pi * v.r_I**2)
    gamma = an.gbs_avg_snr(v, P)
    zeta = np.random.default_rng(12345).exponential(size=200_000)
    hit = b * np.log2(1 + gamma * zeta) < nu
    p_hat = hit.mean()
    se = math.sqrt(p_hat * (1 - p_hat) / hit.size)
    assert abs(p_hat - an.gbs_outage(v, nu, P)) < 3 * se


def test_closed_form_vs_bisection():
    for rho, r_I in [(0.0, 1000.0), (0.3, 400.0), (0.7, 800.0)]:
        a = an.gbs_max_throughput(rho, r_I, P)
        b = an.gbs_max_throughput_bisect(rho, r_I, P)
        assert_allclose(a, b, rtol=1e-8)
    assert_allclose(an.gbs_only_throughput(P), an.gbs_only_throughput_closed(P), rtol=1e-8)


def test_gbs_only_limits_and_independence():
    small = an.gbs_only_throughput_closed(P.replace(P_out_max=1e-12))
    assert small < 1e-3 * an.gbs_only_throughput_closed(P)
    ref = an.gbs_only_throughput(P)
    for ch in ({"psi": 0.3}, {"Phi_G": math.pi}, {"H_U": 300.0}):
        assert an.gbs_only_throughput(P.replace(**ch)) == ref
    p_out = an.outage_from_exponent(an.outage_exponent(0.0, P.r_G, ref, P))
    assert_allclose(p_out, P.P_out_max, rtol=1e-8)


def test_gbs_only_reference_density():
    # pooled 40 dBm + 20 dBm, 180 users/km^2 -> about 100 kbps per user
    p = P.replace(P_G=10.0 + 0.1, lam=180e-6)
    rate = an.gbs_only_throughput(p) * p.W
    assert_allclose(rate, 1e5, rtol=0.1)


@settings(max_examples=200)
@given(st.floats(0.05, 0.9), st.floats(0.01, 0.05), st.floats(50.0, 900.0), st.floats(1.0, 50.0))
def test_monotonicity_battery(rho, drho, r_I, dr):
    u = lambda a, b: an.uav_max_throughput(a, b, P)  # noqa: E731
    g = lambda a, b: an.gbs_max_throughput(a, b, P)  # noqa: E731
    assert u(rho + drho, r_I) > u(rho, r_I)
    assert u(rho, r_I + dr) > u(rho, r_I)
    assert g(rho + drho, r_I) < g(rho, r_I)
    assert g(rho, r_I + dr) < g(rho, r_I)
    nu = g(rho, r_I)
    assert an.outage_exponent(rho, r_I, 1.1 * nu, P) > an.outage_exponent(rho, r_I, nu, P)
    assert an.outage_exponent(rho + drho, r_I, nu, P) > an.outage_exponent(rho, r_I, nu, P)


def test_throughput_report_consistency():
    v = orth(0.6, 550.0)
    rep = an.throughput_report(v, P)
    assert rep.nu_bar == min(rep.R_U_bar, rep.R_G_bar)
    assert_allclose(rep.theta, P.lam * rep.nu_bar)
    assert rep.p_out <= P.P_out_max * (1 + 1e-9)
    g = an.throughput_report(DesignVars.gbs_only(P), P)
    assert g.R_U_bar == 0.0
    assert_allclose(g.p_out, P.P_out_max, rtol=1e-8)
