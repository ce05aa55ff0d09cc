import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from uavoffload import analytic as an
from uavoffload import montecarlo as mc
from uavoffload.analytic import DesignVars, Scheme
from uavoffload.phy import SystemParams

P = SystemParams()
ORTH = DesignVars.at_optimal_radius(Scheme.ORTHOGONAL, 0.5, 500.0, P)
REUSE = DesignVars.at_optimal_radius(Scheme.REUSE, 1.0, 600.0, P)


@pytest.fixture(scope="module")
def fields():
    return mc.generate_fields(P.lam, P.r_G, 100, master_seed=7)


def test_poisson_counts(fields):
    n = np.array([len(f) for f in fields])
    mean = P.lam * math.pi * P.r_G**2
    assert_allclose(mean, 3141.6, atol=0.05)
    assert abs(n.mean() - mean) < 3 * math.sqrt(mean / len(n))
    # Poisson dispersion: variance close to the mean
    assert 0.6 < n.var(ddof=1) / mean < 1.5


def test_uniform_on_disk(fields):
    r = np.concatenate([f.r for f in fields])
    phi = np.concatenate([f.phi for f in fields])
    assert stats.kstest(r, lambda x: (x / P.r_G) ** 2).pvalue > 0.01
    assert stats.kstest(phi / (2 * math.pi), "uniform").pvalue > 0.01


def test_field_determinism():
    a = mc.generate_field(P.lam, P.r_G, mc.realization_seed(3, 5))
    b = mc.generate_field(P.lam, P.r_G, mc.realization_seed(3, 5))
    c = mc.generate_field(P.lam, P.r_G, mc.realization_seed(3, 6))
    assert_array_equal(a.r, b.r)
    assert_array_equal(a.phi, b.phi)
    assert len(a) != len(c) or not np.array_equal(a.r, c.r)


def test_segment_counts_match_membership(fields):
    f = fields[0]
    ang = mc.Schedule(800.0).angles()
    assert_array_equal(mc.segment_counts(f.phi, ang, P.psi), mc.segment_membership(f.phi, ang, P.psi).sum(axis=0))


def test_mu_single_user():
    f = mc.UserField(np.array([800.0]), np.array([0.3]), P.lam, P.r_G)
    K_a = ORTH.segment(P).expected_count(P.lam)
    assert_allclose(mc.mu_of_field(f, 500.0, P), 1 / K_a)
    empty = mc.UserField(np.array([100.0]), np.array([0.3]), P.lam, P.r_G)
    assert math.isnan(mc.mu_of_field(empty, 500.0, P))
    with pytest.warns(RuntimeWarning):
        mc.estimate_mu([f, empty], ORTH, P)


def test_mu_at_defaults(fields):
    mu = mc.estimate_mu(fields, ORTH, P)
    assert 1.1 <= mu <= 1.25
    assert mu < 1.5


def test_mu_estimator_floor():
    raw = mc.mu_estimator(n_fields=5, master_seed=1, floor=0.0)(P, ORTH)
    assert mc.mu_estimator(n_fields=5, master_seed=1, floor=5.0)(P, ORTH) == 5.0
    assert mc.mu_estimator(n_fields=5, master_seed=1, floor=1.0)(P, ORTH) == max(1.0, raw)


def test_schedule_delays():
    s = mc.Schedule(776.0, V=30.0)
    assert_allclose(s.T, 2 * math.pi * 776.0 / 30.0)
    assert_allclose(s.association_time(P.psi) + s.access_delay(P.psi), s.T)
    assert_allclose(s.gbs_access_delay(4 * math.pi / 3), s.T / 3)
    t_s, t_e = s.association_window(np.array([0.0, math.pi]), P.psi)
    assert_allclose(t_e - t_s, s.association_time(P.psi))


def _run(field, vars, seed=0, **kw):
    sched = mc.Schedule(vars.r_U, 30.0, 720)
    return mc.simulate_realization(field, vars, P.replace(mu=1.2), sched, rng=mc.realization_seed(seed, 0, 1), **kw)


def test_coverage_and_association_time(fields):
    f = fields[1]
    res = _run(f, ORTH)
    assert res.max_assoc_distance <= res.coverage_radius * (1 + 1e-12)
    sched = mc.Schedule(ORTH.r_U)
    assert np.all(np.abs(res.assoc_time - sched.association_time(P.psi)) <= sched.dt + 1e-9)


def test_adaptive_dominates_bound(fields):
    for f in fields[:5]:
        for v in (ORTH, REUSE):
            res = _run(f, v)
            assert np.all(res.uav_adaptive >= res.uav_bound - 1e-15)
            assert res.theta_U_adaptive >= res.theta_U_bound


def test_adaptive_above_analytic(fields):
    summ = mc.simulate(ORTH, P, n_realizations=10, master_seed=2, fields=fields[:10])
    assert summ.aggregates["theta_U_adaptive"][0] >= summ.analytic["theta_U_bound"]


def test_reuse_sectors_disjoint():
    sched = mc.Schedule(REUSE.r_U, ticks=72)
    probe = np.linspace(0, 2 * math.pi, 20_000, endpoint=False)
    ang = sched.angles()
    uav = mc.segment_membership(probe, ang, P.psi)
    gbs = mc.segment_membership(probe, ang + math.pi, P.Phi_G)
    assert not np.any(uav & gbs)
    with pytest.raises(ValueError):
        mc.simulate_realization(mc.generate_field(P.lam, P.r_G, 0), REUSE, P.replace(Phi_G=2 * math.pi), sched)


def test_zero_fading_step(fields):
    f = fields[2]
    inner = f.r < ORTH.r_I
    K_G = int(inner.sum())
    b = (1 - ORTH.rho) / K_G
    w = (P.H_G**2 + f.r[inner] ** 2) ** (P.n / 2)
    gamma = P.kappa0 * P.P_G / (b * w.sum())
    level = b * math.log2(1 + gamma)
    assert _run(f, ORTH, fading=False, nu_target=level * (1 - 1e-9)).outage == 0.0
    assert _run(f, ORTH, fading=False, nu_target=level * (1 + 1e-9)).outage == 1.0
    # total transmit power is the budget in every tick
    assert_allclose(_run(f, ORTH).gbs_power, P.P_G, rtol=1e-12)


def test_reuse_power_per_tick(fields):
    assert _run(fields[3], REUSE).gbs_power <= P.P_G * (1 + 1e-12)


def test_speed_does_not_change_throughput(fields):
    a = mc.simulate(ORTH, P, n_realizations=3, master_seed=1, V=20.0, fields=fields[:3])
    b = mc.simulate(ORTH, P, n_realizations=3, master_seed=1, V=30.0, fields=fields[:3])
    for name in ("theta_U_bound", "theta_U_adaptive", "theta_G"):
        assert_allclose(a.aggregates[name][0], b.aggregates[name][0], rtol=1e-12)
    assert not np.allclose(a.realizations[0].assoc_time, b.realizations[0].assoc_time)


def test_thread_count_determinism():
    a = mc.simulate(REUSE, P, n_realizations=6, master_seed=11, threads=1)
    b = mc.simulate(REUSE, P, n_realizations=6, master_seed=11, threads=4)
    assert a.aggregates == b.aggregates
    assert a.mu == b.mu


def test_single_realization_aggregate():
    s = mc.simulate(ORTH, P, n_realizations=1, master_seed=4)
    r = s.realizations[0]
    assert s.aggregates["theta_G"] == (r.theta_G, 0.0)
    assert s.aggregates["theta_U_bound"] == (r.theta_U_bound, 0.0)


def test_gbs_only_rejected():
    with pytest.raises(ValueError):
        _run(mc.generate_field(P.lam, P.r_G, 0), DesignVars.gbs_only(P))


def test_empirical_outage_near_cap():
    s = mc.simulate(ORTH, P, n_realizations=10, master_seed=5)
    mean, se = s.aggregates["outage"]
    assert abs(mean - P.P_out_max) < 0.2 * P.P_out_max
    assert_allclose(s.analytic["nu_G"], an.gbs_max_throughput(0.5, 500.0, P.replace(mu=s.mu)))
