import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammainc

from pmdigraph.certificate import (
    INF, CertParams, CertVars, DomainError, H, H_rho_form, H_value, c_m, component_H,
    component_slope_sup, expq, f, g_m, gamma_closed, gamma_general, k_n, log_Enk_envelope, q,
    rho_m, small_t_start, u_from_rho,
)

E = math.e


def g_m1_explicit(t, y, z):
    eta = y + z
    ft = t * math.exp(t - 1)
    return (math.exp(eta) - 1 + (2 - t) * ft) / (math.exp(eta) - 1 - eta + (y + z * (2 - t)) * ft)


def H_m1_explicit(n, t, x, y, z, rho):
    """Hand-expanded m = 1 exponent with rho as the free variable."""
    eta = y + z
    ft = t * math.exp(t - 1)
    g = g_m1_explicit(t, y, z)
    s = g * rho / (x * (1 - t))
    return (-2 * t + (1 - t) * math.log((1 - (2 - t) * ft) / (1 - t)) + t * math.log(1 - t)
            + t * math.log((math.exp(eta) - 1 - eta + (y + z * (2 - t)) * ft) / (y * z))
            + t * math.log(t * (1 + x) / (E * rho))
            + rho + z * (math.exp(x) - 1 - x) / (1 + x) * s ** 2 - math.log(1 - s) / n)


def random_points(count, seed):
    rnd = np.random.default_rng(seed)
    for _ in range(count):
        t = float(rnd.uniform(0.001, 0.5))
        x, y, z = (float(a) for a in np.exp(rnd.uniform(-4, 1.5, 3)))
        u = float(rnd.uniform(0.02, 0.98))
        yield t, x, y, z, u


def test_f():
    assert f(1.0) == 1.0 and f(0.0) == 0.0
    assert f(0.5) == pytest.approx(0.3032653, abs=1e-7)


def test_q_and_expq():
    for w in (-2.0, 0.0, 0.3, 5.0):
        assert q(w, 0) == 1.0
        assert q(w, -1) == 0.0
    assert expq(0.0, 1) == 0.0
    assert expq(1.0, 2) == pytest.approx(E - 2, abs=1e-15)
    assert expq(1.0, 0) == pytest.approx(E)


@pytest.mark.parametrize("w", [1e-8, 1e-4, 0.01, 0.5, 3.0, 20.0])
@pytest.mark.parametrize("k", [1, 2, 3, 5, 9])
def test_expq_against_incomplete_gamma(w, k):
    ref = math.exp(w) * gammainc(k, w)
    assert expq(w, k) == pytest.approx(ref, rel=1e-12)


def test_g_m_against_explicit_m1():
    assert g_m(0.5, 1.0, 1.0, 1) == pytest.approx(g_m1_explicit(0.5, 1.0, 1.0), rel=1e-14)
    assert g_m(0.5, 1.0, 1.0, 1) == pytest.approx(1.329641, abs=1e-6)
    for t, _, y, z, _ in random_points(300, 1):
        assert g_m(t, y, z, 1) == pytest.approx(g_m1_explicit(t, y, z), rel=1e-12)


def test_g_m_positive():
    rnd = np.random.default_rng(2)
    for _ in range(10_000):
        t = rnd.uniform(1e-6, 0.999)
        y, z = np.exp(rnd.uniform(-12, 3, 2))
        assert g_m(t, y, z, int(rnd.integers(0, 6))) > 0


def test_g_m_blows_up_near_zero():
    small = g_m(0.3, 1e-6, 1e-6, 1)
    assert small > 1e5 * g_m(0.3, 1.0, 1.0, 1)
    qm, qm1, ft = q(0.7, 1), q(0.7, 0), f(0.3)
    lead = qm * ft / (1e-6 * qm1 * ft + 1e-6 * qm * ft + 0.5 * (2e-6) ** 2)
    assert small == pytest.approx(lead, rel=1e-5)


def test_rho_round_trip_and_example():
    v = CertVars(1.0, 1.0, 1.0, 0.5)
    assert rho_m(0.5, v, 1) == pytest.approx(0.25 / 1.329641, rel=1e-6)
    assert rho_m(0.5, CertVars(1.0, 1.0, 1.0, 1.0), 1) == 0.0
    for m in (0, 1, 3):
        for t, x, y, z, u in random_points(1000 // 3, 3 + m):
            rho = rho_m(t, CertVars(x, y, z, u), m)
            assert u_from_rho(t, x, y, z, rho, m) == pytest.approx(u, abs=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2, 4])
def test_u_form_equals_rho_form(m):
    n = 1000
    for t, x, y, z, u in random_points(1000, 10 + m):
        rho = rho_m(t, CertVars(x, y, z, u), m)
        a = H_value(n, m, t, x, y, z, u)
        b = H_rho_form(n, m, t, x, y, z, rho)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_H_m1_matches_hand_expansion():
    for t, x, y, z, u in random_points(500, 20):
        rho = rho_m(t, CertVars(x, y, z, u), 1)
        assert H_value(5000, 1, t, x, y, z, u) == pytest.approx(
            H_m1_explicit(5000, t, x, y, z, rho), rel=1e-10, abs=1e-12)


def test_H_domain():
    p = CertParams(100, 1, 0.1)
    assert H(p, CertVars(1, 1, 1, 1.0)) == math.inf
    for bad in [(0, 1, 1, 0.5), (1, -1, 1, 0.5), (1, 1, 1, 0.0), (1, 1, 1, 1.5)]:
        with pytest.raises(DomainError):
            H_value(100, 1, 0.1, *bad)
        with pytest.raises(DomainError):
            CertVars(*bad)
    # log divergence as u -> 1
    vals = [H_value(100, 1, 0.1, 1, 1, 1, 1 - 10.0 ** -e) for e in (2, 4, 8, 12)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-4, 0.5), st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 5),
       st.floats(0.01, 0.99), st.integers(0, 3))
def test_H_finite_on_open_domain(t, x, y, z, u, m):
    assert math.isfinite(H_value(1000, m, t, x, y, z, u))
    assert math.isfinite(H_value(None, m, t, x, y, z, u))


def test_small_t_rate_converges():
    """``H / t -> -gamma_m`` along the power-law path; error shrinks like ``t**(1/3)``."""
    for m in (0, 1):
        errs = []
        for t in (1e-4, 1e-6, 1e-8, 1e-10):
            v = small_t_start(m, t)
            errs.append(abs(H_value(None, m, t, *v.as_tuple()) / t + gamma_closed(m)))
        assert all(a > b for a, b in zip(errs, errs[1:]))
        for a, b in zip(errs, errs[1:]):
            assert 0.1 < b / a < 0.35  # ratio ~ (1e-2)**(1/3)
        assert errs[-1] < 1e-3


def test_gamma_values():
    assert gamma_general(1, 1, 1, 1) == pytest.approx(1 + 2 / E - math.log(2), abs=1e-14)
    assert gamma_general(0, math.sqrt(3), 1, 1 / math.sqrt(3)) == pytest.approx(
        1 + 1 / E - math.log(math.sqrt(3) + 2), abs=1e-14)
    assert gamma_closed(1) == pytest.approx(1.0426, abs=1e-4)
    assert gamma_closed(0) == pytest.approx(0.0509, abs=1e-4)
    assert gamma_closed(INF) == pytest.approx(2 - math.log(2), abs=1e-15)
    g = [gamma_closed(m) for m in range(30)]
    assert all(a < b for a, b in zip(g[:15], g[1:15]))
    assert all(a <= b for a, b in zip(g, g[1:]))
    assert g[-1] == pytest.approx(gamma_closed(INF), abs=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_gamma_closed_is_grid_max(m):
    grid = np.geomspace(0.05, 20, 50)
    best = max(gamma_general(m, b1, b2, c) for b1 in grid for b2 in grid for c in grid)
    assert best <= gamma_closed(m) + 1e-12
    assert best > gamma_closed(m) - 1e-2


def test_c_m():
    assert c_m(1) == pytest.approx(0.514, abs=1e-3)
    assert c_m(INF) == 1.0
    c = [c_m(m) for m in range(1, 21)]
    assert all(a < b for a, b in zip(c, c[1:])) and c[-1] < 1
    with pytest.raises(DomainError):
        c_m(0)
    with pytest.raises(DomainError):
        k_n(0, 100)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_envelope(m):
    n = 1e8
    assert log_Enk_envelope(n, 1, m) == pytest.approx(-math.log(n) + 1 / (m + 1))
    ks = np.arange(1, int(math.sqrt(n)) + 1)
    env = np.array([log_Enk_envelope(n, k, m) for k in ks])
    i = int(env.argmax())
    assert (np.diff(env[: i + 1]) >= 0).all() and (np.diff(env[i:]) <= 0).all()
    kstar = 1.5 * math.log(n) / (1 / (m + 1) + gamma_closed(m))
    assert kstar == pytest.approx(k_n(m, n), rel=1e-12)
    assert abs(ks[i] - kstar) <= 1
    assert abs(env[i] + c_m(m) * math.log(n)) <= 1 + gamma_closed(m)


def test_component_exponent():
    assert component_slope_sup() <= -0.648
    vals = [abs(component_H(x, x / 2)) for x in (1e-2, 1e-4, 1e-6)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-4
    with pytest.raises(DomainError):
        component_H(0.1, 0.2)
    with pytest.raises(DomainError):
        component_H(0.7, 0.5)
