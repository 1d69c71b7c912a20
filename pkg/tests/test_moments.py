import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import logsumexp

from pmdigraph.certificate import DomainError
from pmdigraph.moments import (
    H_SIGMA, LAMBDA, SIGMA, bell_exact, log_E_Yn, log_Enk_smallk, log_Pnk, log_Pnk_uv,
    log_Sk, log_Sk_asymptotic, log_Sk_terms, log_stirling2, log_Xk_bound, log_Xk_sum, H_z,
    moment_report, stirling2, stirling2_exact,
)


def test_stirling_small():
    for v in range(1, 15):
        assert stirling2_exact(v, v) == 1 and stirling2_exact(v, 1) == 1
    assert stirling2_exact(4, 2) == 7
    assert bell_exact(5) == 52
    assert stirling2_exact(0, 0) == 1 and stirling2_exact(3, 0) == 0 and stirling2_exact(3, 4) == 0


def test_stirling_matches_inclusion_exclusion():
    for v in range(12):
        for u in range(v + 1):
            ref = sum((-1) ** j * math.comb(u, j) * (u - j) ** v for j in range(u + 1)) // math.factorial(u)
            assert stirling2_exact(v, u) == ref


def test_stirling_log_vs_exact():
    worst = 0.0
    for v in range(1, 61):
        for u in range(1, v + 1):
            exact = math.log(stirling2_exact(v, u))
            worst = max(worst, abs(log_stirling2(v, u) - exact) / max(1.0, abs(exact)))
    assert worst < 1e-10
    assert isinstance(stirling2(61, 3), float) and isinstance(stirling2(60, 3), int)


def test_Pnk_empty_partition():
    n, k = 1000, 7
    ref = 2 * k * math.log((k - 1) / n) + (k - 1) * math.log(1 - k / n)
    assert log_Pnk_uv(n, k, 0, 0) == pytest.approx(ref, rel=1e-13)


def _enumerated_Pnk(n, k):
    """Exact probabilities by enumerating every selection outcome that matters.

    Rows of K are ``0..k-1`` and columns of L are ``0..k-2``. Each L column
    picks any of ``n`` rows; ``v`` of them land in K covering ``u`` rows.
    Each K row picks a column in L in round 1, and each K row not picked by
    an L column picks in L again in round 2.
    """
    per_target = Fraction(1, n)
    hits_L = Fraction(sum(1 for c in range(n) if c < k - 1), n)
    out = {}
    for picks in itertools.product(range(n), repeat=k - 1):
        inside = [r for r in picks if r < k]
        u, v = len(set(inside)), len(inside)
        p = per_target ** (k - 1) * hits_L ** k * hits_L ** (k - u)
        out[u, v] = out.get((u, v), 0) + p
    return out


def test_Pnk_against_enumeration():
    n, k = 30, 4
    table = _enumerated_Pnk(n, k)
    for (u, v), p in table.items():
        assert log_Pnk_uv(n, k, u, v) == pytest.approx(math.log(p), rel=1e-12)
    for v in range(k):
        for u in range(v + 1):
            if (u, v) not in table:
                assert log_Pnk_uv(n, k, u, v) == -math.inf
    assert log_Pnk(n, k) == pytest.approx(math.log(sum(table.values())), rel=1e-12)


def test_Pnk_log_concavity_step():
    n, k = 10_000, 50
    for v in range(2, k):
        floor = math.log(stirling2_exact(v, v) / stirling2_exact(v, v - 1))
        for u in range(1, v):
            ratio = log_Pnk_uv(n, k, u + 1, v) - log_Pnk_uv(n, k, u, v)
            assert ratio >= math.log(n * (k - u) / (k - 1)) + floor - 1e-9


def test_Pnk_domain():
    with pytest.raises(DomainError):
        log_Pnk_uv(100, 5, 3, 2)
    with pytest.raises(DomainError):
        log_Pnk_uv(100, 5, 0, 5)
    assert log_Pnk_uv(100, 1, 0, 0) == -math.inf


def test_Sk_direct_and_asymptotic():
    k = 9
    direct = sum(math.perm(k, v) / (k - 1) ** v * math.comb(k - 1, v) for v in range(k))
    assert log_Sk(k) == pytest.approx(math.log(direct), rel=1e-13)
    assert abs(log_Sk(100) - log_Sk_asymptotic(100)) <= 0.02 * abs(log_Sk(100))


def test_Sk_term_ratio_decreasing():
    d = np.diff(log_Sk_terms(50))
    assert (np.diff(d) < 0).all()


def test_logsumexp_permutation_invariant():
    terms = log_Sk_terms(400)
    rnd = np.random.default_rng(0)
    base = logsumexp(terms)
    for _ in range(5):
        assert abs(logsumexp(rnd.permutation(terms)) - base) <= 1e-12 * abs(base)


def test_H_z_concave_with_max_at_sigma():
    z = np.linspace(0.001, 0.999, 2001)
    h = np.array([H_z(a) for a in z])
    assert (np.diff(h, 2) < 0).all()
    assert abs(z[h.argmax()] - SIGMA) < 1e-3
    assert H_z(SIGMA) == pytest.approx(-SIGMA - 2 * math.log(1 - SIGMA), abs=1e-15)
    assert LAMBDA == pytest.approx(1 - math.exp(-1) + H_SIGMA, abs=1e-15)


def test_E_Yn():
    assert log_E_Yn(10**6, 0.3) > 0
    k = 63
    step = log_E_Yn(10**6, k=k + 1) - log_E_Yn(10**6, k=k)
    assert step == pytest.approx(LAMBDA, rel=0.05)
    with pytest.raises(DomainError):
        log_E_Yn(10**6, 0.6)


def test_smallk_bound():
    n, m = 10**6, 1
    assert log_Enk_smallk(n, 1, m) == pytest.approx(-math.log(n) - (2 * m + 1) / (m + 1), abs=1e-9)
    assert abs(log_Enk_smallk(n, 20, m) - (-math.log(n) + 20 / (m + 1))) < 8
    n = 10**8
    top = int((m + 1 - 0.1) * math.log(n))
    total = sum(math.exp(log_Enk_smallk(n, k, m)) for k in range(1, top + 1))
    assert total < n ** (-0.1 / (m + 1))


def test_component_bound():
    n = 10**6
    assert log_Xk_bound(n, 1, 1) == pytest.approx(-math.log(n), rel=1e-12)
    assert log_Xk_bound(n, 1, 3) == pytest.approx(-1.5 * math.log(n), rel=1e-12)
    assert 0.5 / n <= math.exp(log_Xk_sum(n, 1)) <= 2.0 / n
    b = [log_Xk_bound(1000, k, 2) for k in range(1, 501)]
    assert all(x > y for x, y in zip(b, b[1:]))
    with pytest.raises(DomainError):
        log_Xk_bound(n, 3, 0)


def test_report_flags():
    rep = moment_report(10**6, 1, 20, 0.3)
    vals = dict(rep.rows())
    assert all(math.isfinite(v) for v in rep.values.values())
    assert "main-term-only" in rep.omitted["log_E_Yn"]
    assert "main-term-only" in rep.omitted["log_Enk_smallk"]
    assert vals["log_Enk_smallk"] == log_Enk_smallk(10**6, 20, 1)
    assert "log_Xk_bound" in rep.omitted
