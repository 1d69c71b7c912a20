"""Log-space first-moment formulas.

Binomials and factorials go through ``math.lgamma``; sums of exponentials
through a max-shifted log-sum-exp. Only the explicit main terms are computed.
Every :class:`MomentReport` lists the error factors that were dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .certificate import DomainError

INV_E = math.exp(-1.0)
SIGMA = (3.0 - math.sqrt(5.0)) / 2.0

EXACT_STIRLING_MAX = 60


def log_binom(n: float, k: float) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_falling(k: float, u: int) -> float:
    """``log (k)_u = log k (k-1) ... (k-u+1)``."""
    if u > k:
        return -math.inf
    return math.lgamma(k + 1) - math.lgamma(k - u + 1)


# Stirling numbers of the second kind

@lru_cache(maxsize=None)
def _stirling_row(v: int) -> tuple[int, ...]:
    if v == 0:
        return (1,)
    prev = _stirling_row(v - 1) + (0,)
    return tuple((u * prev[u] if u else 0) + (prev[u - 1] if u else 0) for u in range(v + 1))


def stirling2_exact(v: int, u: int) -> int:
    """``S(v, u)`` as an exact integer, from ``S(v,u) = u S(v-1,u) + S(v-1,u-1)``."""
    if not 0 <= u <= v:
        return 0
    for w in range(v + 1):
        _stirling_row(w)  # fill the cache bottom-up
    return _stirling_row(v)[u]


class _LogStirlingTable:
    def __init__(self):
        self.rows = [np.array([0.0])]

    def row(self, v: int) -> np.ndarray:
        while len(self.rows) <= v:
            prev = self.rows[-1]
            w = len(self.rows)
            cur = np.full(w + 1, -np.inf)
            us = np.arange(1, w)
            with np.errstate(divide="ignore"):
                cur[1:w] = np.logaddexp(np.log(us) + prev[1:w], prev[0:w - 1])
            cur[w] = 0.0
            self.rows.append(cur)
        return self.rows[v]


_log_table = _LogStirlingTable()


def log_stirling2(v: int, u: int) -> float:
    """``log S(v, u)`` by the same recurrence carried out in log space."""
    if not 0 <= u <= v:
        return -math.inf
    return float(_log_table.row(v)[u])


def stirling2(v: int, u: int, log: bool | None = None):
    """Exact integer for ``v <= 60`` (unless ``log=True``), log-space value above."""
    if log is None:
        log = v > EXACT_STIRLING_MAX
    return log_stirling2(v, u) if log else stirling2_exact(v, u)


def bell_exact(v: int) -> int:
    return sum(stirling2_exact(v, u) for u in range(v + 1))


# first moment of Y_n (m = 0, |K| = k, |L| = k - 1, L = Γ(K))

def log_Pnk_uv(n: int, k: int, u: int, v: int) -> float:
    """Log probability that ``v`` columns of ``L`` select into ``K``, hitting exactly ``u`` rows.

    The remaining rows of ``K`` are unpopular and also spend their round-2
    selection inside ``L``.
    """
    if not (0 <= u <= v <= k - 1 and k <= n):
        raise DomainError(f"need 0 <= u <= v <= k-1 < k <= n, got n={n} k={k} u={u} v={v}")
    if k == 1:
        return -math.inf
    ls = log_stirling2(v, u)
    if ls == -math.inf:
        return -math.inf
    tail = (k - 1 - v) * math.log1p(-k / n) if k - 1 - v else 0.0
    return ((2 * k - u) * math.log(k - 1) + log_falling(k, u)
            - (2 * k - u + v) * math.log(n)
            + log_binom(k - 1, v) + tail + ls)


def log_Pnk(n: int, k: int) -> float:
    terms = [log_Pnk_uv(n, k, u, v) for v in range(k) for u in range(v + 1)]
    return float(logsumexp(terms))


def log_Sk_terms(k: int) -> np.ndarray:
    v = np.arange(k)
    lg = np.vectorize(math.lgamma)
    return (lg(k + 1.0) - lg(k - v + 1.0) - v * math.log(k - 1)
            + lg(float(k)) - lg(v + 1.0) - lg(k - v + 0.0))


def log_Sk(k: int) -> float:
    """``log sum_{v<k} (k)_v / (k-1)**v * C(k-1, v)``."""
    if k < 2:
        raise DomainError("k must be >= 2")
    return float(logsumexp(log_Sk_terms(k)))


def H_z(z: float) -> float:
    if not 0 < z < 1:
        raise DomainError("z must lie in (0, 1)")
    return -z - 2.0 * (1.0 - z) * math.log1p(-z) - z * math.log(z)


def H_z_second(z: float) -> float:
    return -2.0 / (1.0 - z) - 1.0 / z


H_SIGMA = H_z(SIGMA)
LAMBDA = 1.0 - INV_E + H_SIGMA


def log_Sk_asymptotic(k: int) -> float:
    """Gaussian-sum approximation ``sigma + k H(sigma) - 0.5 log(sigma (-H''(sigma)))``."""
    return SIGMA + k * H_SIGMA - 0.5 * math.log(SIGMA * -H_z_second(SIGMA))


def yn_k(n: int, delta: float) -> int:
    return int(math.floor(n ** delta + 1e-9))


def log_E_Yn(n: int, delta: float = 0.3, k: int | None = None) -> float:
    """Log of the main term of ``E[Y_n]`` with ``k = floor(n**delta)``.

    ``(k-1)**(2k) / (k! (k-1)! n) * exp(-k (1 + 1/e)) * S_k``; the
    ``1 + O(n**(-1/2 + delta + eps))`` factor and the additive
    ``exp(-Θ(n**(2 eps)))`` term are dropped. ``k`` overrides ``delta``.
    """
    if k is None:
        if not 0 < delta < 0.5:
            raise DomainError("delta must lie in (0, 1/2)")
        k = yn_k(n, delta)
    if k < 2:
        raise DomainError(f"k = {k} < 2")
    return (2 * k * math.log(k - 1) - math.lgamma(k + 1) - math.lgamma(k) - math.log(n)
            - k * (1.0 + INV_E) + log_Sk(k))


# bounds for m >= 1

def log_Enk_smallk(n: int, k: int, m: int) -> float:
    """Log of the explicit part of the ``k <= sqrt(n)`` bad-pair bound."""
    if not 1 <= k <= math.sqrt(n):
        raise DomainError("need 1 <= k <= sqrt(n)")
    if m < 0:
        raise DomainError("m must be non-negative")
    return (math.log(k / n) + 2 * log_binom(n, k) + 2 * k * math.log(k / n)
            - k * (2 * m + 1) / (m + 1))


def log_Xk_bound(n: int, k: int, m: int) -> float:
    """``-(2m/(m+1)) log C(n, k)``: bound on balanced components with ``k`` rows."""
    if m < 1:
        raise DomainError("the component bound is vacuous for m = 0")
    if not 1 <= k <= n / 2:
        raise DomainError("need 1 <= k <= n/2")
    return -(2.0 * m / (m + 1)) * log_binom(n, k)


def log_Xk_sum(n: int, m: int) -> float:
    ks = np.arange(1, n // 2 + 1)
    terms = [log_Xk_bound(n, int(k), m) for k in ks]
    return float(logsumexp(terms))


@dataclass
class MomentReport:
    n: int
    m: int | None
    k: int | None
    delta: float | None
    values: dict = field(default_factory=dict)
    omitted: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[str, object]]:
        out = [("n", self.n), ("m", self.m), ("k", self.k), ("delta", self.delta)]
        out += list(self.values.items())
        out += [(f"omitted:{name}", note) for name, note in self.omitted.items()]
        return out


def moment_report(n: int, m: int = 1, k: int | None = None, delta: float = 0.3) -> MomentReport:
    """Evaluate every applicable moment quantity for ``(n, m, k, delta)``.

    ``log_E_Yn`` uses ``k = floor(n**delta)``. The small-``k`` bound uses
    ``k`` when given. The component bound is summed over ``k <= n/2`` for
    ``m >= 1``.
    """
    rep = MomentReport(n, m, k, delta)
    ky = yn_k(n, delta)
    rep.values["H_sigma"] = H_SIGMA
    rep.values["lambda"] = LAMBDA
    rep.values["k_Yn"] = ky
    if ky >= 2:
        rep.values["log_Sk"] = log_Sk(ky)
        rep.values["log_E_Yn"] = log_E_Yn(n, delta)
        rep.omitted["log_E_Yn"] = "main-term-only: (1+O(n^(-1/2+delta+eps))) factor and exp(-Theta(n^(2eps))) term dropped"
    if m is not None and k is not None:
        rep.values["log_Enk_smallk"] = log_Enk_smallk(n, k, m)
        rep.omitted["log_Enk_smallk"] = "main-term-only: exp(O(k^(m/(m+1)) + k^2/n)) factor dropped"
    if m is not None and m >= 1:
        if k is not None:
            rep.values["log_Xk_bound"] = log_Xk_bound(n, k, m)
        if n <= 10**7:
            rep.values["log_Xk_sum"] = log_Xk_sum(n, m)
        rep.omitted["log_Xk_bound"] = "upper bound, not an estimate"
    return rep
