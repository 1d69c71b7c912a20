"""Closed-form pieces of the matching certificate.

``H(t; x, y, z, u)`` is the scaled log of an upper bound on the expected
number of minimal bad pairs ``(K, L)`` with ``|K| = tn``. Negativity of
``min_r H`` over ``t in [1/n, 1/2]`` is what the optimizer checks.

All arithmetic is plain 64-bit float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import INF

E = math.e
INV_E = math.exp(-1.0)
SQRT3 = math.sqrt(3.0)


class DomainError(ValueError):
    """Argument outside the region where a formula is defined."""


@dataclass(frozen=True)
class CertVars:
    x: float
    y: float
    z: float
    u: float

    def __post_init__(self):
        if not (self.x > 0 and self.y > 0 and self.z > 0):
            raise DomainError(f"x, y, z must be > 0: {self}")
        if not 0 < self.u <= 1:
            raise DomainError(f"u must lie in (0, 1]: {self}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.z, self.u)


@dataclass(frozen=True)
class CertParams:
    """``n = None`` (or ``INF``) drops the ``-log(u)/n`` term."""

    n: int | float | None
    m: int
    t: float

    def __post_init__(self):
        if self.n is not None and self.n != INF and self.n < 1:
            raise DomainError("n must be positive")
        if self.m < 0:
            raise DomainError("m must be non-negative")
        if not 0 < self.t < 1:
            raise DomainError("t must lie in (0, 1)")


def f(t: float) -> float:
    return t * math.exp(t - 1.0)


def q(w: float, k: int) -> float:
    """Partial exponential sum ``sum_{j<=k} w**j / j!``; zero for ``k < 0``."""
    if k < 0:
        return 0.0
    term = total = 1.0
    for j in range(1, k + 1):
        term *= w / j
        total += term
    return total


def _exp_tail_series(w: float, k: int) -> float:
    term = 1.0
    for j in range(1, k + 1):
        term *= w / j
    total = 0.0
    j = k
    while True:
        total += term
        j += 1
        term *= w / j
        if abs(term) <= 1e-17 * abs(total) or term == 0.0:
            return total


def expq(w: float, k: int) -> float:
    """Exponential tail ``sum_{j>=k} w**j / j! = e**w - q(w, k-1)``.

    Falls back to summing the tail directly when the subtraction would lose
    more than one decimal digit.
    """
    if k <= 0:
        return math.exp(w)
    ew = math.exp(w)
    val = ew - q(w, k - 1)
    if abs(val) < 0.1 * abs(ew):
        return _exp_tail_series(w, k)
    return val


def _tq(m: int, t: float):
    """``(q_m(1-t), q_{m-1}(1-t), f(t))``."""
    return q(1.0 - t, m), q(1.0 - t, m - 1), f(t)


def g_m(t: float, y: float, z: float, m: int) -> float:
    qm, qm1, ft = _tq(m, t)
    eta = y + z
    num = expq(eta, 1) + qm * ft
    den = expq(eta, 2) + (y * qm1 + z * qm) * ft
    if den <= 0:
        raise DomainError(f"g_m denominator {den} <= 0")
    return num / den


def rho_m(t: float, vars: CertVars, m: int) -> float:
    x, y, z, u = vars.as_tuple()
    return (1.0 - t) * (1.0 - u) * x / g_m(t, y, z, m)


def u_from_rho(t: float, x: float, y: float, z: float, rho: float, m: int) -> float:
    """Inverse of :func:`rho_m` in ``u``."""
    return 1.0 - g_m(t, y, z, m) * rho / ((1.0 - t) * x)


def _t_part(m: int, t: float) -> float:
    qm, _, ft = _tq(m, t)
    return -2.0 * t + (1.0 - t) * math.log((1.0 - qm * ft) / (1.0 - t)) + t * math.log(1.0 - t)


def _inv_n(n) -> float:
    return 0.0 if n is None or n == INF else 1.0 / n


def H_value(n, m: int, t: float, x: float, y: float, z: float, u: float) -> float:
    """``H_{n,m}(t; x, y, z, u)`` evaluated term by term.

    Raises :class:`DomainError` unless ``x, y, z > 0`` and ``0 < u <= 1``;
    ``u = 1`` gives ``+inf``.
    """
    if not (x > 0 and y > 0 and z > 0) or not 0 < u <= 1:
        raise DomainError(f"infeasible point x={x}, y={y}, z={z}, u={u}")
    qm, qm1, ft = _tq(m, t)
    eta = y + z
    den = expq(eta, 2) + (y * qm1 + z * qm) * ft
    g = (expq(eta, 1) + qm * ft) / den
    rho = (1.0 - t) * (1.0 - u) * x / g
    if rho == 0.0:
        return math.inf
    qx = q(x, m)
    return (
        -2.0 * t + (1.0 - t) * math.log((1.0 - qm * ft) / (1.0 - t)) + t * math.log(1.0 - t)
        + t * math.log(den / (y * z))
        + t * math.log(t * qx / (E * rho)) + rho
        + z * expq(x, m + 1) / qx * (1.0 - u) ** (m + 1)
        - _inv_n(n) * math.log(u)
    )


def H(params: CertParams, vars: CertVars) -> float:
    return H_value(params.n, params.m, params.t, *vars.as_tuple())


def H_rho_form(n, m: int, t: float, x: float, y: float, z: float, rho: float) -> float:
    """The same exponent written with ``rho`` as the free variable.

    Here the last two terms carry ``g * rho / (x (1 - t))`` explicitly instead
    of ``1 - u``. Agrees with :func:`H_value` at ``rho = rho_m(u)``.
    """
    if not (x > 0 and y > 0 and z > 0 and rho > 0):
        raise DomainError("x, y, z, rho must be > 0")
    pm, pm1, ft = _tq(m, t)
    eta = y + z
    den = expq(eta, 2) + (y * pm1 + z * pm) * ft
    g = (expq(eta, 1) + pm * ft) / den
    s = g * rho / (x * (1.0 - t))
    if s >= 1:
        raise DomainError("g*rho/(x(1-t)) must be < 1")
    return (
        -2.0 * t + (1.0 - t) * math.log((1.0 - pm * ft) / (1.0 - t)) + t * math.log(1.0 - t)
        + t * math.log(den / (y * z))
        + t * math.log(t * q(x, m) / (E * rho)) + rho
        + z * expq(x, m + 1) / q(x, m) * s ** (m + 1)
        - _inv_n(n) * math.log(1.0 - s)
    )


def H_grad(n, m: int, t: float, x: float, y: float, z: float, u: float) -> np.ndarray:
    """Analytic gradient of :func:`H_value` in ``(x, y, z, u)``."""
    if not (x > 0 and y > 0 and z > 0) or not 0 < u < 1:
        raise DomainError("gradient needs x, y, z > 0 and 0 < u < 1")
    qm, qm1, ft = _tq(m, t)
    eta = y + z
    e_eta = math.exp(eta)
    e1 = expq(eta, 1)
    num = e1 + qm * ft
    den = expq(eta, 2) + (y * qm1 + z * qm) * ft
    rho = (1.0 - t) * (1.0 - u) * x * den / num
    den_y = e1 + qm1 * ft
    den_z = e1 + qm * ft
    qx, qx1 = q(x, m), q(x, m - 1)
    tail = expq(x, m + 1)
    ratio = tail / qx
    ratio_x = (expq(x, m) * qx - tail * qx1) / (qx * qx)
    w = (1.0 - u) ** (m + 1)

    dx = t * qx1 / qx - t / x + rho / x + z * ratio_x * w
    dy = t * e_eta / num - t / y + rho * (den_y / den - e_eta / num)
    dz = t * e_eta / num - t / z + rho * (den_z / den - e_eta / num) + ratio * w
    du = (t / (1.0 - u) - rho / (1.0 - u)
          - (m + 1) * z * ratio * (1.0 - u) ** m - _inv_n(n) / u)
    return np.array([dx, dy, dz, du])


def small_t_start(m: int, t: float, sigma: float = 1.0 / 3.0) -> CertVars:
    """Power-law point ``x = a t**s, y = b1 t**s, z = b2 t**s, rho = c t``.

    Uses the rate-optimal constants: ``a = b1 = b2 = c = 1`` for ``m > 0`` and
    ``b1 = sqrt(3), c = 1/sqrt(3)`` for ``m = 0``; ``u`` follows from ``rho``.
    """
    s = t ** sigma
    if m == 0:
        x, y, z, rho = s, SQRT3 * s, s, t / SQRT3
    else:
        x, y, z, rho = s, s, s, t
    return CertVars(x, y, z, u_from_rho(t, x, y, z, rho, m))


# small-t rates and the resulting exponents

def gamma_general(m: int, b1: float, b2: float, c: float) -> float:
    """Decay rate of ``H`` along the power-law path with constants ``(b1, b2, c)``."""
    if not (b1 > 0 and b2 > 0 and c > 0):
        raise DomainError("b1, b2, c must be > 0")
    val = (1.0 + INV_E * q(1.0, m)
           - math.log((b1 + b2) ** 2 / (2.0 * b1 * b2))
           - (math.log(1.0 / (E * c)) + c))
    if m == 0:
        val -= 2.0 * b2 * c / (b1 + b2)
    return val


def gamma_closed(m) -> float:
    """Maximum of :func:`gamma_general` over ``(b1, b2, c)``."""
    if m == INF:
        return 2.0 - math.log(2.0)
    if m < 0:
        raise DomainError("m must be non-negative")
    if m == 0:
        return 1.0 + INV_E - math.log(SQRT3 + 2.0)
    return 1.0 + INV_E * q(1.0, int(m)) - math.log(2.0)


def c_m(m) -> float:
    """Exponent in ``P(no perfect matching) = O(n**(-c_m + o(1)))``."""
    if m == INF:
        return 1.0
    if m < 1:
        raise DomainError("c_m is defined for m >= 1")
    return 1.0 - 1.5 / (1.0 + (m + 1) * gamma_closed(m))


def k_n(m, n: float) -> float:
    """Maximizer in ``k`` of :func:`log_Enk_envelope`."""
    if m < 1 or m == INF:
        raise DomainError("k_n is defined for finite m >= 1")
    return 1.5 * (m + 1) * math.log(n) / ((m + 1) * (1.0 + INV_E * q(1.0, m) - math.log(2.0)) + 1.0)


def log_Enk_envelope(n: float, k: float, m: int) -> float:
    """``min(-log n + k/(m+1), 0.5 log n - gamma_m k)``; error terms omitted."""
    if m < 1:
        raise DomainError("envelope is stated for m >= 1")
    ln = math.log(n)
    return min(-ln + k / (m + 1), 0.5 * ln - gamma_closed(m) * k)


# component exponent for B_{n,0}

def component_H(x: float, y: float) -> float:
    """Exponent bounding the expected number of components with ``k = xn`` rows, ``l = yn`` columns."""
    if not (0 < y <= x and x + y <= 1):
        raise DomainError(f"need 0 < y <= x and x + y <= 1, got x={x}, y={y}")
    lx, l1x = math.log(x), math.log1p(-x)
    ly, l1y = math.log(y), math.log1p(-y)
    return (
        -x * lx - (1 - x) * l1x - y * ly - (1 - y) * l1y
        + y * lx + (1 - x) * l1y
        + (2 * x - y) * ly + (1 + x - 2 * y) * l1x
        + y * math.log1p(-math.exp(-x / y) * (1 - x))
        + (1 - x) * math.log1p(-math.exp(-(1 - y) / (1 - x)) * y)
    )


def _slope_profile(z):
    z = np.asarray(z, dtype=float)
    return 2 * (1 - z) * np.log(z) + z * (np.log1p(-np.exp(-1 / z)) - INV_E)


def _slope_profile_prime(z: float) -> float:
    s = math.exp(-1 / z)
    return -2 * math.log(z) + 2 * (1 - z) / z + math.log1p(-s) - INV_E - s / (z * (1 - s))


def component_slope_sup(grid: int = 100_000) -> float:
    """``sup_{0<z<=1} 2(1-z) log z + z (log(1 - e**(-1/z)) - 1/e)``.

    Dense grid, then one Newton step on the derivative. The profile tends to
    ``-inf`` as ``z -> 0``, so the left end needs no special handling.
    """
    z = np.linspace(1.0 / grid, 1.0, grid)
    vals = _slope_profile(z)
    i = int(np.argmax(vals))
    best_z, best = float(z[i]), float(vals[i])
    if 0 < i < grid - 1:
        h = 1e-6
        d1 = _slope_profile_prime(best_z)
        d2 = (_slope_profile_prime(best_z + h) - _slope_profile_prime(best_z - h)) / (2 * h)
        if d2 < 0:
            z_new = best_z - d1 / d2
            if 0 < z_new <= 1:
                best = max(best, float(_slope_profile(z_new)))
    return best
