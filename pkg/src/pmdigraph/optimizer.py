"""Penalized Nelder-Mead minimization of the certificate exponent.

:func:`sweep` walks the grid ``t = k/n`` upward, warm-starting each
minimization from the previous minimizer, and records ``min_r H(t; r)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

import numpy as np

from .certificate import CertVars, DomainError, H_value, rho_m, small_t_start

log = logging.getLogger(__name__)

BIG = 1e12

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class SimplexConfig:
    func_tol: float = 1e-8
    opt_tol: float = 1e-8
    max_iters: int = 100_000
    penalty_P: float = 1e4
    restart_count: int = 1

    def __post_init__(self):
        if not (self.func_tol > 0 and self.opt_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.penalty_P > 0:
            raise ValueError("penalty_P must be positive")
        if self.max_iters < 1 or self.restart_count < 0:
            raise ValueError("max_iters must be >= 1 and restart_count >= 0")


@dataclass
class SimplexResult:
    x: np.ndarray
    value: float
    converged: bool
    iterations: int
    evaluations: int
    history: list = field(default_factory=list, repr=False)

    def __iter__(self):
        # unpacks as (x, value, converged)
        return iter((self.x, self.value, self.converged))


def penalty(v: Sequence[float], P: float) -> float:
    """``P * (sum over negative coordinates)**2``."""
    s = 0.0
    for a in v:
        if a < 0:
            s += a
    return P * s * s


def penalized(objective: Callable, P: float) -> Callable:
    """Objective plus penalty; points where the objective is undefined score ``BIG``."""
    def wrapped(v):
        try:
            val = objective(v)
        except (ValueError, ArithmeticError):
            val = BIG
        if not math.isfinite(val) or val > BIG:
            val = BIG
        return val + penalty(v, P)
    return wrapped


def initial_simplex(x0: np.ndarray) -> np.ndarray:
    pts = [x0]
    for i in range(x0.size):
        p = x0.copy()
        p[i] += max(0.05 * abs(x0[i]), 1e-3)
        pts.append(p)
    return np.array(pts)


def _nelder_mead(fun, x0, config: SimplexConfig, iters_left: int, history: list | None):
    sim = initial_simplex(np.asarray(x0, dtype=float))
    fs = np.array([fun(p) for p in sim])
    nev = len(fs)
    npts = sim.shape[0]
    it = 0
    converged = False
    while True:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if history is not None:
            history.append(float(fs[0]))
        if (np.max(np.abs(fs[1:] - fs[0])) <= config.func_tol
                and np.max(np.abs(sim[1:] - sim[0])) <= config.opt_tol):
            converged = True
            break
        if it >= iters_left:
            break
        it += 1

        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = fun(xr)
        nev += 1
        if fr < fs[0]:
            xe = centroid + EXPAND * (centroid - worst)
            fe = fun(xe)
            nev += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + CONTRACT * (xr - centroid)
                fc = fun(xc)
                nev += 1
                accept = fc <= fr
            else:
                xc = centroid + CONTRACT * (worst - centroid)
                fc = fun(xc)
                nev += 1
                accept = fc < fs[-1]
            if accept:
                sim[-1], fs[-1] = xc, fc
            else:
                for i in range(1, npts):
                    sim[i] = sim[0] + SHRINK * (sim[i] - sim[0])
                    fs[i] = fun(sim[i])
                nev += npts - 1
    return sim[0].copy(), float(fs[0]), converged, it, nev


def minimize(objective: Callable, start, config: SimplexConfig | None = None,
             gradient: Callable | None = None, keep_history: bool = False) -> SimplexResult:
    """Nelder-Mead on ``objective + P * (sum of negative coordinates)**2``.

    Runs to convergence (value spread <= ``func_tol`` and simplex size <=
    ``opt_tol``), then restarts ``restart_count`` times from a fresh simplex
    around the incumbent. Never raises on non-convergence; the result carries
    ``converged=False`` instead. ``gradient`` is accepted for interface
    parity and is not used.
    """
    config = config or SimplexConfig()
    x0 = np.asarray(start.as_tuple() if isinstance(start, CertVars) else start, dtype=float)
    fun = penalized(objective, config.penalty_P)
    history = [] if keep_history else None
    best_x, best_f = x0, fun(x0)
    total_it = total_ev = 0
    converged = False
    for _ in range(config.restart_count + 1):
        x, val, converged, it, nev = _nelder_mead(
            fun, best_x, config, config.max_iters - total_it, history)
        total_it += it
        total_ev += nev
        if val <= best_f:
            best_x, best_f = x, val
        if not converged:
            break
    return SimplexResult(best_x, best_f, converged, total_it, total_ev, history or [])


@dataclass(frozen=True)
class SweepPoint:
    k: int
    t: float
    vars: CertVars
    rho: float
    H_min: float
    converged: bool


@dataclass
class SweepTrajectory:
    n: int
    m: int
    points: list[SweepPoint] = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    @property
    def H(self) -> np.ndarray:
        return np.array([p.H_min for p in self.points])

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)

    def at(self, t: float, tol: float = 1e-12) -> SweepPoint:
        for p in self.points:
            if abs(p.t - t) <= tol:
                return p
        raise KeyError(t)


def certificate_objective(n, m: int, t: float) -> Callable:
    def objective(v):
        return H_value(n, m, t, v[0], v[1], v[2], v[3])
    return objective


def _start_vars(m: int, t: float) -> np.ndarray:
    try:
        return np.array(small_t_start(m, t).as_tuple())
    except DomainError:
        # power-law start gives u <= 0 far from t = 0
        s = t ** (1.0 / 3.0)
        return np.array([s, s, s, 0.5])


def minimize_at(n, m: int, k: int, start, config: SimplexConfig | None = None) -> SweepPoint:
    """Minimize ``H_{n,m}(k/n; r)`` from ``start`` (a :class:`CertVars` or 4-vector)."""
    t = k / n
    res = minimize(certificate_objective(n, m, t), start, config)
    x, y, z, u = (float(a) for a in res.x)
    vars = CertVars(x, y, z, u)
    return SweepPoint(k, t, vars, rho_m(t, vars, m), res.value, res.converged)


def sweep_grid(n: int, k_from: int = 1, k_to: int | None = None, stride: int = 1) -> list[int]:
    top = math.ceil(n / 2)
    k_to = top if k_to is None else k_to
    if not 1 <= k_from <= k_to <= top:
        raise ValueError(f"need 1 <= k_from <= k_to <= ceil(n/2) = {top}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    ks = list(range(k_from, k_to + 1, stride))
    if ks[-1] != k_to:
        ks.append(k_to)
    return ks


def iter_sweep(n: int, m: int, ks: Sequence[int], config: SimplexConfig | None = None,
               start=None) -> Iterator[SweepPoint]:
    """Yield minimizers along ``ks`` (strictly increasing), warm-starting each from the last."""
    prev = None
    for k in ks:
        if prev is not None and k <= prev.k:
            raise ValueError("grid must be strictly increasing")
        if prev is None:
            x0 = np.asarray(start.as_tuple(), dtype=float) if isinstance(start, CertVars) else (
                np.asarray(start, dtype=float) if start is not None else _start_vars(m, k / n))
        else:
            x0 = np.asarray(prev.vars.as_tuple())
        pt = minimize_at(n, m, k, x0, config)
        if not pt.converged:
            log.warning("no convergence at n=%d m=%d k=%d", n, m, k)
        prev = pt
        yield pt


def sweep(n: int, m: int, k_from: int = 1, k_to: int | None = None, stride: int = 1,
          config: SimplexConfig | None = None, ks: Sequence[int] | None = None,
          start=None) -> SweepTrajectory:
    """Warm-started minimization over ``t = k/n``.

    The default grid is ``k_from, k_from + stride, ...`` up to ``k_to``
    (default ``ceil(n/2)``, always included). ``ks`` overrides the grid.
    The first point starts from :func:`~pmdigraph.certificate.small_t_start`.
    """
    grid = list(ks) if ks is not None else sweep_grid(n, k_from, k_to, stride)
    return SweepTrajectory(n, m, list(iter_sweep(n, m, grid, config, start)))


def zero_crossing(traj: SweepTrajectory) -> float | None:
    """First grid ``t`` with ``H >= 0`` immediately after a negative value."""
    if not traj.points:
        raise ValueError("empty trajectory")
    H = traj.H
    for i in range(1, len(H)):
        if H[i - 1] < 0 <= H[i]:
            return traj.points[i].t
    return None


def locate_zero_crossing(n: int, m: int, stride: int = 1, k_to: int | None = None,
                         config: SimplexConfig | None = None) -> tuple[float | None, SweepTrajectory]:
    """Coarse sweep at ``stride`` until the sign flips, then re-sweep the bracket at stride 1.

    Returns the crossing on the full ``1/n`` grid and the points evaluated.
    """
    grid = sweep_grid(n, 1, k_to, stride)
    traj = SweepTrajectory(n, m)
    prev = None
    for pt in iter_sweep(n, m, grid, config):
        if prev is not None and prev.H_min < 0 <= pt.H_min:
            if pt.k - prev.k == 1:
                traj.points.append(pt)
                return pt.t, traj
            fine = iter_sweep(n, m, range(prev.k + 1, pt.k + 1), config, start=prev.vars)
            for fp in fine:
                traj.points.append(fp)
                if fp.H_min >= 0:
                    return fp.t, traj
            return pt.t, traj
        traj.points.append(pt)
        prev = pt
    return None, traj


def slope_fit(traj: SweepTrajectory, count: int = 100) -> float:
    """Least-squares slope of ``H`` against ``t`` over the first ``count`` points."""
    if len(traj.points) < count:
        raise ValueError(f"need at least {count} points, have {len(traj.points)}")
    t = traj.t[:count]
    h = traj.H[:count]
    A = np.column_stack([t, np.ones_like(t)])
    (slope, _), *_ = np.linalg.lstsq(A, h, rcond=None)
    return float(slope)


def with_overrides(config: SimplexConfig, **kw) -> SimplexConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
