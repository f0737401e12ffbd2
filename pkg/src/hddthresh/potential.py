"""Potential functions for the no-miscorrection recursions.

Finite n:   U_n(x; p)  = int_0^x (z - f_n(z; p)) dz, with the idealized table
High rate:  U(lam; rho) = int_0^lam (z - rho * phi(z; t-1)) dz

Both updates are linear in the channel parameter, so U = s^2/2 - param * G(s)
with G the integral of the update at unit parameter.  The potential
threshold is the largest parameter keeping min U >= 0.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import betainc, gammainc

from .de import ThresholdResult
from .errors import ConfigurationError, DomainError, NumericalConsistencyError

QUAD_EPSABS = 1e-12


def idealized_update(z, p: float, n: int, t: int):
    """f_n(z; p) under the no-miscorrection table: p * P[Binom(n-1, z) >= t]."""
    return p * betainc(t, n - t, np.clip(z, 0.0, 1.0))


def phi_tail(z, k: int):
    """phi(z; k) = P[Poisson(z) > k] as a regularized lower incomplete gamma."""
    return gammainc(k + 1, np.maximum(z, 0.0))


def _integral(fn: Callable[[float], float], a: float, b: float, points=None) -> float:
    if b <= a:
        return 0.0
    val, _ = quad(fn, a, b, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=400, points=points)
    return val


def _check_nt(n: int, t: int) -> None:
    if not 1 <= t < n:
        raise ConfigurationError(f"need 1 <= t < n, got n={n}, t={t}")


def potential_value(x: float, p: float, n: int, t: int) -> float:
    """U_n(x; p) by adaptive quadrature."""
    if not 0.0 <= x <= 1.0:
        raise ConfigurationError(f"x must lie in [0, 1], got {x}")
    _check_nt(n, t)
    mode = min(max((t - 1) / (n - 1), 0.0), x)
    pts = [mode] if 0.0 < mode < x else None
    return _integral(lambda z: z - float(idealized_update(z, p, n, t)), 0.0, x, pts)


def scaled_potential_value(lam: float, rho: float, t: int) -> float:
    """U(lam; rho) by adaptive quadrature."""
    if lam < 0:
        raise ConfigurationError("lam must be nonnegative")
    if t < 1:
        raise ConfigurationError("t must be positive")
    return _integral(lambda z: z - rho * float(phi_tail(z, t - 1)), 0.0, lam)


def _cumulative(fn: Callable[[float], float], grid: np.ndarray) -> np.ndarray:
    """int_0^{grid[k]} fn, accumulated interval by interval."""
    out = np.zeros(grid.size)
    acc = 0.0
    prev = 0.0
    for k, g in enumerate(grid):
        acc += _integral(fn, prev, float(g))
        out[k] = acc
        prev = float(g)
    return out


@dataclass
class _Landscape:
    """U(s; a) = s^2/2 - a * G(s) tabulated on a grid, with a quadrature refiner."""

    grid: np.ndarray
    G: np.ndarray
    value: Callable[[float, float], float]

    def minimum(self, a: float) -> tuple[float, float]:
        u = 0.5 * self.grid ** 2 - a * self.G
        k = int(np.argmin(u))
        best_s, best = float(self.grid[k]), float(u[k])
        if 0 < k < self.grid.size - 1:
            lo, mid, hi = self.grid[k - 1], self.grid[k], self.grid[k + 1]
            try:
                res = minimize_scalar(lambda s: self.value(s, a), bracket=(lo, mid, hi), method="golden",
                                      options={"xtol": 1e-10})
            except ValueError:  # quadrature noise broke the tabulated bracket; keep the grid point
                res = None
            if res is not None and lo <= res.x <= hi and res.fun < best:
                best_s, best = float(res.x), float(res.fun)
        return min(best, 0.0) if best_s == 0.0 else best, best_s


def _bisect_potential(land: _Landscape, lo: float, hi: float, tol: float) -> ThresholdResult:
    """sup{a : min U(.; a) >= 0} with a running monotonicity check."""
    history = []

    def nonneg(a):
        m, s = land.minimum(a)
        history.append((a, m, s))
        return m >= -QUAD_EPSABS

    if not nonneg(lo):
        raise NumericalConsistencyError(f"min U < 0 already at the lower bracket {lo}")
    if nonneg(hi):
        raise NumericalConsistencyError(f"min U >= 0 at the upper bracket {hi}")
    evals = 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        evals += 1
        if nonneg(mid):
            lo = mid
        else:
            hi = mid
    ordered = sorted(history)
    mins = np.array([m for _, m, _ in ordered])
    if np.any(np.diff(mins) > 1e-9):
        raise NumericalConsistencyError("min U is not nonincreasing in the channel parameter")
    res = ThresholdResult(0.5 * (lo + hi), lo, hi, tol, evals)
    # direct form: the threshold equals inf_s s^2 / (2 G(s)) over the grid
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(land.G > 0, 0.5 * land.grid ** 2 / land.G, np.inf)
    k = int(np.argmin(ratio))
    res.extra.update(direct=float(ratio[k]), argmin_state=float(land.grid[k]))
    return res


def potential_threshold_finite(n: int, t: int, tol: float = 1e-7, points: int = 4000) -> ThresholdResult:
    """p_n** for the idealized (C, m) ensemble; ``per_constraint`` holds n * p_n**."""
    _check_nt(n, t)
    if tol <= 0:
        raise ConfigurationError("tolerance must be positive")
    grid = np.unique(np.concatenate([np.linspace(0.0, min(1.0, 8.0 * t / n), points),
                                     np.linspace(min(1.0, 8.0 * t / n), 1.0, points // 4)]))
    G = _cumulative(lambda z: float(idealized_update(z, 1.0, n, t)), grid)
    land = _Landscape(grid, G, lambda s, a: potential_value(float(np.clip(s, 0, 1)), a, n, t))
    res = _bisect_potential(land, 0.0, 1.0, tol)
    res.per_constraint = n * res.threshold
    res.extra.update(n=n, t=t, regime="finite_n")
    return res


def scaled_potential_threshold(t: int, tol: float = 1e-5, cap_factor: float = 4.0,
                               points: int = 3000) -> ThresholdResult:
    """rho_t** for the high-rate no-miscorrection recursion, lam searched on [0, cap_factor * t]."""
    if t < 2:
        raise ConfigurationError("the scaled potential threshold needs t >= 2")
    if tol <= 0:
        raise ConfigurationError("tolerance must be positive")
    cap = cap_factor * t
    grid = np.linspace(0.0, cap, points)
    G = _cumulative(lambda z: float(phi_tail(z, t - 1)), grid)
    land = _Landscape(grid, G, lambda s, a: scaled_potential_value(max(s, 0.0), a, t))
    # on the half-line U(2t; 2t) < 0, so a nonnegative minimum here means the window is too short
    if land.minimum(2.0 * t)[0] >= -QUAD_EPSABS:
        raise DomainError(f"no negative potential on [0, {cap}]; enlarge cap_factor")
    res = _bisect_potential(land, 0.0, 2.0 * t, tol)
    _, argmin = land.minimum(res.failure_at)
    if argmin >= grid[-2]:
        raise DomainError(f"potential minimiser sits at the search cap {cap}; enlarge cap_factor")
    res.extra.update(t=t, regime="scaled", cap=cap, argmin_at_failure=argmin)
    return res


@dataclass
class PotentialCurve:
    states: np.ndarray
    values: np.ndarray
    parameter: float
    regime: str  # finite_n | scaled

    def __post_init__(self):
        if self.regime not in ("finite_n", "scaled"):
            raise ConfigurationError(f"unknown regime {self.regime!r}")
        if self.states.size and (self.states[0] != 0.0 or np.any(np.diff(self.states) <= 0)):
            raise ConfigurationError("curve grid must start at 0 and increase strictly")

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["state", "U", "parameter", "regime"])
        for s, u in zip(self.states, self.values):
            wr.writerow([repr(float(s)), repr(float(u)), repr(float(self.parameter)), self.regime])
        return buf.getvalue()


def potential_curve(parameter: float, t: int, n: int | None = None, upper: float | None = None,
                    points: int = 201) -> PotentialCurve:
    """U on an even grid; finite-n when ``n`` is given, scaled otherwise."""
    if n is None:
        upper = 4.0 * t if upper is None else upper
        grid = np.linspace(0.0, upper, points)
        G = _cumulative(lambda z: float(phi_tail(z, t - 1)), grid)
        regime = "scaled"
    else:
        _check_nt(n, t)
        upper = 1.0 if upper is None else min(upper, 1.0)
        grid = np.linspace(0.0, upper, points)
        G = _cumulative(lambda z: float(idealized_update(z, 1.0, n, t)), grid)
        regime = "finite_n"
    return PotentialCurve(grid, 0.5 * grid ** 2 - parameter * G, parameter, regime)
