"""Finite-n density evolution for the (C, m) and (C, m, L, w) GLDPC ensembles.

The uncoupled recursion is x <- f_n(x; p) with

    f_n(x; p) = sum_i Binom(n-1, i; x) * (p P(i) + (1-p) Q(i)).

The coupled recursion averages x over the w bit positions feeding each
constraint position, applies f_n, and averages the w constraint outputs
back onto each bit position, with x = 0 outside [1, L].
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from . import kernels
from .errors import BracketError, ConfigurationError, NumericalConsistencyError
from .miscorrection import MiscorrectionTable, idealized_table  # noqa: F401  (re-export)

VERDICT_NAMES = ("converged_to_zero", "stalled", "iteration_cap")


@dataclass(frozen=True)
class CouplingProfile:
    L: int = 1025
    w: int = 16
    boundary: str = "zero"

    def __post_init__(self):
        if self.L < 1 or not 1 <= self.w <= self.L:
            raise ConfigurationError(f"need L >= 1 and 1 <= w <= L, got L={self.L}, w={self.w}")
        if self.boundary != "zero":
            raise ConfigurationError("only the fixed-zero boundary is supported")


UNCOUPLED = CouplingProfile(L=1, w=1)


@dataclass(frozen=True)
class DELimits:
    """Stopping rules.

    ``max_iters`` doubles as the decoding-delay budget: a chain that has not
    reached ``eps_success`` within it counts as a failure when solving for a
    threshold.  The finite-n default is 7,500; the scaled recursion uses
    10,000 (see ``highrate.SCALED_LIMITS``).
    """

    max_iters: int = 7_500
    eps_success: float = 1e-10
    eps_stall: float = 1e-12


@dataclass
class DETrace:
    verdict: str
    iterations_used: int
    residual: float
    final_state: np.ndarray
    states: list = field(default_factory=list)  # (iteration, state) pairs when recorded
    parameter: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.verdict == "converged_to_zero"

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["iteration", "position", "value"])
        for it, state in self.states:
            for pos, val in enumerate(np.atleast_1d(state), start=1):
                wr.writerow([it, pos, repr(float(val))])
        return buf.getvalue()


@dataclass
class ThresholdResult:
    threshold: float
    success_at: float
    failure_at: float
    tolerance: float
    evaluations: int
    per_constraint: Optional[float] = None  # n * p for finite-n thresholds
    extra: dict = field(default_factory=dict)

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.success_at, self.failure_at)


def binomial_pmf(N: int, x: float) -> np.ndarray:
    """Binom(N, i; x) for i = 0..N, evaluated in the log domain."""
    i = np.arange(N + 1)
    if x <= 0.0:
        return (i == 0).astype(float)
    if x >= 1.0:
        return (i == N).astype(float)
    logpmf = gammaln(N + 1) - gammaln(i + 1) - gammaln(N - i + 1) + i * math.log(x) + (N - i) * math.log1p(-x)
    return np.exp(logpmf)


def fn_update(x: float, p: float, table: MiscorrectionTable) -> float:
    """One step of the uncoupled recursion, summed smallest terms first."""
    terms = binomial_pmf(table.n - 1, x) * table.coefficients(p)
    return math.fsum(np.sort(terms))


def fn_curve(x, p: float, table: MiscorrectionTable) -> np.ndarray:
    """Vectorised f_n(x; p) through the active kernel backend."""
    return kernels.fn_update_array(np.asarray(x, dtype=float), table.coefficients(p))


def _run(step: Callable, x: np.ndarray, limits: DELimits, record: bool, record_every: int) -> DETrace:
    if not record:
        used, verdict, mx = step(x, limits.max_iters)
        return DETrace(VERDICT_NAMES[verdict], int(used), float(mx), x)
    states = [(0, x.copy())]
    verdict, mx, it = 2, float(np.max(x)), 0
    for it in range(1, limits.max_iters + 1):
        _, verdict, mx = step(x, 1)
        if verdict != 2 or it % record_every == 0:
            states.append((it, x.copy()))
        if verdict != 2:
            break
    return DETrace(VERDICT_NAMES[verdict], it, float(mx), x, states)


def sc_de_run(p: float, table: MiscorrectionTable, profile: CouplingProfile = CouplingProfile(),
              limits: DELimits = DELimits(), record: bool = False, record_every: int = 1) -> DETrace:
    """Coupled DE from x_i = p on [1, L]; ``UNCOUPLED`` gives the scalar recursion."""
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"p must lie in [0, 1], got {p}")
    coef = np.ascontiguousarray(table.coefficients(p))
    x = np.full(profile.L, float(p))

    def step(state, iters):
        return kernels.finite_coupled_run(state, coef, profile.w, iters, limits.eps_success, limits.eps_stall)

    trace = _run(step, x, limits, record, record_every)
    trace.parameter = p
    return trace


def de_run(p: float, table: MiscorrectionTable, limits: DELimits = DELimits(), record: bool = False) -> DETrace:
    """Uncoupled recursion x <- f_n(x; p) from x = p."""
    return sc_de_run(p, table, UNCOUPLED, limits, record)


def bisect_threshold(probe: Callable[[float], bool], lo: float, hi: float, tol: float,
                     evaluations: int = 0) -> ThresholdResult:
    """Bisection between a known success ``lo`` and known failure ``hi``."""
    if tol <= 0:
        raise ConfigurationError("tolerance must be positive")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        evaluations += 1
        if probe(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), lo, hi, tol, evaluations)


def find_bracket(probe: Callable[[float], bool], lo: float, hi: float, hi_cap: float,
                 grow: float = 1.25) -> tuple[float, float, int]:
    """Confirm success at ``lo`` (else fall back to 0) and failure at ``hi`` (growing it up to ``hi_cap``)."""
    evals = 1
    if lo > 0 and not probe(lo):
        lo = 0.0
        evals += 1
        if not probe(lo):
            raise BracketError("decoding fails even at zero noise")
    evals += 1
    while probe(hi):
        if hi >= hi_cap:
            raise BracketError(f"decoding still succeeds at the bracket cap {hi_cap}")
        hi = min(hi * grow, hi_cap)
        evals += 1
    return lo, hi, evals


def _ratio_infimum(num: Callable, den: Callable, grid: np.ndarray,
                   reachable: bool = False) -> tuple[float, float]:
    """inf of num/den over the grid, polished by golden-section search.

    With ``reachable`` the objective is max(x, num/den): a fixed point at x
    only stops a chain started at x^(0) = p when x <= p.
    """
    a = num(grid)
    b = den(grid)
    if np.any(b < 0):
        raise NumericalConsistencyError("threshold denominator is negative on the grid")
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(b > 0, a / b, np.inf)  # b == 0 only by underflow at the grid ends
    if reachable:
        r = np.maximum(r, grid)
    k = int(np.argmin(r))
    best_x, best = float(grid[k]), float(r[k])
    if 0 < k < grid.size - 1:
        def g(x):
            d = float(den(np.array([x]))[0])
            v = float(num(np.array([x]))[0]) / d if d > 0 else np.inf
            return max(v, x) if reachable else v
        try:
            res = minimize_scalar(g, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden",
                                  options={"xtol": 1e-12})
            if res.fun < best:
                best_x, best = float(res.x), float(res.fun)
        except ValueError:
            pass
    return best, best_x


def threshold_grid(points: int = 12_000) -> np.ndarray:
    half = points // 2
    return np.unique(np.concatenate([np.logspace(-8, -1, half), np.linspace(0.1, 0.999, points - half)]))


def uncoupled_threshold(table: MiscorrectionTable, tol: float = 1e-6,
                        limits: DELimits = DELimits(max_iters=200_000), check: bool = True) -> ThresholdResult:
    """Uncoupled DE threshold with a direct-DE sanity check.

    g(x) = (x - f(x;0)) / (f(x;1) - f(x;0)) is the smallest p with a fixed
    point at x.  inf_x g(x) over all of (0,1) is a sufficient condition and is
    reported as ``extra['global_bound']``; the threshold itself is
    inf_x max(x, g(x)), which coincides with it unless f(x;0) > x somewhere
    far above p (codes containing the all-one word can do this near x = 1).
    """
    def f0(x):
        return kernels.fn_update_array(x, table.Q)

    def f1(x):
        return kernels.fn_update_array(x, table.P)

    grid = threshold_grid()
    bound, _ = _ratio_infimum(lambda x: x - f0(x), lambda x: f1(x) - f0(x), grid)
    pstar, argmin = _ratio_infimum(lambda x: x - f0(x), lambda x: f1(x) - f0(x), grid, reachable=True)
    pstar = min(pstar, 1.0)
    res = ThresholdResult(pstar, pstar, pstar, tol, 0, table.n * pstar,
                          {"argmin_x": argmin, "global_bound": bound})
    if check:
        delta = max(tol, 1e-3 * pstar)
        below = de_run(max(pstar - delta, 0.0), table, limits)
        above = de_run(min(pstar + delta, 1.0), table, limits)
        res.success_at, res.failure_at = pstar - delta, pstar + delta
        res.evaluations = 2
        res.extra.update(check_below=below.verdict, check_above=above.verdict)
    return res


def sc_threshold(table: MiscorrectionTable, profile: CouplingProfile = CouplingProfile(),
                 tol: float = 1e-5, limits: DELimits = DELimits()) -> ThresholdResult:
    """Bisection on p for the coupled chain; reports p* and a* = n p*."""
    def probe(p):
        return sc_de_run(p, table, profile, limits).converged

    start = uncoupled_threshold(table, check=False).threshold
    lo, hi, evals = find_bracket(probe, 0.999 * start, min(1.0, 2 * table.t / table.n), 1.0)
    res = bisect_threshold(probe, lo, hi, tol, evals)
    res.per_constraint = table.n * res.threshold
    res.extra.update(L=profile.L, w=profile.w, max_iters=limits.max_iters, uncoupled=start)
    return res
