"""High-rate (n -> infinity, p = rho/(n-1)) limit of density evolution.

State is lambda, the mean number of erroneous messages entering a
constraint; rho is the mean number of channel errors per constraint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from . import kernels
from .de import (CouplingProfile, DELimits, DETrace, ThresholdResult, _ratio_infimum, _run,
                 bisect_threshold, find_bracket)
from .errors import ConfigurationError

DIRECT_LIMIT = 30.0
_TAIL_TERMS = 160

VARIANTS = {"plain": 0, "even_t_even": 1, "even_t_odd": 2, "no_miscorrection": 3}


@dataclass(frozen=True)
class ScaledVariant:
    kind: str
    t: int

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.kind!r}; choose from {sorted(VARIANTS)}")
        if self.t < 1:
            raise ConfigurationError("t must be positive")
        if self.kind == "even_t_even" and self.t % 2:
            raise ConfigurationError(f"even_t_even needs even t, got t={self.t}")
        if self.kind == "even_t_odd" and self.t % 2 == 0:
            raise ConfigurationError(f"even_t_odd needs odd t, got t={self.t}")

    @classmethod
    def from_name(cls, name: str, t: int) -> "ScaledVariant":
        """Accepts the four kinds plus 'even' (parity picked from t) and 'none'."""
        if name in ("even", "even_subcode"):
            return cls("even_t_even" if t % 2 == 0 else "even_t_odd", t)
        if name in ("none", "ideal", "idealized"):
            return cls("no_miscorrection", t)
        return cls(name, t)

    @property
    def code(self) -> int:
        return VARIANTS[self.kind]


def poisson_tails(lam, k: int):
    """(phi, psi, varphi): total, even-index and odd-index Poisson(lam) tails.

    phi(lam;k) = P[X > k]; psi sums the even terms beyond 2*floor(k/2) and
    varphi the odd terms beyond 2*floor(k/2) + 1.
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0) or k < 0:
        raise ConfigurationError("need lam >= 0 and k >= 0")
    phi = np.zeros_like(lam_arr)
    psi = np.zeros_like(lam_arr)
    var = np.zeros_like(lam_arr)
    even_cut = 2 * (k // 2)
    odd_cut = even_cut + 1
    small = (lam_arr > 0) & (lam_arr < DIRECT_LIMIT)
    if np.any(small):
        ls = lam_arr[small][:, None]
        i = np.arange(0, k + _TAIL_TERMS)
        terms = np.exp(i * np.log(ls) - ls - gammaln(i + 1))
        phi[small] = terms[:, k + 1:].sum(axis=1)
        psi[small] = terms[:, even_cut + 2::2].sum(axis=1)
        var[small] = terms[:, odd_cut + 2::2].sum(axis=1)
    big = lam_arr >= DIRECT_LIMIT
    if np.any(big):
        lb = lam_arr[big]
        i = np.arange(0, odd_cut + 1)
        terms = np.exp(i * np.log(lb[:, None]) - lb[:, None] - gammaln(i + 1))
        e2 = np.exp(-2.0 * lb)
        phi[big] = gammainc(k + 1, lb)
        psi[big] = 0.5 * (1.0 + e2) - terms[:, 0:even_cut + 1:2].sum(axis=1)
        var[big] = 0.5 * (1.0 - e2) - terms[:, 1:odd_cut + 1:2].sum(axis=1)
    out = tuple(np.clip(a, 0.0, 1.0) for a in (phi, psi, var))
    if np.ndim(lam) == 0:
        return tuple(float(a[0]) for a in out)
    return out


def scaled_update(lam, rho: float, variant: ScaledVariant):
    """f(lam; rho) for the chosen component-code model (reference path)."""
    t = variant.t
    base = rho * np.asarray(poisson_tails(lam, t - 1)[0])
    if variant.kind == "no_miscorrection":
        out = base
    else:
        phi_t, psi_t, var_t = (np.asarray(a) for a in poisson_tails(lam, t))
        tail = {"plain": phi_t, "even_t_even": psi_t, "even_t_odd": var_t}[variant.kind]
        out = base + tail / math.factorial(t - 1)
    return float(out) if np.ndim(lam) == 0 else out


def scaled_update_fast(lam, rho: float, variant: ScaledVariant) -> np.ndarray:
    return kernels.scaled_update_array(np.asarray(lam, dtype=float), rho, variant.t, variant.code)


SCALED_LIMITS = DELimits(max_iters=10_000, eps_success=1e-8, eps_stall=1e-12)


def sc_scaled_de_run(rho: float, variant: ScaledVariant, profile: CouplingProfile = CouplingProfile(),
                     limits: DELimits = SCALED_LIMITS, record: bool = False, record_every: int = 1) -> DETrace:
    if rho < 0:
        raise ConfigurationError("rho must be nonnegative")
    x = np.full(profile.L, float(rho))

    def step(state, iters):
        return kernels.scaled_coupled_run(state, rho, variant.t, variant.code, profile.w, iters,
                                          limits.eps_success, limits.eps_stall)

    trace = _run(step, x, limits, record, record_every)
    trace.parameter = rho
    return trace


def uncoupled_scaled_threshold(variant: ScaledVariant) -> float:
    """inf over lam of (lam - f(lam;0)) / phi(lam; t-1)."""
    grid = np.unique(np.concatenate([np.logspace(-6, 0, 4000), np.linspace(1.0, 6.0 * variant.t, 8000)]))
    val, _ = _ratio_infimum(lambda x: x - scaled_update_fast(x, 0.0, variant),
                            lambda x: np.asarray(poisson_tails(x, variant.t - 1)[0]), grid, reachable=True)
    return val


def scaled_threshold(variant: ScaledVariant, profile: CouplingProfile = CouplingProfile(), tol: float = 1e-4,
                     limits: DELimits = SCALED_LIMITS) -> ThresholdResult:
    def probe(rho):
        return sc_scaled_de_run(rho, variant, profile, limits).converged

    start = uncoupled_scaled_threshold(variant)
    lo, hi, evals = find_bracket(probe, 0.999 * start, 2.0 * variant.t, 4.0 * variant.t)
    res = bisect_threshold(probe, lo, hi, tol, evals)
    res.extra.update(variant=variant.kind, t=variant.t, L=profile.L, w=profile.w,
                     max_iters=limits.max_iters, uncoupled=start)
    return res


def prelimit_update(lam: float, rho: float, n: int, table) -> float:
    """(n-1) f_n(lam/(n-1); rho/(n-1)): the finite-n recursion on the scaled axis."""
    from .de import fn_update

    return (n - 1) * fn_update(lam / (n - 1), rho / (n - 1), table)
