"""NumPy implementation of the density-evolution kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is not built or HDDTHRESH_PURE_PYTHON is set.
"""
import math

import numpy as np
from scipy.special import gammaln

PLAIN, EVEN_T_EVEN, EVEN_T_ODD, NO_MISCORRECTION = 0, 1, 2, 3
DIRECT_LIMIT = 30.0
_EXTRA_TERMS = 160  # enough Poisson mass past k for every lam < DIRECT_LIMIT


def _scaled_f(lam, rho, t, variant):
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    pos = lam > 0
    small = pos & (lam < DIRECT_LIMIT)
    big = lam >= DIRECT_LIMIT
    inv_fact = 1.0 / math.factorial(t - 1)
    if np.any(small):
        ls = lam[small][:, None]
        i = np.arange(t, t + _EXTRA_TERMS)
        with np.errstate(divide="ignore"):
            terms = np.exp(i * np.log(ls) - ls - gammaln(i + 1))
        tail0 = terms.sum(axis=1)
        if variant == PLAIN:
            tail1 = terms[:, 1:].sum(axis=1)
        elif variant == NO_MISCORRECTION:
            tail1 = 0.0
        else:
            tail1 = terms[:, 2::2].sum(axis=1)
        out[small] = rho * tail0 + (0.0 if variant == NO_MISCORRECTION else tail1 * inv_fact)
    if np.any(big):
        lb = lam[big][:, None]
        i = np.arange(t + 1)
        terms = np.exp(i * np.log(lb) - lb - gammaln(i + 1))
        head = terms[:, :t].sum(axis=1)
        tail0 = 1.0 - head
        if variant == PLAIN:
            tail1 = 1.0 - head - terms[:, t]
        elif variant == NO_MISCORRECTION:
            tail1 = 0.0
        else:
            par = terms[:, (t % 2)::2].sum(axis=1)
            e2 = np.exp(-2.0 * lam[big])
            tail1 = (0.5 * (1.0 + e2) if t % 2 == 0 else 0.5 * (1.0 - e2)) - par
        out[big] = rho * tail0 + (0.0 if variant == NO_MISCORRECTION else tail1 * inv_fact)
    return out


def _finite_f(x, coef):
    x = np.asarray(x, dtype=float)
    coef = np.asarray(coef, dtype=float)
    N = coef.size - 1
    i = np.arange(N + 1)
    xs = np.clip(x, 0.0, 1.0)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logpmf = (gammaln(N + 1) - gammaln(i + 1) - gammaln(N - i + 1)
                  + np.where(i > 0, i * np.log(xs), 0.0)
                  + np.where(i < N, (N - i) * np.log1p(-xs), 0.0))
    pmf = np.exp(logpmf)
    return pmf @ coef


def scaled_update_array(lam, rho, t, variant):
    return _scaled_f(lam, float(rho), int(t), int(variant))


def fn_update_array(x, coef):
    return _finite_f(x, coef)


def _coupled_run(x, w, max_iters, eps_success, eps_stall, f):
    L = x.shape[0]
    kernel = np.ones(w)
    mx = 0.0
    for it in range(1, max_iters + 1):
        xbar = np.convolve(x, kernel)[: L + w - 1] / w
        uniq, inv = np.unique(xbar, return_inverse=True)
        y = f(uniq)[inv]
        new = np.convolve(y, kernel, mode="valid") / w
        d = float(np.max(np.abs(new - x)))
        x[:] = new
        mx = float(new.max())
        if mx < eps_success:
            return it, 0, mx
        if d < eps_stall:
            return it, 1, mx
    return max_iters, 2, mx


def scaled_coupled_run(x, rho, t, variant, w, max_iters, eps_success, eps_stall):
    return _coupled_run(x, int(w), int(max_iters), eps_success, eps_stall,
                        lambda v: _scaled_f(v, float(rho), int(t), int(variant)))


def finite_coupled_run(x, coef, w, max_iters, eps_success, eps_stall):
    c = np.ascontiguousarray(coef, dtype=float)
    return _coupled_run(x, int(w), int(max_iters), eps_success, eps_stall, lambda v: _finite_f(v, c))
