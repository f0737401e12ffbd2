# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for density evolution.

Mirrors ``_kernels_py`` function for function; ``hddthresh.kernels`` picks
whichever is importable.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, lgamma, floor, fabs

cnp.import_array()

# variant codes shared with highrate.py
cdef enum:
    PLAIN = 0
    EVEN_T_EVEN = 1
    EVEN_T_ODD = 2
    NO_MISCORRECTION = 3

cdef double DIRECT_LIMIT = 30.0
cdef double REL_EPS = 1e-17


cdef double _scaled_f(double lam, double rho, int t, int variant, double inv_fact) nogil:
    """rho*phi(lam;t-1) + miscorrection tail / (t-1)!."""
    cdef double term, head = 0.0, head_par = 0.0, tail0, tail1 = 0.0, e2
    cdef double s0, s1
    cdef int i
    if lam <= 0.0:
        return 0.0
    term = exp(-lam)
    if lam < DIRECT_LIMIT:
        for i in range(1, t + 1):
            term *= lam / i
        # term is now the i = t Poisson mass; sum tails upward
        s0 = term
        s1 = 0.0
        i = t
        while True:
            i += 1
            term *= lam / i
            s0 += term
            if variant == PLAIN or (variant != NO_MISCORRECTION and (i - t) % 2 == 0):
                s1 += term
            if term == 0.0 or (i > lam and term <= REL_EPS * s0):
                break
        tail0 = s0
        tail1 = s1
    else:
        # tails are close to 1 here, so complementing the head loses nothing
        for i in range(0, t + 1):
            if i > 0:
                term *= lam / i
            if i < t:
                head += term
            if i % 2 == t % 2:
                head_par += term
        tail0 = 1.0 - head
        if variant == PLAIN:
            tail1 = 1.0 - head - term
        elif variant != NO_MISCORRECTION:
            e2 = exp(-2.0 * lam)
            if t % 2 == 0:
                tail1 = 0.5 * (1.0 + e2) - head_par
            else:
                tail1 = 0.5 * (1.0 - e2) - head_par
    if variant == NO_MISCORRECTION:
        return rho * tail0
    return rho * tail0 + tail1 * inv_fact


cdef double _finite_f(double x, const double[::1] coef, int first) nogil:
    """sum_i Binom(N, i; x) * coef[i] with N = len(coef) - 1, mode-centred."""
    cdef int N = coef.shape[0] - 1
    cdef int m, i
    cdef double lp, pm, q, total, ratio
    if x <= 0.0:
        return coef[0]
    if x >= 1.0:
        return coef[N]
    m = <int>floor((N + 1) * x)
    if m > N:
        m = N
    lp = lgamma(N + 1.0) - lgamma(m + 1.0) - lgamma(N - m + 1.0) + m * log(x) + (N - m) * log1p(-x)
    pm = exp(lp)
    total = pm * coef[m]
    ratio = x / (1.0 - x)
    q = pm
    for i in range(m, N):
        q *= (N - i) / (i + 1.0) * ratio
        total += q * coef[i + 1]
        if q == 0.0 or (i + 1 >= first and q <= REL_EPS * total):
            break
    q = pm
    for i in range(m, 0, -1):
        if i - 1 < first:
            break
        q *= i / (N - i + 1.0) / ratio
        total += q * coef[i - 1]
        if q == 0.0 or q <= REL_EPS * total:
            break
    return total


cdef int _first_nonzero(const double[::1] coef) nogil:
    cdef int i
    for i in range(coef.shape[0]):
        if coef[i] != 0.0:
            return i
    return coef.shape[0]


def scaled_update_array(lam, double rho, int t, int variant):
    cdef double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64).ravel()
    out = np.empty(lv.shape[0])
    cdef double[::1] ov = out
    cdef double inv_fact = 1.0
    cdef int i
    for i in range(2, t):
        inv_fact /= i
    for i in range(lv.shape[0]):
        ov[i] = _scaled_f(lv[i], rho, t, variant, inv_fact)
    return out.reshape(np.shape(lam))


def fn_update_array(x, coef):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef double[::1] cv = np.ascontiguousarray(coef, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef int first = _first_nonzero(cv)
    cdef int i
    for i in range(xv.shape[0]):
        ov[i] = _finite_f(xv[i], cv, first)
    return out.reshape(np.shape(x))


cdef tuple _coupled_run(double[::1] x, int w, long max_iters, double eps_success, double eps_stall,
                        int kind, double rho, int t, int variant, const double[::1] coef):
    cdef int L = x.shape[0]
    cdef int M = L + w - 1
    cdef double[::1] y = np.empty(M)
    cdef double inv_w = 1.0 / w
    cdef double inv_fact = 1.0
    cdef int first = 0
    cdef long it
    cdef int c, j, q, i, k
    cdef double s, v, d = 0.0, mx = 0.0, last_in, last_out, zero_out
    cdef int verdict = 2
    cdef long used = max_iters
    if kind == 1:
        first = _first_nonzero(coef)
        zero_out = coef[0]
    else:
        for i in range(2, t):
            inv_fact /= i
        zero_out = 0.0
    with nogil:
        for it in range(1, max_iters + 1):
            last_in = -1.0
            last_out = 0.0
            for c in range(M):
                s = 0.0
                for j in range(w):
                    q = c - j
                    if 0 <= q < L:
                        s += x[q]
                s *= inv_w
                if s == 0.0:
                    y[c] = zero_out
                elif s == last_in:
                    y[c] = last_out
                else:
                    if kind == 0:
                        v = _scaled_f(s, rho, t, variant, inv_fact)
                    else:
                        v = _finite_f(s, coef, first)
                    y[c] = v
                    last_in = s
                    last_out = v
            d = 0.0
            mx = 0.0
            for i in range(L):
                s = 0.0
                for k in range(w):
                    s += y[i + k]
                s *= inv_w
                v = fabs(s - x[i])
                if v > d:
                    d = v
                if s > mx:
                    mx = s
                x[i] = s
            if mx < eps_success:
                verdict = 0
            elif d < eps_stall:
                verdict = 1
            if verdict != 2:
                used = it
                break
    return used, verdict, mx


def scaled_coupled_run(double[::1] x, double rho, int t, int variant, int w, long max_iters,
                       double eps_success, double eps_stall):
    """Iterate the coupled scaled recursion in place; returns (iterations, verdict, residual)."""
    cdef double[::1] dummy = np.zeros(1)
    return _coupled_run(x, w, max_iters, eps_success, eps_stall, 0, rho, t, variant, dummy)


def finite_coupled_run(double[::1] x, coef, int w, long max_iters, double eps_success, double eps_stall):
    """Iterate the coupled finite-n recursion in place; coef[i] = p*P(i) + (1-p)*Q(i)."""
    cdef double[::1] cv = np.ascontiguousarray(coef, dtype=np.float64)
    return _coupled_run(x, w, max_iters, eps_success, eps_stall, 1, 0.0, 0, 0, cv)
