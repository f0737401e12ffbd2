"""Bit-level BDD error probabilities P_n(i), Q_n(i) from a weight spectrum.

P(i): probability that an observed bit which is in error stays wrong after
BDD, given i further errors spread uniformly over the other n-1 positions.
Q(i): same, but the observed bit starts out correct (so a wrong output is a
miscorrection).  Both are sums over the decoding spheres of radius t around
codewords, which are disjoint because d >= 2t+1.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, NumericalConsistencyError
from .galois_bch import SpectrumTable

RANGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MiscorrectionTable:
    n: int
    t: int
    P: np.ndarray
    Q: np.ndarray
    source: str  # analytic | idealized | asymptotic | empirical
    metadata: dict = field(default_factory=dict)

    def coefficients(self, p: float) -> np.ndarray:
        """p*P(i) + (1-p)*Q(i), the per-i weight of the DE sum."""
        return p * self.P + (1.0 - p) * self.Q

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["i", "P", "Q"])
        for i in range(self.n):
            wr.writerow([i, repr(float(self.P[i])), repr(float(self.Q[i]))])
        return buf.getvalue()


def _log_comb(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ok = (b >= 0) & (b <= a) & (a >= 0)
    with np.errstate(invalid="ignore"):
        val = gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)
    return np.where(ok, val, -np.inf)


def _sphere_terms(n: int, t: int, i: np.ndarray):
    """Yield (l, log V) for every (delta, j) pair; l = i - delta + 2j + 1."""
    log_norm = _log_comb(n - 1, i)
    for delta in range(1, t + 1):
        for j in range(delta):
            l = i - delta + 2 * j + 1
            log_v = _log_comb(l, l - j) + _log_comb(n - l - 1, delta - 1 - j) - log_norm
            yield l, log_v


def _is_even_spectrum(spectrum: SpectrumTable) -> bool:
    return spectrum.even_subcode or not np.any(spectrum.counts[1::2])


def miscorrection_table(n: int, t: int, spectrum: SpectrumTable) -> MiscorrectionTable:
    """Evaluate P(i), Q(i) for i = 0..n-1 from the weight spectrum.

    The sphere-counting sums are evaluated at every i, not only on the index
    ranges where they are usually quoted: the counting argument holds for all
    i, and where the all-one word is a codeword it reproduces the P = Q = 1
    tail exactly.  Those tail values are then pinned explicitly.
    """
    if spectrum.n != n or spectrum.t != t:
        raise ConfigurationError(f"spectrum is for (n={spectrum.n}, t={spectrum.t}), not ({n}, {t})")
    A = np.asarray(spectrum.counts, dtype=float)
    if np.any(A[1:2 * t + 1] != 0):
        raise ConfigurationError(f"spectrum has codewords of weight <= 2t; d >= 2t+1 is required")
    even = _is_even_spectrum(spectrum)
    i = np.arange(n)
    with np.errstate(divide="ignore"):
        log_A = np.log(A)
    p_terms, q_terms = [], []
    for l, log_v in _sphere_terms(n, t, i):
        lp = np.clip(l, 0, n)
        okp = (l >= 0) & (l <= n) & np.isfinite(log_v)
        p_terms.append(np.where(okp, (n - lp) / n * np.exp(np.where(okp, log_A[lp] + log_v, -np.inf)), 0.0))
        lq = np.clip(l + 1, 0, n)
        okq = (l + 1 >= 0) & (l + 1 <= n) & np.isfinite(log_v)
        q_terms.append(np.where(okq, lq / n * np.exp(np.where(okq, log_A[lq] + log_v, -np.inf)), 0.0))
    p_terms = np.array(p_terms).T
    q_terms = np.array(q_terms).T
    P = np.array([1.0 - math.fsum(row) for row in p_terms])
    Q = np.array([math.fsum(row) for row in q_terms])

    lo, hi = min(P.min(), Q.min()), max(P.max(), Q.max())
    if lo < -RANGE_TOL or hi > 1 + RANGE_TOL:
        raise NumericalConsistencyError(
            f"P/Q outside [0,1] (min {lo:.3g}, max {hi:.3g}); spectrum and formula disagree"
        )
    P = np.clip(P, 0.0, 1.0)
    Q = np.clip(Q, 0.0, 1.0)
    P[:t] = 0.0
    Q[: t + 2 if even else t + 1] = 0.0
    all_one = spectrum.has_all_one_word
    if all_one:
        P[max(n - t - 1, 0):] = 1.0
        Q[max(n - t, 0):] = 1.0
    # indices outside the usual closed-form ranges, where the raw sum was kept
    extended = [] if all_one else [n - t - 1] + list(range(n - t, n))
    meta = {"spectrum_method": spectrum.method, "even_subcode": even, "all_one_word": all_one,
            "extended_indices": extended}
    return MiscorrectionTable(n, t, P, Q, "analytic", meta)


def miscorrection_exact(n: int, t: int, counts: Sequence[int]) -> tuple[list[Fraction], list[Fraction]]:
    """Rational P(i), Q(i) from an integer spectrum (small codes only)."""
    P, Q = [], []
    for i in range(n):
        norm = math.comb(n - 1, i)
        sp = Fraction(0)
        sq = Fraction(0)
        for delta in range(1, t + 1):
            for j in range(delta):
                l = i - delta + 2 * j + 1
                if l < 0 or n - l - 1 < delta - 1 - j:
                    continue
                v = Fraction(math.comb(l, l - j) * math.comb(n - l - 1, delta - 1 - j), norm)
                if l <= n:
                    sp += Fraction(n - l, n) * counts[l] * v
                if l + 1 <= n:
                    sq += Fraction(l + 1, n) * counts[l + 1] * v
        P.append(Fraction(0) if i < t else 1 - sp)
        Q.append(Fraction(0) if i <= t else sq)
    return P, Q


def asymptotic_pq(n: int, t: int, parity_mode: str = "plain") -> MiscorrectionTable:
    """Large-n forms: P = 1 from i = t on, Q of order 1/n (or 1/n^2) on its support."""
    if parity_mode not in ("plain", "even_subcode"):
        raise ConfigurationError(f"parity_mode must be 'plain' or 'even_subcode', not {parity_mode!r}")
    i = np.arange(n)
    P = (i >= t).astype(float)
    Q = np.zeros(n)
    if parity_mode == "plain":
        sup = (i >= t + 1) & (i <= n - t - 1)
        Q[sup] = 1.0 / (math.factorial(t - 1) * n)
    else:
        if t < 2:
            raise ConfigurationError("even-subcode asymptotics need t >= 2")
        sup = (i >= t + 2) & (i <= n - t - 2)
        odd = (i + t) % 2 == 1
        Q[sup & odd] = 1.0 / (math.factorial(t - 2) * n * n)
        Q[sup & ~odd] = 1.0 / (math.factorial(t - 1) * n)
    return MiscorrectionTable(n, t, P, Q, "asymptotic", {"parity_mode": parity_mode})


def idealized_table(n: int, t: int) -> MiscorrectionTable:
    """No miscorrection: a bit is fixed exactly when at most t-1 others are wrong.

    Equivalently the erasure-channel table of a t-erasure-correcting decoder.
    """
    if not 0 <= t < n:
        raise ConfigurationError(f"need 0 <= t < n, got t={t}, n={n}")
    i = np.arange(n)
    return MiscorrectionTable(n, t, (i >= t).astype(float), np.zeros(n), "idealized")
