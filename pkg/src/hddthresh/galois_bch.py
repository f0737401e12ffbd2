"""GF(2^nu) arithmetic, binary primitive BCH codes and bounded-distance decoding.

Polynomials over GF(2) are stored as Python ints (bit i is the coefficient
of x^i).  Words of length n are ``numpy.uint8`` vectors whose index i is the
coefficient of x^i, so cyclic shifts and generator multiples line up with
bit positions.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, DesignMismatchError

# One primitive polynomial per degree, from the standard Lin & Costello /
# Peterson tables.  Bit i is the coefficient of x^i.
PRIMITIVE_POLYS = {
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,  # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101,  # x^11 + x^2 + 1
    12: 0b1000001010011,  # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,  # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,  # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,  # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}

EXACT_ENUM_MAX_DIM = 24
SPECTRUM_METHODS = ("exact_enum", "dual_macwilliams", "binomial_approx")


def poly_str(poly: int) -> str:
    """Human-readable form of a GF(2) polynomial, highest power first."""
    terms = []
    for i in range(poly.bit_length() - 1, -1, -1):
        if poly >> i & 1:
            terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
    return " + ".join(terms) or "0"


def gf2_polymul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_polymod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Log/antilog tables for GF(2^nu) generated by a primitive polynomial."""

    nu: int
    primitive_poly: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        """Number of nonzero elements, n = 2^nu - 1."""
        return (1 << self.nu) - 1

    def alpha_pow(self, e: int) -> int:
        return int(self.antilog_table[e % self.order])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog_table[self.log_table[a] + self.log_table[b]])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^nu)")
        if a == 0:
            return 0
        return int(self.antilog_table[(self.log_table[a] - self.log_table[b]) % self.order])

    def inv(self, a: int) -> int:
        return self.div(1, a)


@lru_cache(maxsize=None)
def build_field(nu: int) -> FieldTable:
    """Construct GF(2^nu) for 2 <= nu <= 16 from the fixed primitive polynomial table."""
    if nu not in PRIMITIVE_POLYS:
        raise ConfigurationError(f"unsupported field degree nu={nu}; need 2 <= nu <= 16")
    poly = PRIMITIVE_POLYS[nu]
    n = (1 << nu) - 1
    # antilog is stored twice over so that log[a] + log[b] never needs a modulo
    antilog = np.zeros(2 * n, dtype=np.int64)
    log = np.full(n + 1, -1, dtype=np.int64)
    x = 1
    for e in range(n):
        if log[x] != -1:
            raise ConfigurationError(f"polynomial {poly_str(poly)} is not primitive")
        antilog[e] = x
        log[x] = e
        x <<= 1
        if x >> nu:
            x ^= poly
    if x != 1:
        raise ConfigurationError(f"polynomial {poly_str(poly)} is not primitive")
    antilog[n:] = antilog[:n]
    log.setflags(write=False)
    antilog.setflags(write=False)
    return FieldTable(nu=nu, primitive_poly=poly, log_table=log, antilog_table=antilog)


def cyclotomic_coset(i: int, n: int) -> tuple[int, ...]:
    coset = []
    j = i % n
    while j not in coset:
        coset.append(j)
        j = (2 * j) % n
    return tuple(sorted(coset))


def minimal_polynomial(gf: FieldTable, i: int) -> int:
    """Minimal polynomial of alpha^i over GF(2)."""
    coeffs = [1]  # coefficients in GF(2^nu), lowest power first
    for j in cyclotomic_coset(i, gf.order):
        root = gf.alpha_pow(j)
        new = [0] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] ^= c
            new[k] ^= gf.mul(c, root)
        coeffs = new
    if any(c not in (0, 1) for c in coeffs):
        raise ArithmeticError("minimal polynomial has coefficients outside GF(2)")
    return sum(c << k for k, c in enumerate(coeffs))


# -- GF(2) linear algebra ------------------------------------------------------

def gf2_rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    A = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(A[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def gf2_nullspace(M: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0} over GF(2)."""
    R, pivots = gf2_rref(M)
    cols = np.asarray(M).shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for b, f in enumerate(free):
        basis[b, f] = 1
        for row, pc in enumerate(pivots):
            basis[b, pc] = R[row, f]
    return basis


# -- codes ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComponentCode:
    """A binary primitive narrow-sense BCH code or its even-weight subcode."""

    n: int
    k: int
    t: int
    nu: int
    even_subcode: bool
    generator_poly: int
    field: FieldTable = field(repr=False)

    @property
    def minimum_distance_design(self) -> int:
        return 2 * self.t + 2 if self.even_subcode else 2 * self.t + 1

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def label(self) -> str:
        kind = "even-weight subcode" if self.even_subcode else "BCH"
        return f"({self.n},{self.k},{self.minimum_distance_design}) {kind}"

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        g = np.array([self.generator_poly >> i & 1 for i in range(self.n - self.k + 1)], dtype=np.uint8)
        G = np.zeros((self.k, self.n), dtype=np.uint8)
        for j in range(self.k):
            G[j, j:j + g.size] = g
        G.setflags(write=False)
        return G

    @cached_property
    def parity_check_matrix(self) -> np.ndarray:
        H = gf2_nullspace(self.generator_matrix)
        if H.shape[0] != self.n - self.k:
            raise ArithmeticError("parity-check matrix has the wrong rank")
        H.setflags(write=False)
        return H

    def encode(self, message: Sequence[int]) -> np.ndarray:
        m = np.asarray(message, dtype=np.uint8)
        if m.shape != (self.k,):
            raise ConfigurationError(f"message must have length k={self.k}")
        return (m @ self.generator_matrix.astype(np.int64) % 2).astype(np.uint8)

    def is_codeword(self, word: np.ndarray) -> bool:
        w = np.asarray(word, dtype=np.int64)
        return not np.any(self.parity_check_matrix.astype(np.int64) @ w % 2)

    @cached_property
    def syndrome_decoder(self) -> "SyndromeDecoder":
        return SyndromeDecoder(self)


def build_bch(nu: int, t: int, even_subcode: bool = False) -> ComponentCode:
    """Narrow-sense primitive BCH code of length 2^nu - 1 correcting t errors."""
    gf = build_field(nu)
    n = gf.order
    if t < 1 or 2 * t + 1 > n:
        raise ConfigurationError(f"t={t} out of range for n={n}")
    g = 1
    seen: set[tuple[int, ...]] = set()
    for i in range(1, 2 * t + 1):
        coset = cyclotomic_coset(i, n)
        if coset in seen:
            continue
        seen.add(coset)
        g = gf2_polymul(g, minimal_polynomial(gf, i))
    if g.bit_length() - 1 != nu * t:
        raise DesignMismatchError(
            f"deg g(x) = {g.bit_length() - 1} but nu*t = {nu * t} for nu={nu}, t={t}"
        )
    if even_subcode:
        g = gf2_polymul(g, 0b11)
    if gf2_polymod((1 << n) | 1, g) != 0:
        raise ArithmeticError("generator does not divide x^n - 1")
    k = n - (g.bit_length() - 1)
    return ComponentCode(n=n, k=k, t=t, nu=nu, even_subcode=even_subcode, generator_poly=g, field=gf)


# -- bounded-distance decoding -------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    kind: str  # "corrected" or "failure"
    codeword: Optional[np.ndarray]
    flips: int
    word: np.ndarray = field(repr=False)

    @property
    def corrected(self) -> bool:
        return self.kind == "corrected"

    @property
    def output(self) -> np.ndarray:
        """Bit-level decoder output: the codeword, or the input on failure."""
        return self.codeword if self.codeword is not None else self.word


def syndromes(code: ComponentCode, word: np.ndarray) -> list[int]:
    gf = code.field
    support = np.nonzero(word)[0]
    return [
        int(np.bitwise_xor.reduce(gf.antilog_table[(support * j) % gf.order], initial=0))
        for j in range(1, 2 * code.t + 1)
    ]


def berlekamp_massey(S: Sequence[int], gf: FieldTable) -> list[int]:
    """Error-locator polynomial (lowest degree first) for the syndrome sequence S."""
    C = [1]
    B = [1]
    L = 0
    m = 1
    b = 1
    for r in range(len(S)):
        d = S[r]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= gf.mul(C[i], S[r - i])
        if d == 0:
            m += 1
            continue
        coef = gf.div(d, b)
        T = C[:]
        shifted = [0] * m + [gf.mul(coef, x) for x in B]
        if len(shifted) > len(C):
            C = C + [0] * (len(shifted) - len(C))
        for i, x in enumerate(shifted):
            C[i] ^= x
        if 2 * L <= r:
            L = r + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C


def chien_search(locator: Sequence[int], gf: FieldTable) -> np.ndarray:
    """Positions i with locator(alpha^-i) = 0."""
    n = gf.order
    i = np.arange(n)
    acc = np.zeros(n, dtype=np.int64)
    for k, c in enumerate(locator):
        if c:
            acc ^= gf.antilog_table[(gf.log_table[c] - i * k) % n]
    return np.nonzero(acc == 0)[0]


def bdd_decode(code: ComponentCode, word: Sequence[int]) -> DecodeOutcome:
    """Bounded-distance decoding with Berlekamp-Massey and Chien search.

    Returns the unique codeword within distance t when one exists; otherwise
    a failure outcome whose ``output`` is the unchanged input word.
    """
    v = np.asarray(word, dtype=np.uint8) & 1
    if v.shape != (code.n,):
        raise ConfigurationError(f"word must have length n={code.n}")
    failure = DecodeOutcome("failure", None, 0, v)
    S = syndromes(code, v)
    if any(S):
        locator = berlekamp_massey(S, code.field)
        deg = len(locator) - 1
        if deg > code.t:
            return failure
        positions = chien_search(locator, code.field)
        if positions.size != deg:
            return failure
        c = v.copy()
        c[positions] ^= 1
    else:
        c = v.copy()
        positions = np.zeros(0, dtype=np.int64)
    if code.even_subcode and int(c.sum()) % 2:
        # nearest BCH codeword is odd, so no subcode codeword lies within t
        return failure
    return DecodeOutcome("corrected", c, int(positions.size), v)


class SyndromeDecoder:
    """Table-driven BDD equivalent to :func:`bdd_decode`, vectorised over words.

    Maps every syndrome of a pattern of weight <= t to that pattern; all other
    syndromes mean failure.  Requires n - k <= 24.
    """

    def __init__(self, code: ComponentCode):
        r = code.n - code.k
        if r > EXACT_ENUM_MAX_DIM:
            raise ConfigurationError(f"syndrome table needs n-k <= {EXACT_ENUM_MAX_DIM}, got {r}")
        self.code = code
        H = code.parity_check_matrix.astype(np.int64)
        self.columns = (H << np.arange(r, dtype=np.int64)[:, None]).sum(axis=0)
        self.table = np.full(1 << r, -1, dtype=np.int32)
        patterns = [()]
        self.table[0] = 0
        for w in range(1, code.t + 1):
            for pos in itertools.combinations(range(code.n), w):
                s = 0
                for p in pos:
                    s ^= int(self.columns[p])
                if self.table[s] != -1:
                    raise ArithmeticError("two patterns of weight <= t share a syndrome")
                self.table[s] = len(patterns)
                patterns.append(pos)
        self.positions = np.full((len(patterns), max(code.t, 1)), -1, dtype=np.int32)
        for idx, pos in enumerate(patterns):
            self.positions[idx, :len(pos)] = pos

    def syndrome(self, words: np.ndarray) -> np.ndarray:
        w = np.asarray(words, dtype=bool)
        return np.bitwise_xor.reduce(np.where(w, self.columns, 0), axis=-1)

    def flips_at(self, synd: np.ndarray, slot: np.ndarray) -> np.ndarray:
        """Whether the decoder flips position ``slot`` given syndrome ``synd``."""
        lead = self.table[synd]
        hit = np.any(self.positions[lead] == np.asarray(slot)[..., None], axis=-1)
        return hit & (lead >= 0)

    def decode(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decode a batch; returns (output words, corrected flags)."""
        w = np.asarray(words, dtype=np.uint8) & 1
        lead = self.table[self.syndrome(w)]
        out = w.copy()
        pos = self.positions[np.maximum(lead, 0)]
        ok = lead >= 0
        flat = out.reshape(-1, self.code.n)
        okf = ok.reshape(-1)
        posf = pos.reshape(-1, pos.shape[-1])
        rows = np.nonzero(okf)[0]
        for c in range(posf.shape[1]):
            sel = rows[posf[rows, c] >= 0]
            flat[sel, posf[sel, c]] ^= 1
        return flat.reshape(w.shape), ok


# -- weight spectra ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectrumTable:
    counts: np.ndarray
    method: str
    n: int
    t: int
    k: int
    even_subcode: bool
    exact: Optional[tuple[int, ...]] = None
    metadata: dict = field(default_factory=dict)

    @property
    def has_all_one_word(self) -> bool:
        return abs(self.counts[self.n] - 1.0) < 1e-12

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["l", "A_l", "method"])
        for l in range(self.n + 1):
            val = self.exact[l] if self.exact is not None else repr(float(self.counts[l]))
            wr.writerow([l, val, self.method])
        return buf.getvalue()


def _pack_rows(M: np.ndarray) -> np.ndarray:
    rows, n = M.shape
    words = (n + 63) // 64
    out = np.zeros((rows, words), dtype=np.uint64)
    for w in range(words):
        chunk = M[:, 64 * w:64 * (w + 1)].astype(np.uint64)
        out[:, w] = (chunk << np.arange(chunk.shape[1], dtype=np.uint64)).sum(axis=1, dtype=np.uint64)
    return out


def enumerate_weights(M: np.ndarray) -> list[int]:
    """Weight distribution of the row space of a full-rank GF(2) matrix."""
    rows, n = M.shape
    if rows > EXACT_ENUM_MAX_DIM:
        raise ConfigurationError(f"enumeration needs dimension <= {EXACT_ENUM_MAX_DIM}, got {rows}")
    packed = _pack_rows(M)
    words = np.zeros((1, packed.shape[1]), dtype=np.uint64)
    for row in packed:
        words = np.concatenate([words, words ^ row])
    weights = np.bitwise_count(words).sum(axis=1, dtype=np.int64)
    return np.bincount(weights, minlength=n + 1).tolist()


def krawtchouk(n: int, l: int, w: int) -> int:
    return sum((-1) ** j * math.comb(w, j) * math.comb(n - w, l - j) for j in range(0, min(w, l) + 1))


def macwilliams(dual_counts: Sequence[int], n: int) -> list[int]:
    """Weight distribution of C from that of its dual, in exact integer arithmetic."""
    size = sum(dual_counts)
    out = []
    for l in range(n + 1):
        num = sum(B * krawtchouk(n, l, w) for w, B in enumerate(dual_counts) if B)
        if num % size:
            raise ArithmeticError("MacWilliams transform produced a non-integer count")
        out.append(num // size)
    return out


def binomial_approx_counts(n: int, nu: int, t: int, even_subcode: bool = False) -> np.ndarray:
    d = 2 * t + 1
    l = np.arange(n + 1)
    log_c = gammaln(n + 1) - gammaln(l + 1) - gammaln(n - l + 1)
    A = np.where((l >= d) & (l <= n - d), np.exp(log_c - nu * t * math.log(2.0)), 0.0)
    A[0] = 1.0
    A[n] = 1.0
    if even_subcode:
        A[1::2] = 0.0
    return A


def weight_spectrum(code: ComponentCode, method: str = "exact_enum") -> SpectrumTable:
    meta = {"primitive_poly": poly_str(code.field.primitive_poly), "generator_poly": hex(code.generator_poly)}
    if method == "exact_enum":
        exact = enumerate_weights(code.generator_matrix)
    elif method == "dual_macwilliams":
        exact = macwilliams(enumerate_weights(code.parity_check_matrix), code.n)
    elif method == "binomial_approx":
        A = binomial_approx_counts(code.n, code.nu, code.t, code.even_subcode)
        return SpectrumTable(A, method, code.n, code.t, code.k, code.even_subcode, None, meta)
    else:
        raise ConfigurationError(f"unknown spectrum method {method!r}; choose from {SPECTRUM_METHODS}")
    return SpectrumTable(
        np.array(exact, dtype=float), method, code.n, code.t, code.k, code.even_subcode, tuple(exact), meta
    )
