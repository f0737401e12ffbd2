import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hddthresh.galois_bch import build_bch, gf2_polymul

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- brute-force oracles, independent of the package's matrices and decoders ----

def codewords_by_poly(code):
    """Every codeword as m(x) g(x), built with plain polynomial multiplication."""
    words = []
    for m in range(1 << code.k):
        c = gf2_polymul(m, code.generator_poly)
        words.append([(c >> i) & 1 for i in range(code.n)])
    return np.array(words, dtype=np.uint8)


def nearest_codeword_decode(words_all, v, t):
    """BDD by exhaustive search: the unique codeword within distance t, else v."""
    d = np.count_nonzero(words_all != v, axis=1)
    hits = np.nonzero(d <= t)[0]
    if hits.size == 0:
        return v.copy(), False
    assert hits.size == 1
    return words_all[hits[0]].copy(), True


def exhaustive_pq(code, words_all, i):
    """Exact (count_P, count_Q, patterns) for observed bit 0 by listing every weight-i pattern."""
    n, t = code.n, code.t
    wrong_p = wrong_q = total = 0
    for pos in itertools.combinations(range(1, n), i):
        v = np.zeros(n, dtype=np.uint8)
        v[list(pos)] = 1
        total += 1
        for obs, acc in ((1, "p"), (0, "q")):
            v[0] = obs
            out, _ = nearest_codeword_decode(words_all, v, t)
            if out[0] == 1:
                if acc == "p":
                    wrong_p += 1
                else:
                    wrong_q += 1
    return wrong_p, wrong_q, total


@pytest.fixture(scope="session")
def hamming7():
    return build_bch(3, 1)


@pytest.fixture(scope="session")
def bch15_7():
    return build_bch(4, 2)


@pytest.fixture(scope="session")
def bch31_21():
    return build_bch(5, 2)
