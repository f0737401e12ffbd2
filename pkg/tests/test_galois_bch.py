import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hddthresh.errors import ConfigurationError, DesignMismatchError
from hddthresh.galois_bch import (PRIMITIVE_POLYS, bdd_decode, build_bch, build_field, cyclotomic_coset,
                                  gf2_polymod, gf2_polymul, krawtchouk, macwilliams, minimal_polynomial,
                                  syndromes, weight_spectrum)

from conftest import codewords_by_poly, nearest_codeword_decode


def _slow_mul(a, b, nu):
    """Carry-less product reduced by the primitive polynomial, bit by bit."""
    return gf2_polymod(gf2_polymul(a, b), PRIMITIVE_POLYS[nu])


@pytest.mark.parametrize("nu", range(2, 11))
def test_field_tables_are_primitive(nu):
    gf = build_field(nu)
    n = (1 << nu) - 1
    powers = [gf.alpha_pow(e) for e in range(n)]
    assert sorted(powers) == list(range(1, n + 1))
    assert gf.alpha_pow(n) == 1


@pytest.mark.parametrize("nu", [3, 4, 5, 8])
def test_field_mul_matches_polynomial_reduction(nu):
    gf = build_field(nu)
    rng = np.random.default_rng(nu)
    for a, b in rng.integers(0, 1 << nu, size=(300, 2)):
        assert gf.mul(int(a), int(b)) == _slow_mul(int(a), int(b), nu)


@given(st.integers(2, 9), st.data())
def test_field_inverse_and_division(nu, data):
    gf = build_field(nu)
    a = data.draw(st.integers(1, (1 << nu) - 1))
    b = data.draw(st.integers(1, (1 << nu) - 1))
    assert gf.mul(a, gf.inv(a)) == 1
    assert gf.mul(gf.div(a, b), b) == a


def test_field_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        build_field(4).inv(0)


def test_cyclotomic_coset_and_minimal_polynomial():
    assert cyclotomic_coset(1, 15) == (1, 2, 4, 8)
    assert cyclotomic_coset(5, 15) == (5, 10)
    gf = build_field(4)
    assert minimal_polynomial(gf, 1) == 0b10011
    assert minimal_polynomial(gf, 3) == 0b11111  # x^4 + x^3 + x^2 + x + 1


@pytest.mark.parametrize("nu,t,k", [(3, 1, 4), (4, 1, 11), (4, 2, 7), (5, 2, 21), (5, 3, 16), (8, 3, 231),
                                    (10, 3, 993)])
def test_bch_dimension(nu, t, k):
    code = build_bch(nu, t)
    assert code.k == k
    assert gf2_polymod((1 << code.n) | 1, code.generator_poly) == 0


def test_design_mismatch_raises():
    # t = 3 at n = 15 has generator degree 10, not nu*t = 12
    with pytest.raises(DesignMismatchError):
        build_bch(4, 3)


def test_t_out_of_range():
    with pytest.raises(ConfigurationError):
        build_bch(3, 4)


def test_matrices_are_consistent(bch15_7):
    G, H = bch15_7.generator_matrix, bch15_7.parity_check_matrix
    assert not np.any(G.astype(int) @ H.T.astype(int) % 2)
    assert H.shape == (8, 15)


def test_hamming_spectrum(hamming7):
    assert list(weight_spectrum(hamming7).exact) == [1, 0, 0, 7, 7, 0, 0, 1]


def test_bch15_7_spectrum_against_polynomial_enumeration(bch15_7):
    words = codewords_by_poly(bch15_7)
    counts = np.bincount(words.sum(axis=1), minlength=16)
    assert list(weight_spectrum(bch15_7).exact) == counts.tolist()
    assert counts.tolist() == [1, 0, 0, 0, 0, 18, 30, 15, 15, 30, 18, 0, 0, 0, 0, 1]


@pytest.mark.parametrize("nu,t", [(4, 2), (5, 2), (5, 3), (4, 1)])
def test_macwilliams_matches_direct_enumeration(nu, t):
    code = build_bch(nu, t)
    assert weight_spectrum(code, "dual_macwilliams").exact == weight_spectrum(code, "exact_enum").exact


def test_krawtchouk_orthogonality():
    n = 9
    for a in range(n + 1):
        for b in range(n + 1):
            s = sum(krawtchouk(n, a, x) * krawtchouk(n, x, b) for x in range(n + 1))
            assert s == (2 ** n if a == b else 0)


def test_macwilliams_of_repetition_code():
    # dual of the length-5 repetition code is the even-weight code
    assert macwilliams([1, 0, 0, 0, 0, 1], 5) == [1, 0, 10, 0, 5, 0]


def test_even_subcode_spectrum():
    code = build_bch(4, 2, even_subcode=True)
    assert code.k == 6
    spec = weight_spectrum(code)
    assert not any(spec.exact[1::2])
    assert min(l for l, a in enumerate(spec.exact) if a and l) == 6
    assert sum(spec.exact) == 64


def test_binomial_approx_sums_near_codebook_size():
    code = build_bch(8, 3)
    spec = weight_spectrum(code, "binomial_approx")
    assert math.isclose(spec.counts.sum(), 2.0 ** code.k, rel_tol=1e-6)
    assert spec.counts[0] == 1 and spec.counts[255] == 1 and spec.counts[5] == 0


def test_unknown_spectrum_method(hamming7):
    with pytest.raises(ConfigurationError):
        weight_spectrum(hamming7, "guess")


def test_spectrum_csv(hamming7):
    text = weight_spectrum(hamming7).to_csv().splitlines()
    assert text[0] == "l,A_l,method"
    assert text[4] == "3,7,exact_enum"


def test_syndromes_vanish_on_codewords(bch15_7):
    for c in codewords_by_poly(bch15_7)[:20]:
        assert syndromes(bch15_7, c) == [0] * 4


@pytest.mark.parametrize("nu,t", [(4, 1), (4, 2), (5, 3)])
def test_bdd_matches_exhaustive_nearest_codeword(nu, t):
    code = build_bch(nu, t)
    words = codewords_by_poly(code)
    rng = np.random.default_rng(nu * 10 + t)
    for _ in range(300):
        c = words[rng.integers(len(words))]
        e = np.zeros(code.n, dtype=np.uint8)
        e[rng.choice(code.n, size=rng.integers(0, 2 * t + 2), replace=False)] = 1
        v = c ^ e
        want, ok = nearest_codeword_decode(words, v, t)
        got = bdd_decode(code, v)
        assert got.corrected == ok
        assert np.array_equal(got.output, want)


def test_even_subcode_bdd_rejects_odd_codewords():
    plain = build_bch(4, 2)
    even = build_bch(4, 2, even_subcode=True)
    odd = [w for w in codewords_by_poly(plain) if w.sum() % 2]
    assert odd
    for w in odd[:10]:
        assert not bdd_decode(even, w).corrected
        assert bdd_decode(plain, w).corrected


@pytest.mark.parametrize("nu,t,even", [(4, 2, False), (4, 2, True), (5, 2, False), (3, 1, False)])
def test_syndrome_table_equals_bdd(nu, t, even):
    code = build_bch(nu, t, even)
    rng = np.random.default_rng(3)
    V = (rng.random((400, code.n)) < 0.15).astype(np.uint8)
    out, ok = code.syndrome_decoder.decode(V)
    for v, o, flag in zip(V, out, ok):
        ref = bdd_decode(code, v)
        assert flag == ref.corrected
        assert np.array_equal(o, ref.output)


def test_coset_symmetry_exhaustive_hamming(hamming7):
    words = codewords_by_poly(hamming7)
    dec = hamming7.syndrome_decoder
    for x in range(128):
        v = np.array([(x >> i) & 1 for i in range(7)], dtype=np.uint8)
        base = bdd_decode(hamming7, v).output
        for c in words:
            assert np.array_equal(bdd_decode(hamming7, v ^ c).output, base ^ c)
        shifted, _ = dec.decode(v[None, :] ^ words)
        assert np.array_equal(shifted, base[None, :] ^ words)


def test_encode_is_codeword(bch31_21):
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = bch31_21.encode(rng.integers(0, 2, bch31_21.k))
        assert bch31_21.is_codeword(c)
    with pytest.raises(ConfigurationError):
        bch31_21.encode([1, 0])
