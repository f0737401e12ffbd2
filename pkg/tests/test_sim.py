import json

import numpy as np
import pytest

from hddthresh.de import CouplingProfile
from hddthresh.errors import ConfigurationError
from hddthresh.galois_bch import build_bch
from hddthresh.sim import (empirical_pq, sample_coupled_graph, sample_uncoupled_graph, simulate_hdd,
                           trial_seed)


def _check_graph(g):
    n, m = g.n, g.m
    N = g.num_bits
    sockets = g.bit_sockets.ravel()
    assert np.unique(sockets).size == sockets.size  # each socket used at most once
    cons = g.bit_constraints
    assert np.all(cons[:, 0] != cons[:, 1])  # no bit meets the same constraint twice
    # socket tables invert the bit table
    assert np.array_equal(g.socket_bit[sockets], np.repeat(np.arange(N), 2))
    assert np.array_equal(g.socket_side[sockets], np.tile([0, 1], N))
    assert (g.socket_bit < 0).sum() == (g.L + g.w - 1) * m * n - 2 * N
    # locality: position-i bits only reach constraint positions i..i+w-1
    cpos = g.constraint_position[cons]
    off = cpos - g.bit_position[:, None]
    assert off.min() >= 0 and off.max() <= g.w - 1


def test_coupled_graph_invariants_many_seeds(bch15_7):
    for seed in range(100):
        g = sample_coupled_graph(bch15_7, 40, CouplingProfile(6, 3), seed)
        _check_graph(g)
        assert g.num_bits == 6 * 40 * 15 // 2


def test_uncoupled_graph_degrees(hamming7):
    g = sample_uncoupled_graph(hamming7, 2, seed=1)
    _check_graph(g)
    bits, cons = g.degree_histogram()
    assert bits == {2: 7} and cons == {7: 2}


def test_coupled_edge_groups_spread_evenly(bch15_7):
    g = sample_coupled_graph(bch15_7, 40, CouplingProfile(8, 4), seed=3)
    off = g.constraint_position[g.bit_constraints] - g.bit_position[:, None]
    counts = np.bincount(off.ravel(), minlength=4)
    assert np.all(counts == counts[0])


def test_graph_deterministic_and_seed_sensitive(bch15_7):
    a = sample_coupled_graph(bch15_7, 40, CouplingProfile(5, 2), seed=7)
    b = sample_coupled_graph(bch15_7, 40, CouplingProfile(5, 2), seed=7)
    c = sample_coupled_graph(bch15_7, 40, CouplingProfile(5, 2), seed=8)
    assert np.array_equal(a.bit_sockets, b.bit_sockets)
    assert not np.array_equal(a.bit_sockets, c.bit_sockets)


def test_w1_is_block_diagonal(bch15_7):
    g = sample_coupled_graph(bch15_7, 40, CouplingProfile(4, 1), seed=0)
    assert np.all(g.constraint_position[g.bit_constraints] == g.bit_position[:, None])


@pytest.mark.parametrize("m,L,w", [(3, 1, 1), (40, 4, 7), (0, 1, 1)])
def test_graph_configuration_errors(bch15_7, m, L, w):
    with pytest.raises(ConfigurationError):
        if L == 1:
            sample_uncoupled_graph(bch15_7, m, 0)
        else:
            sample_coupled_graph(bch15_7, m, CouplingProfile(L, w), 0)


def test_zero_noise_succeeds_immediately(bch15_7):
    g = sample_uncoupled_graph(bch15_7, 20, 0)
    tr = simulate_hdd(g, bch15_7, 0.0, 10, seed=0)
    assert tr.verdict == "success" and tr.iterations == 0


def test_random_codeword_matches_all_zero(hamming7, bch31_21):
    for code, m in ((hamming7, 20), (bch31_21, 10)):
        g = sample_uncoupled_graph(code, m, 2)
        z = simulate_hdd(g, code, 0.06, 15, seed=5)
        r = simulate_hdd(g, code, 0.06, 15, seed=5, transmit="random")
        assert z.message_errors == r.message_errors
        assert z.bit_errors == r.bit_errors


def test_reference_engine_matches_table_engine(bch15_7):
    g = sample_coupled_graph(bch15_7, 8, CouplingProfile(3, 2), seed=4)
    a = simulate_hdd(g, bch15_7, 0.08, 6, seed=11)
    b = simulate_hdd(g, bch15_7, 0.08, 6, seed=11, engine="reference")
    assert a.message_errors == b.message_errors and a.bit_errors == b.bit_errors
    assert a.iterations >= 1


def test_incoming_slot_rule_differs(bch31_21):
    g = sample_uncoupled_graph(bch31_21, 200, 1)
    a = simulate_hdd(g, bch31_21, 0.05, 8, seed=3)
    b = simulate_hdd(g, bch31_21, 0.05, 8, seed=3, slot_value="incoming")
    assert a.message_errors[0] == b.message_errors[0]
    assert a.message_errors != b.message_errors


def test_trace_outputs_deterministic(bch15_7):
    g = sample_coupled_graph(bch15_7, 8, CouplingProfile(4, 2), seed=0)
    a = simulate_hdd(g, bch15_7, 0.05, 5, seed=trial_seed(1, 2))
    b = simulate_hdd(g, bch15_7, 0.05, 5, seed=trial_seed(1, 2))
    assert a.to_csv() == b.to_csv() and a.metadata_json() == b.metadata_json()
    rows = a.to_csv().splitlines()
    assert rows[0] == "iteration,position,message_errors,bit_errors"
    assert len(rows) == 1 + 4 * (a.iterations + 1)
    meta = json.loads(a.metadata_json())
    assert meta["L"] == 4 and meta["verdict"] == a.verdict
    assert sum(a.position_message_errors[0]) == a.message_errors[0]


def test_explicit_error_pattern(hamming7):
    g = sample_uncoupled_graph(hamming7, 2, 0)
    e = np.zeros(7, dtype=np.uint8)
    e[3] = 1
    tr = simulate_hdd(g, hamming7, 0.0, 5, seed=0, errors=e)
    assert tr.message_errors[0] == 2 and tr.verdict == "success"
    with pytest.raises(ConfigurationError):
        simulate_hdd(g, hamming7, 0.0, 5, seed=0, errors=np.zeros(3))


def test_empirical_pq(hamming7, bch15_7):
    est = empirical_pq(hamming7, 2, 20_000, seed=0)
    assert abs(est.Q - 0.2) < 4 * est.stderr[1]
    assert est.P == 1.0
    low = empirical_pq(bch15_7, 1, 2000, seed=1)
    assert low.P == 0.0 and low.Q == 0.0
    ref = empirical_pq(bch15_7, 4, 1000, seed=2, engine="reference")
    tab = empirical_pq(bch15_7, 4, 1000, seed=2)
    assert ref == tab
    with pytest.raises(ConfigurationError):
        empirical_pq(hamming7, 2, 10, seed=0)
