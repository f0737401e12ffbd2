"""Random Tanner graphs for the (C, m) and (C, m, L, w) ensembles.

Sockets are addressed globally: constraint c, slot k  ->  c * n + k.  Bit b
owns edges (b, 0) and (b, 1).  Constraint sockets with no bit behind them
(the terminated ends of a coupled chain) are virtual and always carry a
known zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..de import CouplingProfile
from ..errors import ConfigurationError
from ..galois_bch import ComponentCode

MAX_REPAIR_ROUNDS = 10_000


@dataclass(frozen=True, eq=False)
class TannerGraph:
    n: int
    m: int
    L: int
    w: int
    coupled: bool
    bit_sockets: np.ndarray        # (N, 2) global constraint sockets
    bit_position: np.ndarray       # (N,)
    constraint_position: np.ndarray  # (C,)
    socket_bit: np.ndarray         # (C*n,) bit index, -1 when virtual
    socket_side: np.ndarray        # (C*n,) which of the bit's two edges
    seed: object
    repairs: int = 0

    @property
    def num_bits(self) -> int:
        return self.bit_sockets.shape[0]

    @property
    def num_constraints(self) -> int:
        return self.constraint_position.shape[0]

    @property
    def bit_constraints(self) -> np.ndarray:
        return self.bit_sockets // self.n

    def degree_histogram(self) -> tuple[dict, dict]:
        """(bit degree -> count, constraint degree -> count); virtual sockets count toward degree."""
        real = self.socket_bit >= 0
        bits = np.bincount(np.bincount(self.socket_bit[real], minlength=self.num_bits))
        per_con = np.bincount(self.bit_constraints.ravel(), minlength=self.num_constraints)
        virtual = (~real).reshape(self.num_constraints, self.n).sum(axis=1)
        cons = per_con + virtual
        return ({int(k): int(v) for k, v in enumerate(bits) if v},
                {int(k): int(v) for k, v in enumerate(np.bincount(cons)) if v})


def _collisions(cons_of_edge: np.ndarray) -> np.ndarray:
    """Bits whose two edges land in the same constraint."""
    c = cons_of_edge.reshape(-1, 2)
    return np.nonzero(c[:, 0] == c[:, 1])[0]


def _build(code: ComponentCode, m: int, L: int, w: int, coupled: bool, seed) -> TannerGraph:
    n = code.n
    if m < 1:
        raise ConfigurationError("m must be positive")
    if (m * n) % 2:
        raise ConfigurationError(f"m*n = {m * n} must be even")
    if (m * n) % w:
        raise ConfigurationError(f"m*n = {m * n} must be divisible by w = {w}")
    rng = np.random.default_rng(seed)
    per_pos_bits = m * n // 2
    group = m * n // w
    P = L + w - 1
    N = L * per_pos_bits

    # bit-side edge ids 2b+s, grouped per (position, group) by a uniform permutation
    bit_groups = np.empty((L, w, group), dtype=np.int64)
    for i in range(L):
        edges = 2 * i * per_pos_bits + rng.permutation(m * n)
        bit_groups[i] = edges.reshape(w, group)
    # constraint sockets grouped the same way
    con_groups = np.empty((P, w, group), dtype=np.int64)
    for c in range(P):
        con_groups[c] = (c * m * n + rng.permutation(m * n)).reshape(w, group)

    edge_target = np.empty(2 * N, dtype=np.int64)
    edge_pool = np.empty(2 * N, dtype=np.int64)
    for i in range(L):
        for j in range(w):
            src = bit_groups[i, j]
            dst = con_groups[i + j, w - j - 1][rng.permutation(group)]
            edge_target[src] = dst
            edge_pool[src] = i * w + j

    # repair repeated-constraint collisions by swapping targets inside a pool
    repairs = 0
    pool_members = None
    for _ in range(MAX_REPAIR_ROUNDS):
        bad = _collisions(edge_target // n)
        if bad.size == 0:
            break
        if pool_members is None:
            order = np.argsort(edge_pool, kind="stable")
            starts = np.searchsorted(edge_pool[order], np.arange(L * w))
            pool_members = (order, starts)
        order, starts = pool_members
        for b in bad:
            e = 2 * b + 1
            pool = edge_pool[e]
            lo = starts[pool]
            partner = order[lo + rng.integers(group)]
            edge_target[e], edge_target[partner] = edge_target[partner], edge_target[e]
            repairs += 1
    else:
        raise ConfigurationError("could not remove repeated-constraint collisions; increase m")

    bit_sockets = edge_target.reshape(N, 2)
    socket_bit = np.full(P * m * n, -1, dtype=np.int64)
    socket_side = np.zeros(P * m * n, dtype=np.int8)
    socket_bit[edge_target] = np.arange(2 * N) // 2
    socket_side[edge_target] = np.arange(2 * N) % 2
    return TannerGraph(
        n=n, m=m, L=L, w=w, coupled=coupled,
        bit_sockets=bit_sockets,
        bit_position=np.repeat(np.arange(L), per_pos_bits),
        constraint_position=np.repeat(np.arange(P), m),
        socket_bit=socket_bit, socket_side=socket_side,
        seed=seed, repairs=repairs,
    )


def sample_uncoupled_graph(code: ComponentCode, m: int, seed) -> TannerGraph:
    """mn/2 degree-2 bits, m degree-n constraints, uniform socket permutation."""
    return _build(code, m, 1, 1, False, seed)


def sample_coupled_graph(code: ComponentCode, m: int, profile: CouplingProfile, seed) -> TannerGraph:
    """Group-wise matchings from bit position i, group j to constraint position i+j, group w-j-1."""
    return _build(code, m, profile.L, profile.w, True, seed)
