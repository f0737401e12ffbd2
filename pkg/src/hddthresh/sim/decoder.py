"""Iterative hard-decision message passing on a sampled Tanner graph.

Bit i sends to its constraint j' the i-th output of BDD at its other
constraint j, run on j's incoming messages with the i-th slot overwritten by
the channel value r_i.  Messages are therefore extrinsic; this is not
row/column iteration.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..errors import ConfigurationError
from ..galois_bch import ComponentCode, bdd_decode, gf2_nullspace
from .graph import TannerGraph

ENGINES = ("table", "reference")
SLOT_VALUES = ("channel", "incoming")


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Independent stream for trial ``trial`` of a run seeded with ``seed``."""
    return np.random.SeedSequence([int(seed), int(trial)])


@dataclass
class SimTrace:
    message_errors: list = field(default_factory=list)   # per iteration, whole graph
    bit_errors: list = field(default_factory=list)
    position_message_errors: list = field(default_factory=list)  # per iteration, length-L arrays
    position_bit_errors: list = field(default_factory=list)
    total_messages: int = 0
    total_bits: int = 0
    verdict: str = "cap"  # success | failure | cap
    metadata: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.message_errors) - 1

    def message_error_rate(self) -> np.ndarray:
        return np.asarray(self.message_errors, dtype=float) / self.total_messages

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["iteration", "position", "message_errors", "bit_errors"])
        for it, (pm, pb) in enumerate(zip(self.position_message_errors, self.position_bit_errors)):
            for pos in range(len(pm)):
                wr.writerow([it, pos + 1, int(pm[pos]), int(pb[pos])])
        return buf.getvalue()

    def metadata_json(self) -> str:
        meta = dict(self.metadata)
        meta.update(verdict=self.verdict, iterations=self.iterations,
                    total_messages=self.total_messages, total_bits=self.total_bits)
        return json.dumps(meta, indent=2, sort_keys=True, default=str)


def random_global_codeword(graph: TannerGraph, code: ComponentCode, rng: np.random.Generator) -> np.ndarray:
    """Uniform codeword of the whole graph code (virtual sockets pinned to zero)."""
    H = code.parity_check_matrix.astype(np.uint8)
    r = H.shape[0]
    M = np.zeros((graph.num_constraints * r, graph.num_bits), dtype=np.uint8)
    sb = graph.socket_bit.reshape(graph.num_constraints, code.n)
    for c in range(graph.num_constraints):
        for k in range(code.n):
            b = sb[c, k]
            if b >= 0:
                M[c * r:(c + 1) * r, b] ^= H[:, k]
    basis = gf2_nullspace(M)
    if basis.shape[0] == 0:
        return np.zeros(graph.num_bits, dtype=np.uint8)
    coeff = rng.integers(0, 2, size=basis.shape[0], dtype=np.uint8)
    return (coeff @ basis % 2).astype(np.uint8)


class _Decoder:
    def __init__(self, graph: TannerGraph, code: ComponentCode, engine: str, slot_value: str):
        if graph.n != code.n:
            raise ConfigurationError(f"graph built for n={graph.n}, code has n={code.n}")
        if engine not in ENGINES:
            raise ConfigurationError(f"engine must be one of {ENGINES}")
        if slot_value not in SLOT_VALUES:
            raise ConfigurationError(f"slot_value must be one of {SLOT_VALUES}")
        self.g, self.code, self.engine, self.slot_value = graph, code, engine, slot_value
        C, n = graph.num_constraints, code.n
        self.sb = graph.socket_bit.reshape(C, n)
        self.ss = graph.socket_side.reshape(C, n).astype(np.int64)
        self.real = self.sb >= 0
        self.sb0 = np.where(self.real, self.sb, 0)
        if engine == "table":
            self.dec = code.syndrome_decoder
            self.slots = np.broadcast_to(np.arange(n), (C, n))

    def step(self, mu: np.ndarray, r: np.ndarray, virtual_value: np.ndarray) -> np.ndarray:
        U = np.where(self.real, mu[self.sb0, self.ss], virtual_value)
        slot = np.where(self.real, r[self.sb0], U) if self.slot_value == "channel" else U
        if self.engine == "table":
            S = self.dec.syndrome(U)
            cols = self.dec.columns
            Sk = S[:, None] ^ np.where((U ^ slot).astype(bool), cols[None, :], 0)
            out = slot ^ self.dec.flips_at(Sk, self.slots).astype(np.uint8)
        else:
            out = np.empty_like(U)
            for c in range(U.shape[0]):
                for k in range(U.shape[1]):
                    if not self.real[c, k]:
                        out[c, k] = U[c, k]
                        continue
                    v = U[c].copy()
                    v[k] = slot[c, k]
                    out[c, k] = bdd_decode(self.code, v).output[k]
        new = np.empty_like(mu)
        new[self.sb[self.real], 1 - self.ss[self.real]] = out[self.real]
        return new


def simulate_hdd(graph: TannerGraph, code: ComponentCode, p: float, max_iters: int, seed,
                 transmit: str = "zero", engine: str = "table", slot_value: str = "channel",
                 errors: Optional[np.ndarray] = None) -> SimTrace:
    """Run the extrinsic HDD decoder over BSC(p) and record error counts per iteration.

    The channel noise is drawn from its own stream of ``seed`` so that the
    all-zero and random-codeword modes see the same error pattern.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"p must lie in [0, 1], got {p}")
    if max_iters < 0:
        raise ConfigurationError("max_iters must be nonnegative")
    if transmit not in ("zero", "random"):
        raise ConfigurationError("transmit must be 'zero' or 'random'")
    ss = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    noise_ss, cw_ss = ss.spawn(2)
    N = graph.num_bits
    if errors is None:
        e = (np.random.default_rng(noise_ss).random(N) < p).astype(np.uint8)
    else:
        e = np.asarray(errors, dtype=np.uint8).copy()
        if e.shape != (N,):
            raise ConfigurationError(f"errors must have shape ({N},)")
    if transmit == "random":
        cw = random_global_codeword(graph, code, np.random.default_rng(cw_ss))
    else:
        cw = np.zeros(N, dtype=np.uint8)
    r = cw ^ e
    dec = _Decoder(graph, code, engine, slot_value)
    virtual_value = np.zeros(dec.sb.shape, dtype=np.uint8)

    pos = graph.bit_position
    L = graph.L
    trace = SimTrace(total_messages=2 * N, total_bits=N)
    trace.metadata = dict(p=p, seed=str(seed), graph_seed=str(graph.seed), max_iters=max_iters,
                          n=code.n, k=code.k, t=code.t, even_subcode=code.even_subcode, m=graph.m,
                          L=graph.L, w=graph.w, coupled=graph.coupled, transmit=transmit,
                          engine=engine, slot_value=slot_value)

    def record(mu):
        wrong_msg = (mu != cw[:, None]).sum(axis=1)
        est = ((r.astype(np.int64) + mu[:, 0] + mu[:, 1]) >= 2).astype(np.uint8)
        wrong_bit = est != cw
        pm = np.bincount(pos, weights=wrong_msg, minlength=L).astype(np.int64)
        pb = np.bincount(pos, weights=wrong_bit, minlength=L).astype(np.int64)
        trace.message_errors.append(int(wrong_msg.sum()))
        trace.bit_errors.append(int(wrong_bit.sum()))
        trace.position_message_errors.append(pm)
        trace.position_bit_errors.append(pb)
        return int(wrong_msg.sum())

    mu = np.repeat(r[:, None], 2, axis=1)
    if record(mu) == 0:
        trace.verdict = "success"
        return trace
    for _ in range(max_iters):
        new = dec.step(mu, r, virtual_value)
        errs = record(new)
        if errs == 0:
            trace.verdict = "success"
            return trace
        if np.array_equal(new, mu):
            trace.verdict = "failure"
            return trace
        mu = new
    trace.verdict = "cap"
    return trace


class EmpiricalPQ(NamedTuple):
    P: float
    Q: float
    stderr: tuple  # (stderr of P, stderr of Q)
    trials: int


def empirical_pq(code: ComponentCode, i: int, trials: int, seed, engine: str = "table") -> EmpiricalPQ:
    """Monte Carlo P(i), Q(i): i uniform errors on the other n-1 positions of a random observed bit."""
    n = code.n
    if not 0 <= i <= n - 1:
        raise ConfigurationError(f"i must lie in [0, {n - 1}]")
    if trials < 1000:
        raise ConfigurationError("use at least 1000 trials")
    if engine not in ENGINES:
        raise ConfigurationError(f"engine must be one of {ENGINES}")
    rng = np.random.default_rng(seed)
    obs = rng.integers(0, n, size=trials)
    # i distinct positions out of the n-1 others: rank random keys, skipping the observed bit
    keys = rng.random((trials, n))
    keys[np.arange(trials), obs] = np.inf
    picked = np.argsort(keys, axis=1)[:, :i]
    words = np.zeros((trials, n), dtype=np.uint8)
    np.put_along_axis(words, picked, 1, axis=1)
    estimates = []
    for observed_wrong in (1, 0):
        w = words.copy()
        w[np.arange(trials), obs] = observed_wrong
        if engine == "table":
            out, _ = code.syndrome_decoder.decode(w)
        else:
            out = np.array([bdd_decode(code, row).output for row in w])
        wrong = out[np.arange(trials), obs] != 0
        estimates.append(float(wrong.mean()))
    P, Q = estimates
    se = tuple(float(np.sqrt(max(v * (1 - v), 0.0) / trials)) for v in (P, Q))
    return EmpiricalPQ(P, Q, se, trials)
