"""BSC capacity and the redundancy ratio of the BCH-based GLDPC ensemble.

Each bit sits in two component codes, so the designed redundancy is
1 - R = 2*nu*t/n (2*(nu*t + 1)/n for the even-weight subcode).  The ratio
(1 - C(p*)) / (1 - R) measures how close the ensemble's redundancy is to
the Shannon minimum at its own threshold.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError


def binary_entropy(p):
    """H(p) in bits, with H(0) = H(1) = 0."""
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ConfigurationError("p must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(arr * np.log2(arr)) - (1 - arr) * np.log2(1 - arr)
    h = np.where((arr == 0) | (arr == 1), 0.0, h)
    return float(h) if np.ndim(p) == 0 else h


def bsc_capacity(p):
    h = binary_entropy(p)
    return 1.0 - h


@dataclass
class RedundancyReport:
    t: int
    nu: int
    n: int
    rate: float
    threshold: float
    ratio: float
    epsilon_achieving: dict = field(default_factory=dict)  # eps -> bool
    even_subcode: bool = False
    source: str = "ideal"  # ideal (p = 2t/n) | measured (p = rho*/n)

    def as_row(self) -> dict:
        row = asdict(self)
        row.pop("epsilon_achieving")
        for eps, ok in sorted(self.epsilon_achieving.items()):
            row[f"eps_{eps:g}"] = ok
        return row


def redundancy(t: int, nu: int, even_subcode: bool = False) -> float:
    n = 2 ** nu - 1
    return 2.0 * (nu * t + (1 if even_subcode else 0)) / n


def _parse_range(nu_range) -> list[int]:
    if isinstance(nu_range, str):
        a, _, b = nu_range.partition("..")
        return list(range(int(a), int(b or a) + 1))
    return [int(v) for v in nu_range]


def capacity_ratio_sweep(t: int, nu_range: Iterable[int] | str, rho_star: Optional[float] = None,
                         even_subcode: bool = False,
                         eps_targets: Sequence[float] = (0.2,)) -> list[RedundancyReport]:
    """One report per nu; p* = 2t/n unless a measured scaled threshold ``rho_star`` is supplied."""
    if t < 1:
        raise ConfigurationError("t must be positive")
    out = []
    for nu in _parse_range(nu_range):
        if nu < 2:
            raise ConfigurationError(f"nu must be at least 2, got {nu}")
        n = 2 ** nu - 1
        red = redundancy(t, nu, even_subcode)
        if not 0 < red < 1:
            raise ConfigurationError(f"(nu={nu}, t={t}) gives rate {1 - red:.3g}, outside (0, 1)")
        p = (rho_star if rho_star is not None else 2.0 * t) / n
        if not 0 <= p <= 1:
            raise ConfigurationError(f"threshold {p} is not a probability")
        ratio = binary_entropy(p) / red
        flags = {float(e): bool(ratio >= 1.0 - e) for e in eps_targets}
        out.append(RedundancyReport(t, nu, n, 1.0 - red, p, ratio, flags, even_subcode,
                                    "ideal" if rho_star is None else "measured"))
    return out


def first_achieving_nu(reports: Sequence[RedundancyReport], eps: float) -> Optional[int]:
    for r in reports:
        if r.epsilon_achieving.get(float(eps)):
            return r.nu
    return None


def reports_to_csv(reports: Sequence[RedundancyReport]) -> str:
    rows = [r.as_row() for r in reports]
    buf = io.StringIO()
    if rows:
        wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        for row in rows:
            wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def reports_to_json(reports: Sequence[RedundancyReport]) -> str:
    data = []
    for r in reports:
        d = asdict(r)
        d["epsilon_achieving"] = {f"{k:g}": v for k, v in r.epsilon_achieving.items()}
        data.append(d)
    return json.dumps(data, indent=2)

