"""Reproduction of the published threshold table for t = 3..7 at L = 1025, w = 16.

Reference values are kept as strings so the number of printed decimals,
which sets each cell's tolerance, survives.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

from .de import CouplingProfile, sc_threshold
from .galois_bch import build_bch, weight_spectrum
from .highrate import ScaledVariant, scaled_threshold
from .miscorrection import miscorrection_table
from .potential import scaled_potential_threshold

T_VALUES = (3, 4, 5, 6, 7)

PUBLISHED = {
    "a_255": ("5.432", "7.701", "9.818", "11.86", "13.87"),
    "a_511": ("5.417", "7.665", "9.811", "11.86", "13.85"),
    "a_1023": ("5.401", "7.693", "9.821", "11.87", "13.88"),
    "rho": ("5.390", "7.688", "9.822", "11.91", "13.93"),
    "a_even_255": ("5.610", "7.752", "9.843", "11.88", "13.87"),
    "a_even_511": ("5.570", "7.767", "9.811", "11.86", "13.85"),
    "a_even_1023": ("5.606", "7.765", "9.841", "11.88", "13.88"),
    "rho_even": ("5.605", "7.761", "9.840", "11.91", "13.93"),
    "rho_ideal": ("5.735", "7.813", "9.855", "11.91", "13.93"),
    "rho_potential": ("5.754", "7.843", "9.896", "11.93", "13.95"),
}

ROW_LABELS = {
    "a_255": "a*(255,t)", "a_511": "a*(511,t)", "a_1023": "a*(1023,t)", "rho": "rho*_t",
    "a_even_255": "a~*(255,t)", "a_even_511": "a~*(511,t)", "a_even_1023": "a~*(1023,t)",
    "rho_even": "rho~*_t", "rho_ideal": "rho^*_t", "rho_potential": "rho^**_t",
}

DEFAULT_ROWS = ("a_255", "rho", "a_even_255", "rho_even", "rho_ideal", "rho_potential")
FULL_ROWS = tuple(PUBLISHED)
PROFILE = CouplingProfile(L=1025, w=16)


def cell_tolerance(published: str) -> float:
    """0.005 for cells printed with three decimals, 0.01 for two."""
    decimals = len(published.partition(".")[2])
    return 0.005 if decimals >= 3 else 0.01


def row_tolerance(key: str, published: str) -> float:
    """Finite-n rows: 0.01 at n = 255, 0.02 for the longer codes.  Scaled rows: by printed decimals."""
    fin = finite_row(key)
    if fin is not None:
        return 0.01 if fin[0] == 255 else 0.02
    return cell_tolerance(published)


def finite_row(key: str) -> Optional[tuple[int, bool]]:
    if not key.startswith("a_"):
        return None
    even = key.startswith("a_even_")
    return int(key.rsplit("_", 1)[1]), even


def compute_cell(key: str, t: int) -> float:
    """One table entry, solved from scratch."""
    fin = finite_row(key)
    if fin is not None:
        n, even = fin
        nu = int(round(math.log2(n + 1)))
        code = build_bch(nu, t, even_subcode=even)
        table = miscorrection_table(n, t, weight_spectrum(code, "binomial_approx"))
        return sc_threshold(table, PROFILE, tol=5e-4 / n).per_constraint
    if key == "rho_potential":
        return scaled_potential_threshold(t, tol=1e-5).threshold
    name = {"rho": "plain", "rho_even": "even", "rho_ideal": "none"}[key]
    return scaled_threshold(ScaledVariant.from_name(name, t), PROFILE, tol=1e-4).threshold


def _cell_job(args):
    key, t = args
    return key, t, compute_cell(key, t)


@dataclass
class Cell:
    row: str
    t: int
    published: str
    computed: float
    tolerance: float

    @property
    def deviation(self) -> float:
        return self.computed - float(self.published)

    @property
    def ok(self) -> bool:
        return abs(self.deviation) <= self.tolerance


@dataclass
class Table1Report:
    cells: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cells)

    def failures(self) -> list:
        return [c for c in self.cells if not c.ok]

    def to_text(self) -> str:
        lines = [f"{'row':<12}" + "".join(f"{'t=' + str(t):>26}" for t in T_VALUES)]
        rows = dict.fromkeys(c.row for c in self.cells)
        for row in rows:
            parts = []
            for t in T_VALUES:
                c = next((c for c in self.cells if c.row == row and c.t == t), None)
                if c is None:
                    parts.append(f"{'-':>26}")
                    continue
                mark = " " if c.ok else "!"
                parts.append(f"{c.published:>7} {c.computed:8.4f} {c.deviation:+8.4f}{mark}")
            lines.append(f"{ROW_LABELS[row]:<12}" + "".join(parts))
        lines.append("columns: published, computed, deviation; '!' marks a cell outside tolerance")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"cells": [dict(asdict(c), deviation=c.deviation, ok=c.ok) for c in self.cells], "ok": self.ok}


def table1_report(tolerance: Optional[float] = None, full: bool = False, rows=None,
                  t_values=T_VALUES, workers: int = 1) -> Table1Report:
    """Compute the table (n = 255 and scaled rows by default, every row with ``full``)."""
    keys = tuple(rows) if rows is not None else (FULL_ROWS if full else DEFAULT_ROWS)
    jobs = [(k, t) for k in keys for t in t_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    cells = []
    for key, t, val in results:
        pub = PUBLISHED[key][T_VALUES.index(t)]
        tol = row_tolerance(key, pub) if tolerance is None else tolerance
        cells.append(Cell(key, t, pub, float(val), tol))
    return Table1Report(cells)


def dumps(report: Table1Report) -> str:
    return json.dumps(report.to_json(), indent=2)
