"""Command-line front end.

    hddthresh <command> [options]

Structured results go to JSON, traces and curves to CSV; stdout gets a
short human-readable summary.  Artifacts land in --out, which defaults to
$HDDTHRESH_OUT or the working directory.  Exit status: 0 ok, 1 table cells
outside tolerance, 2 configuration error, 3 numerical-consistency error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import ConfigurationError, NumericalConsistencyError

OUT_ENV = "HDDTHRESH_OUT"
EXIT_OK, EXIT_TABLE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
_QUIET = False


@dataclass
class RunConfig:
    command: str = ""
    nu: int = 8
    t: int = 3
    even_subcode: bool = False
    spectrum: str = "auto"
    L: int = 1025
    w: int = 16
    tol: Optional[float] = None
    max_iters: Optional[int] = None  # None: the regime's default budget
    seed: int = 0
    out: str = ""
    fmt: str = "json"
    options: dict = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        data = {k: v for k, v in vars(ns).items() if k not in ("func", "config", "quiet")}
        known = {f for f in cls.__dataclass_fields__ if f != "options"}
        cfg = cls(**{k: v for k, v in data.items() if k in known})
        cfg.options = {k: v for k, v in sorted(data.items()) if k not in known}
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


# -- output helpers -------------------------------------------------------------

def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.out or os.environ.get(OUT_ENV, "") or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def write_json(cfg: RunConfig, name: str, result: dict) -> Path:
    doc = {"tool": "hddthresh", "version": __version__, "config": cfg.to_dict(), "result": result,
           "run_info": {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}}
    path = _out_dir(cfg) / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, default=_jsonable) + "\n")
    return path


def write_csv(cfg: RunConfig, name: str, body: str) -> Path:
    header = (f"# hddthresh {__version__}\n"
              f"# config: {json.dumps(cfg.to_dict(), sort_keys=True, default=_jsonable)}\n")
    path = _out_dir(cfg) / f"{name}.csv"
    path.write_text(header + body)
    return path


def _say(cfg: RunConfig, msg: str) -> None:
    if not _QUIET:
        print(msg)


def parse_nu_range(text: str) -> list[int]:
    """'8..20' -> 8..20 inclusive; '8,10,12' -> that list."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"bad nu range {text!r}; use e.g. 8..20 or 8,10,12") from None


# -- shared builders ------------------------------------------------------------

def _table_for(cfg: RunConfig):
    from .galois_bch import EXACT_ENUM_MAX_DIM, build_bch, weight_spectrum
    from .miscorrection import idealized_table, miscorrection_table

    code = build_bch(cfg.nu, cfg.t, cfg.even_subcode)
    method = cfg.spectrum
    if method == "ideal":
        return code, idealized_table(code.n, cfg.t)
    if method == "auto":
        if code.k <= EXACT_ENUM_MAX_DIM:
            method = "exact_enum"
        elif code.n - code.k <= EXACT_ENUM_MAX_DIM:
            method = "dual_macwilliams"
        else:
            method = "binomial_approx"
    return code, miscorrection_table(code.n, cfg.t, weight_spectrum(code, method))


def _profile(cfg: RunConfig):
    from .de import CouplingProfile

    return CouplingProfile(L=cfg.L, w=cfg.w)


def _budget(cfg: RunConfig, default: int) -> int:
    return default if cfg.max_iters is None else cfg.max_iters


def _threshold_dict(res) -> dict:
    d = {"threshold": res.threshold, "success_at": res.success_at, "failure_at": res.failure_at,
         "tolerance": res.tolerance, "evaluations": res.evaluations, "extra": res.extra}
    if res.per_constraint is not None:
        d["per_constraint"] = res.per_constraint
    return d


# -- commands -------------------------------------------------------------------

def cmd_threshold(cfg: RunConfig) -> int:
    from .de import DELimits, sc_threshold, uncoupled_threshold

    code, table = _table_for(cfg)
    if cfg.options.get("uncoupled"):
        res = uncoupled_threshold(table, tol=cfg.tol or 1e-6)
    else:
        res = sc_threshold(table, _profile(cfg), tol=cfg.tol or 5e-4 / code.n,
                           limits=DELimits(max_iters=_budget(cfg, DELimits().max_iters)))
    out = _threshold_dict(res)
    out.update(p_star=res.threshold, a_star=res.per_constraint, code=code.label, table_source=table.source)
    path = write_json(cfg, "threshold", out)
    _say(cfg, f"{code.label}: p* = {res.threshold:.6g}, a* = n p* = {res.per_constraint:.4f}  -> {path}")
    return EXIT_OK


def cmd_scaled_threshold(cfg: RunConfig) -> int:
    from .de import DELimits
    from .highrate import SCALED_LIMITS, ScaledVariant, scaled_threshold

    variant = ScaledVariant.from_name(cfg.options["variant"], cfg.t)
    limits = DELimits(_budget(cfg, SCALED_LIMITS.max_iters), SCALED_LIMITS.eps_success,
                      SCALED_LIMITS.eps_stall)
    res = scaled_threshold(variant, _profile(cfg), tol=cfg.tol or 1e-4, limits=limits)
    out = _threshold_dict(res)
    out.update(rho_star=res.threshold, variant=variant.kind)
    path = write_json(cfg, "scaled_threshold", out)
    _say(cfg, f"t={cfg.t} {variant.kind}: rho* = {res.threshold:.4f}  -> {path}")
    return EXIT_OK


def cmd_potential(cfg: RunConfig) -> int:
    from .potential import potential_curve, potential_threshold_finite, scaled_potential_threshold

    n = cfg.options.get("n")
    param = cfg.options.get("param")
    result = {}
    if n is None:
        res = scaled_potential_threshold(cfg.t, tol=cfg.tol or 1e-5)
        result["rho_star_star"] = res.threshold
    else:
        res = potential_threshold_finite(n, cfg.t, tol=cfg.tol or 1e-7)
        result.update(p_star_star=res.threshold, a_star_star=res.per_constraint)
    result["threshold"] = _threshold_dict(res)
    if param is None:
        param = res.threshold
    curve = potential_curve(param, cfg.t, n=n, points=cfg.options.get("points", 201))
    result["curve_parameter"] = param
    result["curve_min"] = float(curve.values.min())
    csv_path = write_csv(cfg, "potential_curve", curve.to_csv())
    path = write_json(cfg, "potential", result)
    _say(cfg, f"potential threshold {res.threshold:.6g}; curve at {param:.6g} -> {csv_path}, {path}")
    return EXIT_OK


def cmd_de_trace(cfg: RunConfig) -> int:
    from .de import DELimits, sc_de_run

    every = cfg.options.get("record_every", 1)
    rho = cfg.options.get("rho")
    if rho is not None:
        from .highrate import SCALED_LIMITS, ScaledVariant, sc_scaled_de_run

        variant = ScaledVariant.from_name(cfg.options.get("variant", "plain"), cfg.t)
        limits = DELimits(_budget(cfg, SCALED_LIMITS.max_iters), SCALED_LIMITS.eps_success,
                      SCALED_LIMITS.eps_stall)
        trace = sc_scaled_de_run(rho, variant, _profile(cfg), limits, record=True, record_every=every)
    else:
        p = cfg.options.get("p")
        if p is None:
            raise ConfigurationError("de-trace needs --p (finite n) or --rho (scaled)")
        _, table = _table_for(cfg)
        trace = sc_de_run(p, table, _profile(cfg), DELimits(max_iters=_budget(cfg, DELimits().max_iters)), record=True,
                          record_every=every)
    csv_path = write_csv(cfg, "de_trace", trace.to_csv())
    path = write_json(cfg, "de_trace", {"verdict": trace.verdict, "iterations": trace.iterations_used,
                                        "residual": trace.residual})
    _say(cfg, f"{trace.verdict} after {trace.iterations_used} iterations -> {csv_path}, {path}")
    return EXIT_OK


def cmd_table1(cfg: RunConfig) -> int:
    from .table1 import table1_report

    rep = table1_report(tolerance=cfg.options.get("tolerance"), full=cfg.options.get("full", False),
                        workers=cfg.options.get("workers", 1))
    path = write_json(cfg, "table1", rep.to_json())
    _say(cfg, rep.to_text())
    _say(cfg, f"-> {path}")
    return EXIT_OK if rep.ok else EXIT_TABLE


def cmd_capacity(cfg: RunConfig) -> int:
    from .capacity import capacity_ratio_sweep, first_achieving_nu, reports_to_csv, reports_to_json

    eps = tuple(cfg.options.get("eps") or (0.2,))
    reps = capacity_ratio_sweep(cfg.t, parse_nu_range(cfg.options["nu_range"]), cfg.options.get("rho_star"),
                                cfg.even_subcode, eps)
    if cfg.fmt == "csv":
        path = write_csv(cfg, "capacity", reports_to_csv(reps))
    else:
        path = write_json(cfg, "capacity", {"reports": json.loads(reports_to_json(reps)),
                                            "first_achieving_nu": {f"{e:g}": first_achieving_nu(reps, e)
                                                                   for e in eps}})
    for r in reps:
        _say(cfg, f"nu={r.nu:2d} n={r.n:7d} R={r.rate:.4f} ratio={r.ratio:.4f}")
    _say(cfg, f"-> {path}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    from .galois_bch import build_bch
    from .sim import sample_coupled_graph, sample_uncoupled_graph, simulate_hdd, trial_seed

    code = build_bch(cfg.nu, cfg.t, cfg.even_subcode)
    m = cfg.options["m"]
    gseed, nseed = trial_seed(cfg.seed, 0), trial_seed(cfg.seed, 1)
    if cfg.options.get("coupled"):
        graph = sample_coupled_graph(code, m, _profile(cfg), gseed)
    else:
        graph = sample_uncoupled_graph(code, m, gseed)
    trace = simulate_hdd(graph, code, cfg.options["p"], cfg.max_iters, nseed,
                         engine=cfg.options.get("engine", "table"))
    trace.metadata.update(seed=cfg.seed, graph_seed=[cfg.seed, 0], noise_seed=[cfg.seed, 1])
    csv_path = write_csv(cfg, "sim_trace", trace.to_csv())
    meta_path = _out_dir(cfg) / "sim_trace.meta.json"
    meta_path.write_text(trace.metadata_json() + "\n")
    path = write_json(cfg, "simulate", {"verdict": trace.verdict, "iterations": trace.iterations,
                                        "message_errors": trace.message_errors,
                                        "bit_errors": trace.bit_errors})
    _say(cfg, f"{trace.verdict} after {trace.iterations} iterations; message errors "
              f"{trace.message_errors[:6]}... -> {csv_path}")
    _say(cfg, f"-> {path}")
    return EXIT_OK


def cmd_empirical_pq(cfg: RunConfig) -> int:
    from .galois_bch import build_bch, weight_spectrum
    from .miscorrection import miscorrection_table
    from .sim import empirical_pq

    code = build_bch(cfg.nu, cfg.t, cfg.even_subcode)
    analytic = None
    if code.k <= 24 or code.n - code.k <= 24:
        method = "exact_enum" if code.k <= 24 else "dual_macwilliams"
        analytic = miscorrection_table(code.n, cfg.t, weight_spectrum(code, method))
    rows = []
    for k, i in enumerate(cfg.options["i"]):
        est = empirical_pq(code, i, cfg.options["trials"], [cfg.seed, k])
        row = {"i": i, "P_hat": est.P, "Q_hat": est.Q, "stderr_P": est.stderr[0], "stderr_Q": est.stderr[1],
               "trials": est.trials}
        if analytic is not None:
            row.update(P=float(analytic.P[i]), Q=float(analytic.Q[i]))
        rows.append(row)
        _say(cfg, "  ".join(f"{k}={v:.5g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    path = write_json(cfg, "empirical_pq", {"code": code.label, "rows": rows})
    _say(cfg, f"-> {path}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="", help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--config", help="JSON RunConfig (or an artifact embedding one) supplying defaults")
    p.add_argument("--quiet", action="store_true")


def _add_code(p: argparse.ArgumentParser, nu: int = 8) -> None:
    p.add_argument("--nu", type=int, default=nu, help="field degree; n = 2^nu - 1")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--even-subcode", action="store_true")
    p.add_argument("--spectrum", default="auto",
                   choices=("auto", "exact_enum", "dual_macwilliams", "binomial_approx", "ideal"))


def _add_coupling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=int, default=1025)
    p.add_argument("--w", type=int, default=16)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None,
                   help="iteration budget (default 7500 finite-n, 10000 scaled)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hddthresh", description="Iterative HDD thresholds for BCH-based GLDPC ensembles")
    ap.add_argument("--version", action="version", version=f"hddthresh {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("threshold", help="finite-n DE threshold (coupled by default)")
    _add_code(p)
    _add_coupling(p)
    p.add_argument("--uncoupled", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("scaled-threshold", help="high-rate limit threshold rho*")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--variant", default="plain",
                   choices=("plain", "even", "even_t_even", "even_t_odd", "none", "no_miscorrection"))
    _add_coupling(p)
    _add_common(p)
    p.set_defaults(func=cmd_scaled_threshold)

    p = sub.add_parser("potential", help="potential threshold and a U curve (scaled unless --n)")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--param", type=float, default=None, help="p or rho for the emitted curve")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--tol", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("de-trace", help="record a DE run position by position")
    _add_code(p)
    _add_coupling(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--variant", default="plain")
    p.add_argument("--record-every", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_de_trace)

    p = sub.add_parser("table1", help="recompute the threshold table beside the published values")
    p.add_argument("--full", action="store_true", help="include n = 511 and 1023 rows (slow)")
    p.add_argument("--tolerance", type=float, default=None, help="override per-cell tolerances")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("capacity", help="redundancy ratio sweep over nu")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--nu", dest="nu_range", default="8..20")
    p.add_argument("--rho-star", type=float, default=None, help="measured scaled threshold; default 2t")
    p.add_argument("--even-subcode", action="store_true")
    p.add_argument("--eps", type=float, nargs="*", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_capacity, fmt="csv")

    p = sub.add_parser("simulate", help="Monte Carlo run of the message-passing decoder")
    _add_code(p, nu=5)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--p", type=float, required=False, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--coupled", action="store_true")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--engine", choices=("table", "reference"), default="table")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("empirical-pq", help="Monte Carlo P(i), Q(i) against the analytic table")
    _add_code(p, nu=5)
    p.add_argument("--i", type=int, nargs="+", default=[3, 5, 8])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_empirical_pq)
    return ap


def _apply_config_file(ap: argparse.ArgumentParser, argv: list[str], ns: argparse.Namespace) -> argparse.Namespace:
    raw = json.loads(Path(ns.config).read_text())
    cfg = raw.get("config", raw)
    if cfg.get("command") not in (None, ns.command):
        raise ConfigurationError(f"config is for {cfg.get('command')!r}, not {ns.command!r}")
    flat = {k: v for k, v in cfg.items() if k not in ("options", "command")}
    flat.update(cfg.get("options", {}))
    subparser = ap._subparsers._group_actions[0].choices[ns.command]  # noqa: SLF001
    subparser.set_defaults(**flat)
    return ap.parse_args(argv)


def run(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if ns.config:
            ns = _apply_config_file(ap, argv, ns)
        global _QUIET
        _QUIET = bool(ns.quiet)
        cfg = RunConfig.from_namespace(ns)
        return ns.func(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalConsistencyError as exc:
        print(f"numerical consistency error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
