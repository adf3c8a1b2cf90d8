"""Command-line front end.

Parses mechanism grammar strings and experiment parameters, dispatches
to the library, and emits machine-readable reports (JSON or CSV, every
float carrying 12 significant digits).  Exit codes: 0 success, 1 for
domain or parse errors (diagnostic on stderr), 2 for an honest
Inconclusive classification, so harnesses can tell "cannot decide"
from "wrong".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .classify import INCONCLUSIVE_CLASS, TRIVIAL_POINT, classify_zero_state
from .cutout import sample_cutout, statistics
from .flow import FlowError, solver
from .mechanisms import (
    EvaluationError,
    parse_branching,
    parse_immigration,
    parse_mechanism,
)
from .ou import ou_classify, pushforward_ks, sample_ou_cutout
from .zeroset import gzero_density, laplace_exponent

__all__ = ["ExperimentConfig", "build_parser", "main", "parse_mechanism",
           "run"]

REPORT_DIR_ENV = "CBIZERO_REPORT_DIR"
STOCHASTIC_COMMANDS = frozenset({"simulate", "ou"})
PUSHFORWARD_POINTS = 10_000

_DEFAULT_FORMAT = {"classify": "json", "vflow": "csv", "laplace": "csv",
                   "gzero": "csv", "simulate": "csv", "ou": "json"}


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved CLI invocation."""

    command: str
    psi_spec: Optional[str] = None
    phi_spec: Optional[str] = None
    T: Optional[float] = None
    eps: Optional[float] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    alpha: Optional[float] = None
    qs: Tuple[float, ...] = ()
    ts: Tuple[float, ...] = ()
    lam: float = 1.0
    numeric_only: bool = False
    dump_intervals: bool = False
    out: Optional[str] = None
    fmt: str = "json"

    def validate(self) -> "ExperimentConfig":
        if self.command in STOCHASTIC_COMMANDS:
            if self.seed is None:
                raise ValueError("seed is mandatory for stochastic commands")
            if self.reps is None or self.reps < 1:
                raise ValueError("reps must be at least 1")
            if self.T is None or not self.T > 0.0:
                raise ValueError("horizon T must be positive")
            if self.eps is None or not 0.0 < self.eps <= self.T / 10.0:
                raise ValueError("eps must lie in (0, T/10]")
        return self


# --- output plumbing ------------------------------------------------------

def _roundtrip(value: float):
    # 12 significant digits; JSON has no inf/nan so spell them out
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(f"{value:.12g}")


def _jsonable(obj):
    if isinstance(obj, (float, np.floating)):
        return _roundtrip(float(obj))
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _json_text(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        v = _roundtrip(float(value))
        return v if isinstance(v, str) else f"{v:.12g}"
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(_jsonable(value), separators=(",", ":"))
    return str(value)


def _table_text(rows: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        return _json_text(list(rows))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow([_cell(v) for v in row.values()])
    return buf.getvalue()


def _report_text(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return _json_text(payload)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("key", "value"))
    for key, value in payload.items():
        writer.writerow((key, _cell(value)))
    return buf.getvalue()


def _resolve_out(out: str) -> Path:
    path = Path(out)
    if not path.is_absolute():
        path = Path(os.environ.get(REPORT_DIR_ENV, ".")) / path
    return path


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _emit(text: str, config: ExperimentConfig) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        _write(_resolve_out(config.out), text)


# --- command handlers -----------------------------------------------------

def _run_classify(config: ExperimentConfig) -> int:
    psi = parse_branching(config.psi_spec)
    phi = parse_immigration(config.phi_spec)
    report = classify_zero_state(psi, phi,
                                 numeric_only=config.numeric_only).as_dict()
    _emit(_report_text(report, config.fmt), config)
    return 2 if report["zero_class"] == INCONCLUSIVE_CLASS else 0


def _run_vflow(config: ExperimentConfig) -> int:
    flow = solver(parse_branching(config.psi_spec))
    rows = [{"t": t, "v_t": flow.v_from_infinity(t),
             "v_t_lambda": flow.v_from_lambda(t, config.lam)}
            for t in config.ts]
    _emit(_table_text(rows, config.fmt), config)
    return 0


def _run_laplace(config: ExperimentConfig) -> int:
    psi = parse_branching(config.psi_spec)
    phi = parse_immigration(config.phi_spec)
    rows = [{"q": q, "L": laplace_exponent(psi, phi, q)} for q in config.qs]
    _emit(_table_text(rows, config.fmt), config)
    return 0


def _run_gzero(config: ExperimentConfig) -> int:
    psi = parse_branching(config.psi_spec)
    phi = parse_immigration(config.phi_spec)
    rows = [{"t": t, "density": gzero_density(psi, phi, t)}
            for t in config.ts]
    _emit(_table_text(rows, config.fmt), config)
    return 0


def _dimension_grid(T: float, eps: float) -> list:
    """Every decade the realization supports: T/10 down to eps."""
    grid = [T / 10.0]
    while grid[-1] / 10.0 >= eps * (1.0 - 1e-12):
        grid.append(grid[-1] / 10.0)
    if len(grid) < 2:
        grid.insert(0, T / 5.0)
    return grid


def _run_simulate(config: ExperimentConfig) -> int:
    psi = parse_branching(config.psi_spec)
    phi = parse_immigration(config.phi_spec)
    grid = _dimension_grid(config.T, config.eps)
    rows = []
    first = None
    for i in range(config.reps):
        rep_seed = config.seed + i
        uncovered = sample_cutout(psi, phi, config.T, config.eps, rep_seed)
        if first is None:
            first = uncovered
        stats = statistics(uncovered, grid)
        rows.append({"seed": rep_seed, "lebesgue": stats["lebesgue"],
                     "g_last": stats["g_last"],
                     "dim_fit": stats["dim_fit"]["slope"]})
    out_path = _resolve_out(config.out)
    _write(out_path, _table_text(rows, "csv"))

    slopes = [row["dim_fit"] for row in rows]
    summary = {
        "psi": config.psi_spec, "phi": config.phi_spec,
        "T": config.T, "eps": config.eps,
        "reps": config.reps, "seed": config.seed,
        "grid_sizes": grid,
        "lebesgue_mean": float(np.mean([r["lebesgue"] for r in rows])),
        "g_last_mean": float(np.mean([r["g_last"] for r in rows])),
        "dim_fit_mean": float(np.mean(slopes)),
        "dim_fit_sd": float(np.std(slopes)),
    }
    _write(out_path.with_suffix(".summary.json"), _json_text(summary))
    if config.dump_intervals:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("start", "end"))
        for lo, hi in first.intervals:
            writer.writerow((_cell(float(lo)), _cell(float(hi))))
        _write(out_path.with_suffix(".intervals.csv"), buf.getvalue())
    return 0


def _run_ou(config: ExperimentConfig) -> int:
    classification = ou_classify(config.alpha)
    if classification.zero_class == TRIVIAL_POINT:
        payload = {"class": classification.zero_class,
                   "dim_theory": classification.dim,
                   "dim_fit": None, "ks_pushforward": None}
    else:
        grid = _dimension_grid(config.T, config.eps)
        slopes = [
            statistics(sample_ou_cutout(config.alpha, config.T, config.eps,
                                        config.seed + i),
                       grid)["dim_fit"]["slope"]
            for i in range(config.reps)
        ]
        payload = {"class": classification.zero_class,
                   "dim_theory": classification.dim,
                   "dim_fit": float(np.mean(slopes)),
                   "ks_pushforward": pushforward_ks(
                       config.alpha, config.eps, PUSHFORWARD_POINTS,
                       config.seed)}
    _emit(_report_text(payload, config.fmt), config)
    return 0


_HANDLERS = {"classify": _run_classify, "vflow": _run_vflow,
             "laplace": _run_laplace, "gzero": _run_gzero,
             "simulate": _run_simulate, "ou": _run_ou}


def run(config: ExperimentConfig) -> int:
    """Execute one validated invocation; returns the exit code."""
    config.validate()
    return _HANDLERS[config.command](config)


# --- argument parsing -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits with code 2 on usage errors, which this tool
        # reserves for honest Inconclusive verdicts; remap to 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"not a comma-separated list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _add_pair(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--psi", required=True,
                     help="branching mechanism, e.g. stable:d=1,alpha=2")
    sub.add_argument("--phi", required=True,
                     help="immigration mechanism, e.g. gamma:a=1,b=1")


def _add_output(sub: argparse.ArgumentParser, default_fmt: str) -> None:
    sub.add_argument("--format", choices=("json", "csv"),
                     default=default_fmt, help="report format")
    sub.add_argument("--out", default=None,
                     help="report path; relative paths land in "
                          f"${REPORT_DIR_ENV} (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbizero",
                     description="Classify and simulate CBI zero sets.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("classify", help="zero-set trichotomy for a pair")
    _add_pair(p)
    p.add_argument("--numeric-only", action="store_true",
                   help="skip the regular-variation fast path")
    _add_output(p, "json")

    p = sub.add_parser("vflow", help="flow tables (t, v_t, v_t(lambda))")
    p.add_argument("--psi", required=True)
    p.add_argument("--t", required=True, type=_float_list,
                   help="comma-separated times")
    p.add_argument("--lam", type=float, default=1.0,
                   help="initial value for the v_t(lambda) column")
    _add_output(p, "csv")

    p = sub.add_parser("laplace", help="subordinator Laplace exponent L(q)")
    _add_pair(p)
    p.add_argument("--q", required=True, type=_float_list,
                   help="comma-separated arguments")
    _add_output(p, "csv")

    p = sub.add_parser("gzero", help="density of the last zero")
    _add_pair(p)
    p.add_argument("--t", required=True, type=_float_list,
                   help="comma-separated times")
    _add_output(p, "csv")

    p = sub.add_parser("simulate", help="cutout replicates on [0, T]")
    _add_pair(p)
    p.add_argument("--T", required=True, type=float)
    p.add_argument("--eps", required=True, type=float,
                   help="duration truncation, in (0, T/10]")
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True,
                   help="replicate CSV path; the JSON summary lands next "
                        "to it")
    p.add_argument("--dump-intervals", action="store_true",
                   help="also write replicate 0's uncovered intervals")

    p = sub.add_parser("ou", help="stable OU zero set")
    p.add_argument("--alpha", required=True, type=float)
    p.add_argument("--T", required=True, type=float)
    p.add_argument("--eps", required=True, type=float)
    p.add_argument("--reps", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    _add_output(p, "json")

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=args.command,
        psi_spec=getattr(args, "psi", None),
        phi_spec=getattr(args, "phi", None),
        T=getattr(args, "T", None),
        eps=getattr(args, "eps", None),
        reps=getattr(args, "reps", None),
        seed=getattr(args, "seed", None),
        alpha=getattr(args, "alpha", None),
        qs=tuple(getattr(args, "q", ()) or ()),
        ts=tuple(getattr(args, "t", ()) or ()),
        lam=getattr(args, "lam", 1.0),
        numeric_only=getattr(args, "numeric_only", False),
        dump_intervals=getattr(args, "dump_intervals", False),
        out=getattr(args, "out", None),
        fmt=getattr(args, "format", None) or _DEFAULT_FORMAT[args.command],
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(_config_from_args(args))
    except (ValueError, FlowError, EvaluationError) as exc:
        print(f"cbizero: error: {exc}", file=sys.stderr)
        return 1
