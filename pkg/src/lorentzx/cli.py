"""Command line: ``lorentzx run|sweep|norm|rearrange``.

Reports go to the directory named by ``LORENTZX_OUT`` (else ``[output] dir``,
else ``./lorentzx-out``). Every CSV starts with a comment line carrying the
package version and a hash of the config text; nothing else varies between
runs, so identical configs give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .ergodic import (ArcSet, FlowSpec, distribution_check, ergodic_boundedness_experiment,
                      ergodic_maximal_star_check, star_bound_check)
from .exponent import parse_exponent
from .grid import Partition, StepFunction, read_csv, rearrange, write_csv
from .hardy import HardySpec, estimate_operator_norm
from .norms import NormSpec, lorentz_norm, luxemburg_norm
from .operators import OperatorSpec, boundedness_experiment

__all__ = ["main", "run_config", "sweep_config", "output_dir"]

MODULES = ("exponent", "grid", "norms", "hardy", "operators", "ergodic", "cli")
MAXIMAL_STAR_TOLERANCE = 0.02  # midpoint sampling of M f; shrinks like 1/refine


def output_dir(cfg: ExperimentConfig | None = None) -> Path:
    env = os.environ.get("LORENTZX_OUT")
    if env:
        return Path(env)
    if cfg is not None and cfg.get("output", "dir"):
        return Path(cfg.get("output", "dir"))
    return Path("lorentzx-out")


def _header(cfg: ExperimentConfig) -> str:
    mods = ",".join(f"{m}={__version__}" for m in MODULES)
    return f"lorentzx {__version__} config-sha256={cfg.digest} modules={mods}"


def _rows_csv(header: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _arcs(cfg: ExperimentConfig) -> ArcSet:
    raw = cfg.get("flow", "arcs", "0:0.3")
    try:
        pairs = [tuple(float(x) for x in part.split(":")) for part in raw.split(",") if part.strip()]
        return ArcSet(tuple(pairs))
    except ValueError as exc:
        raise ConfigError(f"[flow] arcs: {exc}", cfg.line("flow", "arcs")) from None


def _input_function(cfg: ExperimentConfig) -> StepFunction:
    path = cfg.get("input", "f")
    if path is None:
        raise ConfigError("[input] f is required", cfg.line("input") or cfg.line("experiment", "kind"))
    try:
        return read_csv(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"[input] f: {exc}", cfg.line("input", "f")) from None


def _norm_spec(cfg: ExperimentConfig) -> NormSpec:
    p = cfg.exponent("p", 2.0)
    q = cfg.exponent("q") or p
    return NormSpec(p, q, cfg.exponent("gamma"))


def _evaluate(cfg: ExperimentConfig):
    """Run one (non-sweep) experiment: (outcome, csv text, sup_ratio)."""
    kind = cfg.kind if cfg.kind != "sweep" else cfg.get("experiment", "base")
    header = _header(cfg)
    if kind == "hardy-verify":
        g = cfg.grid()
        p = cfg.exponent("p", 2.0)
        spec = HardySpec(p, cfg.exponent("q") or p,
                         alpha=cfg.exponent("alpha", 0.0), beta=cfg.exponent("beta", 0.0),
                         nu=cfg.exponent("nu", 0.0),
                         direction=cfg.get("exponents", "direction", "lower"))
        rep = estimate_operator_norm(spec, cfg.family(), g, cfg.protocol())
        return rep.verdict, rep.to_csv(header), rep.sup_ratio
    if kind == "op-verify":
        cfg_grid = cfg.grid(default_cells=96, default_length=1.0)
        if math.isinf(cfg_grid.domain_length):
            raise ConfigError("op-verify runs on a finite interval", cfg.line("grid", "domain_length"))
        op_kind = cfg.get("operator", "kind", "maximal")
        kernel = None
        if cfg.get("operator", "kernel"):
            kernel = read_csv(cfg.get("operator", "kernel"))
        try:
            op = OperatorSpec(op_kind, cfg.number("operator", "alpha"), kernel)
        except ValueError as exc:
            raise ConfigError(str(exc), cfg.line("operator")) from None
        rep = boundedness_experiment(op, _norm_spec(cfg), cfg.family(), cfg_grid, cfg.protocol())
        return rep.verdict, rep.to_csv(header), rep.sup_ratio
    if kind == "ergodic-verify":
        flow = FlowSpec(cfg.get("flow", "kind", "rotation"))
        check = cfg.get("flow", "check", "boundedness")
        points = int(cfg.number("flow", "points", 100_000))
        if check == "boundedness":
            g = cfg.grid(default_cells=96, default_length=1.0)
            rep = ergodic_boundedness_experiment(_norm_spec(cfg), flow, cfg.family(), g, cfg.protocol(),
                                                 operator=cfg.get("flow", "operator", "maximal"))
            return rep.verdict, rep.to_csv(header), rep.sup_ratio
        E = _arcs(cfg)
        if check == "distribution":
            rep = distribution_check(E, flow, points=points)
            ok = rep.sup_error <= 0.01
            text = _rows_csv(header, ["lambda", "empirical", "formula", "abs_error"], rep.rows())
            return ("holds" if ok else "fails"), text, rep.sup_error
        if check == "star":
            rep = star_bound_check(E, flow, points=points)
            text = _rows_csv(header, ["t", "lhs", "bound", "exact"], rep.rows())
            return ("holds" if rep.holds else "fails"), text, rep.max_ratio
        if check == "maximal-star":
            if flow.kind == "rotation":
                bp = np.unique(np.concatenate([[0.0, 1.0], E.endpoints]))
            else:
                bp = np.unique(E.endpoints)
            part = Partition(bp)
            f = StepFunction.indicator(part, *E.intervals[0]) if len(E.intervals) == 1 else \
                StepFunction(part, np.array([float(any(a <= m < b for a, b in E.intervals)) for m in part.midpoints]))
            rep = ergodic_maximal_star_check(f, flow)
            ok = rep.measured_constant <= 1.0 + MAXIMAL_STAR_TOLERANCE
            text = _rows_csv(header, ["t", "lhs", "rhs"], zip(rep.t, rep.lhs, rep.rhs))
            return ("holds" if ok else "fails"), text, rep.measured_constant
        raise ConfigError(f"unknown ergodic check {check!r}", cfg.line("flow", "check"))
    if kind == "norm":
        f = _input_function(cfg)
        star = cfg.get("input", "star", "false").lower() in ("1", "true", "yes")
        if cfg.get("exponents", "q") is None and cfg.get("exponents", "gamma") is None and not star:
            val = luxemburg_norm(f, cfg.exponent("p", 2.0))
        else:
            val = lorentz_norm(f, _norm_spec(cfg).star(star))
        return "none", _rows_csv(header, ["quantity", "value"], [("norm", val)]), val
    if kind == "rearrange":
        fs = rearrange(_input_function(cfg))
        return "none", write_csv(fs, header=header), math.nan
    raise ConfigError(f"cannot run kind {kind!r}", cfg.line("experiment", "kind"))


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _matches(expected: str, outcome: str) -> bool:
    return expected == "none" or expected == outcome


def run_config(cfg: ExperimentConfig, out: Path | None = None) -> int:
    """Run and write reports; 0 iff the outcome matches ``expected``."""
    if cfg.swept() is not None:
        return sweep_config(cfg, out)
    out = out or output_dir(cfg)
    prefix = cfg.get("output", "prefix", "")
    outcome, text, sup = _evaluate(cfg)
    _write(out / f"{prefix}{cfg.label}.csv", text)
    ok = _matches(cfg.expected, outcome)
    summary = _rows_csv(_header(cfg), ["label", "kind", "value", "outcome", "expected", "match"],
                        [(cfg.label, cfg.kind, sup, outcome, cfg.expected, "yes" if ok else "no")])
    _write(out / f"{prefix}{cfg.label}-summary.csv", summary)
    if not ok:
        print(f"expectation mismatch for {cfg.label}:\n- expected: {cfg.expected}\n+ got:      {outcome}",
              file=sys.stderr)
    return 0 if ok else 1


_ORDER = {"bounded": 0, "inconclusive": 1, "blow-up": 2}


def _flip_once(outcomes) -> bool:
    """bounded ... [inconclusive ...] blow-up ..., both ends present.

    Near a threshold the constants grow without bound, so a band of
    inconclusive verdicts between the two regimes is allowed.
    """
    if any(o not in _ORDER for o in outcomes):
        return False
    ranks = [_ORDER[o] for o in outcomes]
    if ranks[-1] < ranks[0]:
        ranks = ranks[::-1]
    monotone = all(b >= a for a, b in zip(ranks, ranks[1:]))
    return monotone and ranks[0] == 0 and ranks[-1] == 2


def flip_location(values, outcomes):
    """(last bounded value, first blow-up value) of a monotone sweep."""
    last_b = [v for v, o in zip(values, outcomes) if o == "bounded"]
    first_u = [v for v, o in zip(values, outcomes) if o == "blow-up"]
    return (last_b[-1] if last_b else None, first_u[0] if first_u else None)


def sweep_config(cfg: ExperimentConfig, out: Path | None = None) -> int:
    """One row per swept value with sup_ratio and outcome."""
    swept = cfg.swept()
    if swept is None:
        raise ConfigError("sweep needs a [sweep] section", cfg.line("experiment"))
    (section, key), values = swept
    out = out or output_dir(cfg)
    prefix = cfg.get("output", "prefix", "")
    rows, outcomes = [], []
    for v in values:
        sub = cfg.with_value(section, key, v)
        outcome, _, sup = _evaluate(sub)
        rows.append((v, sup, outcome))
        outcomes.append(outcome)
    _write(out / f"{prefix}{cfg.label}.csv", _rows_csv(_header(cfg), [f"{section}.{key}", "sup_ratio", "verdict"], rows))
    if cfg.expected == "flip":
        ok = _flip_once(outcomes)
    else:
        ok = all(_matches(cfg.expected, o) for o in outcomes)
    summary = _rows_csv(_header(cfg), ["label", "kind", "points", "outcomes", "expected", "match"],
                        [(cfg.label, "sweep", len(values), " ".join(outcomes), cfg.expected, "yes" if ok else "no")])
    _write(out / f"{prefix}{cfg.label}-summary.csv", summary)
    if not ok:
        print(f"expectation mismatch for sweep {cfg.label}:\n- expected: {cfg.expected}\n+ got:      "
              + " ".join(outcomes), file=sys.stderr)
    return 0 if ok else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lorentzx", description="Variable-exponent Lorentz space experiments.")
    ap.add_argument("--version", action="version", version=f"lorentzx {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config")
    s = sub.add_parser("sweep", help="run a config with one swept parameter")
    s.add_argument("config")
    n = sub.add_parser("norm", help="norm of a step function given as CSV")
    n.add_argument("--f", required=True, help="step-function CSV (t_left,t_right,value)")
    n.add_argument("--p", required=True, help="exponent block or number")
    n.add_argument("--q", help="second exponent (Lorentz norm)")
    n.add_argument("--gamma", help="weight exponent")
    n.add_argument("--star", action="store_true", help="use f** instead of f*")
    a = sub.add_parser("rearrange", help="print f* of a step-function CSV")
    a.add_argument("--f", required=True)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run_config(load_config(args.config))
        if args.command == "sweep":
            cfg = load_config(args.config)
            if cfg.swept() is None:
                raise ConfigError("sweep needs a [sweep] section")
            return sweep_config(cfg)
        if args.command == "norm":
            f = read_csv(args.f)
            p = parse_exponent(args.p)
            if args.q is None and args.gamma is None and not args.star:
                val = luxemburg_norm(f, p)
            else:
                q = parse_exponent(args.q) if args.q else p
                g = parse_exponent(args.gamma) if args.gamma else None
                val = lorentz_norm(f, NormSpec(p, q, g, args.star))
            print(repr(float(val)))
            return 0
        if args.command == "rearrange":
            sys.stdout.write(write_csv(rearrange(read_csv(args.f))))
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
