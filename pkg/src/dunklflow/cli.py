"""Command-line driver: ``dunklflow {selftest,linear,moment-rate,nonlinear}``.

Exit codes: 0 when every verdict passes, 1 when an experiment fails or its
data violate a hypothesis (zero mass), 2 for usage and configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path

from . import __version__
from .asymptotics import linear_error_curve, moment_rate_check, scaled_pair, scaling_exponent
from .checks import run_selftest
from .config import ConfigError, ExperimentConfig, format_exponent
from .core import make_grid
from .errors import DomainError, TruncationError
from .nonlinear import (MassKind, NonlinearProblem, asymptotic_mass, comparison_check, evolve,
                        nonlinear_error_curve)
from .presets import make_preset, preset_grid

ENV_OUT = "DUNKLFLOW_OUT"
CSV_COLUMNS = ("experiment", "alpha", "p_or_q", "t", "raw_error", "scaled_error", "extra")


class ExperimentFailure(RuntimeError):
    """The experiment ran but its data or verdicts rule out a pass."""


# --------------------------------------------------------------------------
# output


def _num(x) -> str:
    if x is None or x == "":
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for exp, alpha, pq, t, raw, scaled, extra in rows:
        writer.writerow([exp, _num(alpha), _num(pq), _num(t), _num(raw), _num(scaled), _num(extra)])
    return buf.getvalue()


def report_text(command: str, config: ExperimentConfig, body: dict) -> str:
    doc = {"command": command, "version": __version__, "config": config.resolved()}
    doc.update(body)
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def output_dir(arg: str | None, config: ExperimentConfig) -> Path:
    return Path(arg or config.output_dir or os.environ.get(ENV_OUT) or "results")


# --------------------------------------------------------------------------
# commands; each returns (passed, csv rows or None, report body)


def _grid(config: ExperimentConfig):
    cfg = config.reflection
    if config.grid_L is None:
        return preset_grid(cfg)
    return make_grid(cfg, L=config.grid_L, n=config.grid_n)


def cmd_selftest(config: ExperimentConfig, threads: int):
    results = run_selftest(config.reflection, L=config.grid_L, n=config.grid_n)
    failed = [r.name for r in results if not r.passed]
    body = {"passed": not failed, "failures": failed, "checks": [r.to_dict() for r in results]}
    return not failed, None, body


def cmd_linear(config: ExperimentConfig, threads: int):
    cfg = config.reflection
    u0 = make_preset(config.u0_preset, cfg, _grid(config))
    mass = float(u0.integral().real)
    if abs(mass) <= 1e-10:
        raise ExperimentFailure(
            f"u0.preset {config.u0_preset!r} has zero mass; the limit profile M h_t needs M != 0")
    times = config.times
    combos = list(product(config.alpha, config.p))

    def run(ap):
        alpha, p = ap
        return linear_error_curve(cfg, u0, alpha, p, times, pair=scaled_pair(cfg, alpha))

    # the shared grids are built once per alpha before fanning out
    for alpha in config.alpha:
        scaled_pair(cfg, alpha)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        curves = list(pool.map(run, combos))

    rows, verdicts = [], []
    for (alpha, p), c in zip(combos, curves):
        rows += [("linear", alpha, p, t, r, s, mass) for t, r, s in zip(c.t, c.raw, c.scaled)]
        verdicts.append({"alpha": alpha, "p": p, "exponent": c.exponent, "decade_ratio": c.decade_ratio,
                         "final_scaled": float(c.scaled[-1]), "decreasing_by_decade": c.decreasing_by_decade(),
                         "pass": c.decade_decay()})
    failed = [f"alpha={v['alpha']:g} p={format_exponent(v['p'])}" for v in verdicts if not v["pass"]]
    return not failed, rows, {"passed": not failed, "failures": failed, "mass": mass, "verdicts": verdicts}


def cmd_moment_rate(config: ExperimentConfig, threads: int):
    cfg = config.reflection
    times = config.times
    if times.size < 4:
        raise ConfigError(f"t.count / t.values: the rate fit needs at least 4 times, got {times.size}")
    f = make_preset(config.u0_preset, cfg, _grid(config))
    rep = moment_rate_check(cfg, f, times, threads)
    e_sup = scaling_exponent(cfg, 1.0, math.inf)
    rows = [("moment-rate", 1.0, 1.0, t, r, r, q) for t, r, q in zip(rep.t, rep.l1_error, rep.ratio_l1)]
    rows += [("moment-rate", 1.0, math.inf, t, s * t ** -e_sup, s, q)
             for t, s, q in zip(rep.t, rep.sup_scaled, rep.ratio_sup)]
    passed = rep.slopes_within()
    body = {"passed": passed, "failures": [] if passed else ["slope"], "n1": rep.n1, "slope_l1": rep.slope_l1, "slope_sup": rep.slope_sup,
            "constant_l1": rep.constant_l1, "constant_sup": rep.constant_sup}
    return passed, rows, body


def nonlinear_problem(config: ExperimentConfig, t_end: float | None = None, dt: float | None = None,
                      dt_rel: float | None = None) -> NonlinearProblem:
    cfg = config.reflection
    alpha, p = config.nonlinear_alpha, config.nonlinear_p
    threshold = 1.0 + 2.0 * alpha / cfg.d_k
    if not p > threshold:
        raise ConfigError(f"nonlinear.p: p = {p:g} must exceed 1 + 2 alpha / d_k = {threshold:.6g} "
                          "for the mass limit to be positive")
    u0 = make_preset(config.nonlinear_preset, cfg, _grid(config))
    if float(u0.values.min()) < 0.0:
        raise ConfigError(f"nonlinear.preset: {config.nonlinear_preset!r} takes negative values; "
                          "the absorbing equation needs u0 >= 0")
    try:
        return NonlinearProblem(cfg, alpha, p, u0,
                                t_end=config.nonlinear_t_end if t_end is None else t_end,
                                dt=config.nonlinear_dt if dt is None else dt,
                                q=config.q,
                                dt_rel=config.nonlinear_dt_rel if dt_rel is None else dt_rel)
    except DomainError as exc:
        raise ConfigError(f"nonlinear: {exc}") from None


def order_check(config: ExperimentConfig) -> dict:
    """Mass-identity residual at dt and dt/2 on a short fixed-step run."""
    T, dt = config.nonlinear_order_check, config.nonlinear_dt
    res = [float(evolve(nonlinear_problem(config, T, h, 0.0)).residual.max()) for h in (dt, 0.5 * dt)]
    return {"t_end": T, "dt": dt, "residual_dt": res[0], "residual_half_dt": res[1],
            "ratio": res[0] / res[1] if res[1] > 0 else math.inf}


def cmd_nonlinear(config: ExperimentConfig, threads: int):
    problem = nonlinear_problem(config)
    with ThreadPoolExecutor(max_workers=2 if threads > 1 else 1) as pool:
        fut_order = pool.submit(order_check, config) if config.nonlinear_order_check > 0 else None
        trace = evolve(problem)
        order = fut_order.result() if fut_order else None
    est = asymptotic_mass(trace)
    comp = comparison_check(trace, problem)
    stamps = {round(s.t, 12) for s in trace.snapshots}
    rows = [("mass", problem.alpha, problem.p, t, m, r, l)
            for t, m, r, l in zip(trace.times, trace.mass, trace.residual, trace.loss) if round(t, 12) in stamps]
    curves = []
    if est.kind is MassKind.CONCLUSIVE and est.value > 0:
        for q in problem.q:
            c = nonlinear_error_curve(trace, problem, q, est.value)
            rows += [("nonlinear", problem.alpha, q, t, r, s, est.value) for t, r, s in zip(c.t, c.raw, c.scaled)]
            curves.append({"q": q, "exponent": c.exponent, "decade_ratio": c.decade_ratio,
                           "decreasing_by_decade": c.decreasing_by_decade()})
    verdicts = {
        "mass_positive": est.kind is MassKind.CONCLUSIVE and est.value > 0,
        "error_bar_within_5_percent": est.relative_error <= 0.05,
        "mass_nonincreasing": trace.mass_nonincreasing,
        "residual_below_1e-4": float(trace.residual.max()) <= 1e-4,
        "comparison": comp.holds,
        "q_curves_decrease": bool(curves) and all(c["decreasing_by_decade"] for c in curves),
    }
    if order is not None:
        verdicts["order_ratio_near_4"] = 3.0 <= order["ratio"] <= 5.0
    failed = [k for k, v in verdicts.items() if not v]
    passed = not failed
    body = {
        "passed": passed, "failures": failed, "verdicts": verdicts,
        "m_inf": {"kind": est.kind.value, "value": est.value, "error_bar": est.error_bar,
                  "relative_error": est.relative_error, "tail": est.tail, "decay": est.decay, "reason": est.reason},
        "initial_mass": trace.initial_mass, "steps": int(trace.times.size - 1),
        "residual_max": float(trace.residual.max()), "min_relative": trace.min_relative,
        "comparison_max_excess": max(comp.excess) if comp.excess else None,
        "order_check": order, "curves": curves,
    }
    return passed, rows, body


COMMANDS = {
    "selftest": cmd_selftest,
    "linear": cmd_linear,
    "moment-rate": cmd_moment_rate,
    "nonlinear": cmd_nonlinear,
}


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunklflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value config file (defaults are used when omitted)")
        sp.add_argument("--out", help=f"output directory (default: output.dir, ${ENV_OUT}, ./results)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stem = args.command.replace("-", "_")
    try:
        if args.threads < 1:
            raise ConfigError("--threads: must be at least 1")
        config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
        config.reflection
        passed, rows, body = COMMANDS[args.command](config, args.threads)
    except ConfigError as exc:
        print(f"dunklflow: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ExperimentFailure, DomainError, TruncationError) as exc:
        print(f"dunklflow {args.command}: failed: {exc}", file=sys.stderr)
        return 1

    out = output_dir(args.out, config)
    if rows is not None:
        write_atomic(out / f"{stem}.csv", csv_text(rows))
    write_atomic(out / f"{stem}.json", report_text(args.command, config, body))
    if passed:
        print(f"dunklflow {args.command}: pass ({out})")
        return 0
    print(f"dunklflow {args.command}: FAIL {', '.join(body['failures'])} ({out})", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
