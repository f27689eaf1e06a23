"""Command-line exports of entropy surfaces, flows, geodesics, fits and
prime-gap tables.

Exit codes: 0 success, 2 invalid configuration, 3 non-finite value,
4 unsupported family, 5 degenerate data, 6 resource limit.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gamma, mckay, primes, weibull
from .errors import (DegenerateSampleError, DomainError, NoInteriorMaximumError,
                     NonFiniteValueError, ResourceLimitError)
from .geometry import GridField, MetricField, Trajectory, geodesic_shoot, gradient_flow, grid_eval

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONFINITE = 3
EXIT_UNSUPPORTED = 4
EXIT_DEGENERATE = 5
EXIT_RESOURCE = 6

FAMILIES = ("gamma", "mckay-m1", "mckay-rho", "weibull")


class ConfigError(Exception):
    pass


class UnsupportedError(Exception):
    pass


@dataclass(frozen=True)
class Family:
    name: str
    x_label: str
    y_label: str
    entropy: Callable[[float, float], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    bounds: tuple
    metric: Callable[[], MetricField] | None = None


def _gamma_family():
    return Family(
        "gamma", "mu", "kappa",
        lambda x, y: gamma.gamma_entropy(gamma.GammaParams(x, y)),
        lambda q: gamma.gamma_entropy_gradient(gamma.GammaParams(q[0], q[1])),
        ((1e-8, 1e8), (1e-8, 1e8)), gamma.gamma_metric_field)


def _m1_family():
    return Family(
        "mckay-m1", "c", "alpha2",
        lambda x, y: mckay.m1_entropy(mckay.M1Point(x, y)),
        lambda q: mckay.m1_entropy_gradient(mckay.M1Point(q[0], q[1])),
        ((1e-8, 1e8), (1e-8, 1e8)), mckay.m1_metric_field)


def _rho_family():
    return Family(
        "mckay-rho", "alpha2", "rho",
        mckay.m1_entropy_rho,
        lambda q: mckay.m1_entropy_rho_gradient(q[0], q[1]),
        ((1e-8, 1e8), (1e-8, 1.0)))


def _weibull_family():
    return Family(
        "weibull", "xi", "beta",
        lambda x, y: weibull.weibull_entropy(weibull.WeibullParams(x, y)),
        lambda q: weibull.weibull_entropy_gradient(weibull.WeibullParams(q[0], q[1])),
        ((1e-8, 1e8), (1e-8, 1e8)))


_FAMILY_FACTORIES = {
    "gamma": _gamma_family,
    "mckay-m1": _m1_family,
    "mckay-rho": _rho_family,
    "weibull": _weibull_family,
}


def get_family(name: str) -> Family:
    try:
        return _FAMILY_FACTORIES[name]()
    except KeyError:
        raise ConfigError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def parse_range(text: str) -> tuple[float, float, int]:
    """Parse ``lo:hi:count`` (inclusive endpoints)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} must look like lo:hi:count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"range {text!r} has a non-numeric field")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ConfigError(f"range {text!r} needs lo < hi")
    if n < 2:
        raise ConfigError(f"range {text!r} needs count >= 2")
    return lo, hi, n


def parse_pair(text: str) -> np.ndarray:
    parts = text.split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"point {text!r} must be two comma-separated numbers")
    if len(vals) != 2 or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"point {text!r} must be two comma-separated numbers")
    return np.array(vals)


def _positive(name: str, v: float) -> float:
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(f"--{name} must be positive, got {v!r}")
    return v


def _f6(v: float) -> str:
    return f"{v:.6f}"


def _f9(v: float) -> str:
    return f"{v:.9f}"


# --- serializers -----------------------------------------------------------

def grid_to_csv(grid: GridField) -> str:
    out = io.StringIO()
    out.write(f"{grid.y_label}\\{grid.x_label}," + ",".join(_f9(x) for x in grid.x) + "\n")
    for yv, row in zip(grid.y, grid.values):
        out.write(_f9(yv) + "," + ",".join(_f9(v) for v in row) + "\n")
    return out.getvalue()


def grid_to_json(grid: GridField) -> str:
    return json.dumps({
        "x_label": grid.x_label, "y_label": grid.y_label,
        "x": [round(float(v), 9) for v in grid.x],
        "y": [round(float(v), 9) for v in grid.y],
        "values": [[round(float(v), 9) for v in row] for row in grid.values],
    }) + "\n"


def trajectory_rows(traj: Trajectory, extra: np.ndarray):
    for t, p, e in zip(traj.times, traj.points, extra):
        yield [float(t), float(p[0]), float(p[1]), float(e)]


def trajectory_to_csv(traj: Trajectory, extra_name: str, extra: np.ndarray,
                      labels: tuple[str, str]) -> str:
    out = io.StringIO()
    out.write(f"t,x1,x2,{extra_name}\n")
    for row in trajectory_rows(traj, extra):
        out.write(",".join(_f9(v) for v in row) + "\n")
    out.write(f"# x1={labels[0]} x2={labels[1]}\n")
    if traj.truncated:
        out.write(f"# truncated: {traj.note}\n")
    return out.getvalue()


def trajectory_to_json(traj: Trajectory, extra_name: str, extra: np.ndarray,
                       labels: tuple[str, str]) -> str:
    rows = [dict(zip(("t", "x1", "x2", extra_name), (round(v, 9) for v in r)))
            for r in trajectory_rows(traj, extra)]
    return json.dumps({"x1_label": labels[0], "x2_label": labels[1],
                       "truncated": traj.truncated, "note": traj.note,
                       "rows": rows}) + "\n"


STATS_HEADER = "label,count,mean,sd,cv,kappa"


def stats_to_csv(rows: list[primes.SpacingStats]) -> str:
    out = io.StringIO()
    out.write(STATS_HEADER + "\n")
    for s in rows:
        out.write(",".join([s.label, str(s.count), _f6(s.mean), _f6(s.sd), _f6(s.cv),
                            _f6(s.kappa)]) + "\n")
    for s in rows:
        if s.error:
            out.write(f"# {s.label}: {s.error}\n")
    return out.getvalue()


def stats_to_json(rows: list[primes.SpacingStats]) -> str:
    return json.dumps([{
        "label": s.label, "count": s.count, "mean": round(s.mean, 6), "sd": round(s.sd, 6),
        "cv": round(s.cv, 6), "kappa": None if math.isnan(s.kappa) else round(s.kappa, 6),
        "error": s.error} for s in rows]) + "\n"


def histogram_to_csv(h: primes.GapHistogram, top: int = 12) -> str:
    out = io.StringIO()
    out.write("gap,observed,model\n")
    for gap, obs, model in h.entries:
        out.write(f"{gap},{obs},{_f6(model)}\n")
    out.write(f"# total={h.total} mean={_f6(h.mean)} kappa={_f6(h.fit.kappa)}\n")
    out.write("# rank_order=" + ",".join(str(g) for g in h.ranked[:top]) + "\n")
    out.write(f"# mean_rank={h.mean_rank}\n")
    return out.getvalue()


def histogram_to_json(h: primes.GapHistogram, top: int = 12) -> str:
    return json.dumps({
        "total": h.total, "mean": round(h.mean, 6), "kappa": round(h.fit.kappa, 6),
        "rank_order": h.ranked[:top], "mean_rank": h.mean_rank,
        "entries": [{"gap": g, "observed": o, "model": round(m, 6)} for g, o, m in h.entries],
    }) + "\n"


# --- commands --------------------------------------------------------------

def cmd_surface(args) -> str:
    fam = get_family(args.family)
    xr, yr = parse_range(args.x), parse_range(args.y)
    grid = grid_eval(fam.entropy, xr, yr, fam.x_label, fam.y_label)
    return grid_to_json(grid) if args.format == "json" else grid_to_csv(grid)


def cmd_flow(args) -> str:
    fam = get_family(args.family)
    start = parse_pair(args.start)
    t_max = _positive("t-max", args.t_max)
    step = _positive("step", args.step)
    lo = np.array([b[0] for b in fam.bounds])
    hi = np.array([b[1] for b in fam.bounds])
    if not (np.all(start > lo) and np.all(start < hi)):
        raise ConfigError(f"start {args.start!r} lies outside the {fam.name} domain")
    traj = gradient_flow(fam.gradient, start, t_max, step, fam.bounds)
    ent = np.array([fam.entropy(*p) for p in traj.points])
    labels = (fam.x_label, fam.y_label)
    if args.format == "json":
        return trajectory_to_json(traj, "entropy", ent, labels)
    return trajectory_to_csv(traj, "entropy", ent, labels)


def cmd_geodesic(args) -> str:
    fam = get_family(args.family)
    if fam.metric is None:
        raise UnsupportedError(f"family {fam.name!r} has no metric; geodesics need "
                               "gamma or mckay-m1")
    start = parse_pair(args.start)
    vel = parse_pair(args.velocity)
    t_max = _positive("t-max", args.t_max)
    step = _positive("step", args.step)
    if np.any(start <= 0):
        raise ConfigError(f"start {args.start!r} must have positive coordinates")
    metric = fam.metric()
    traj = geodesic_shoot(metric, start, vel, t_max, step)
    speed = np.array([metric(p).norm(v) for p, v in zip(traj.points, traj.velocities)])
    labels = (fam.x_label, fam.y_label)
    if args.format == "json":
        return trajectory_to_json(traj, "speed", speed, labels)
    return trajectory_to_csv(traj, "speed", speed, labels)


def read_samples(path: str) -> list[float]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise ConfigError(f"{path}: line {lineno}: not a number: {text!r}")
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{path}: line {lineno}: value must be positive: {text!r}")
            values.append(v)
    if len(values) < 2:
        raise ConfigError(f"{path}: need at least 2 values, got {len(values)}")
    return values


def cmd_fit_gamma(args) -> str:
    try:
        samples = read_samples(args.input)
    except OSError as exc:
        raise ConfigError(str(exc))
    fit = gamma.gamma_mle(samples)
    return json.dumps({"mu": fit.params.mu, "kappa": fit.params.kappa,
                       "residual": fit.residual, "n": fit.n}) + "\n"


def cmd_primes(args) -> str:
    if args.mode == "table1":
        if args.blocks < 1 or args.block_size < 2:
            raise ConfigError("--blocks must be >= 1 and --block-size >= 2")
        rows = primes.block_stats(args.blocks * args.block_size, args.block_size)
        for n in args.totals or []:
            if n < 3:
                raise ConfigError("--totals counts must be >= 3")
            rows.append(primes.range_stats(n))
        return stats_to_json(rows) if args.format == "json" else stats_to_csv(rows)
    if args.count is None or args.count < 3:
        raise ConfigError(f"primes {args.mode} needs --count >= 3")
    if args.mode == "range":
        rows = [primes.range_stats(args.count)]
        return stats_to_json(rows) if args.format == "json" else stats_to_csv(rows)
    h = primes.gap_histogram(args.count)
    return histogram_to_json(h) if args.format == "json" else histogram_to_csv(h)


def cmd_locus(args) -> str:
    lo, hi, n = parse_range(args.alpha2)
    if lo <= 0:
        raise ConfigError("alpha2 values must be positive")
    rows = []
    for a2 in np.linspace(lo, hi, n):
        try:
            rows.append((float(a2), mckay.max_entropy_locus(a2), ""))
        except NoInteriorMaximumError:
            rows.append((float(a2), math.nan, "no-interior-maximum"))
    if args.format == "json":
        return json.dumps([{"alpha2": round(a, 9),
                            "rho_star": None if math.isnan(r) else round(r, 9),
                            "error": e or None} for a, r, e in rows]) + "\n"
    out = io.StringIO()
    out.write("alpha2,rho_star,error\n")
    for a, r, e in rows:
        out.write(f"{_f9(a)},{'' if math.isnan(r) else _f9(r)},{e}\n")
    return out.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entroflow", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for stochastic inputs (all commands are deterministic)")

    p = sub.add_parser("surface", help="entropy over a parameter grid")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--x", required=True, help="first-axis range lo:hi:count")
    p.add_argument("--y", required=True, help="second-axis range lo:hi:count")
    common(p)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("flow", help="entropy gradient-flow integral curve")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--start", required=True, help="x1,x2")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("geodesic", help="geodesic from a point and velocity")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--start", required=True, help="x1,x2")
    p.add_argument("--velocity", required=True, help="v1,v2")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("fit-gamma", help="maximum-likelihood gamma fit of a sample file")
    p.add_argument("input", help="file with one positive number per line")
    common(p)
    p.set_defaults(func=cmd_fit_gamma)

    p = sub.add_parser("primes", help="prime-gap statistics")
    p.add_argument("mode", choices=("table1", "histogram", "range"))
    p.add_argument("--blocks", type=int, default=10)
    p.add_argument("--block-size", type=int, default=100_000)
    p.add_argument("--totals", type=int, action="append",
                   help="append a row over the first N primes (repeatable)")
    p.add_argument("--count", type=int, help="number of primes (range, histogram)")
    common(p)
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("locus", help="maximum-entropy correlation per alpha2")
    p.add_argument("--alpha2", required=True, help="range lo:hi:count")
    common(p)
    p.set_defaults(func=cmd_locus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except UnsupportedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except DegenerateSampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
