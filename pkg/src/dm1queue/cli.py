"""Command-line front end.

Exit codes: 0 success, 1 domain/stability error, 2 usage error,
3 verification failure.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .control import (CostSpec, cross_correlation, idle_moments, optimal_a,
                      wait_idle_cross_covariance)
from .core import QueueParams, zeta0
from .errors import DM1Error
from .fifo import fifo_moments, lsys_moments
from .lifo import lifo_distribution, lifo_moments
from .multiserver import slow_server_table
from .siro import siro_distribution, siro_moments
from .simulator import (RNG_ALGORITHM, Policy, SimConfig, empirical_summary, export_csv,
                        run_replicas)
from .verify import CHECKS, run_checks

EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

_MOMENTS = {"fifo": fifo_moments, "lifo": lifo_moments, "siro": siro_moments}


def _fmt(v):
    return f"{v:.12g}"


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _emit(report, fmt, out):
    """Write a flat ordered report as JSON or two-column CSV."""
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write("key,value\n")
        for k, v in report.items():
            out.write(f"{k},{_fmt(v) if isinstance(v, float) else v}\n")


def _emit_table(meta, header, rows, fmt, out):
    if fmt == "json":
        out.write(json.dumps({**meta, "rows": [dict(zip(header, r)) for r in rows]}, indent=2) + "\n")
        return
    for k, v in meta.items():
        out.write(f"# {k}={_fmt(v) if isinstance(v, float) else v}\n")
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in r) + "\n")


def _params(args):
    return QueueParams(args.lam, args.mu)


def cmd_moments(args, out):
    p = _params(args)
    m = _MOMENTS[args.policy](p)
    report = {
        "policy": args.policy,
        "lambda": p.lam,
        "mu": p.mu,
        "mean": m.mean,
        "variance": m.variance,
        "mean_pos": m.mean_pos,
        "variance_pos": m.variance_pos,
        "zero_wait_probability": 1.0 - zeta0(p),
    }
    if args.policy == "fifo":
        report["lsys_mean"], report["lsys_variance"] = lsys_moments(p)
    _emit(report, args.format, out)
    return 0


def cmd_density(args, out):
    p = _params(args)
    z = zeta0(p)
    if args.policy == "fifo":
        r = p.mu * (1.0 - z)
        dens = lambda x: p.mu * z * (1.0 - z) * np.exp(-r * x)
    elif args.policy == "lifo":
        dens = lifo_distribution(p).density
    else:
        dens = siro_distribution(p).density
    n = int(math.floor(args.xmax / args.step + 1e-9))
    xs = args.step * np.arange(1, n + 1)
    ys = np.asarray(dens(xs), dtype=float)
    meta = {"policy": args.policy, "lambda": p.lam, "mu": p.mu, "atom_at_zero": 1.0 - z,
            "version": __version__}
    rows = [(float(x), float(y)) for x, y in zip(xs, ys)]
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            _emit_table(meta, ["x", "density"], rows, args.format, fh)
    else:
        _emit_table(meta, ["x", "density"], rows, args.format, out)
    return 0


def cmd_optimize(args, out):
    spec = CostSpec(args.c, args.mu)
    res = optimal_a(spec)
    _emit({"mu": spec.mu, "c": spec.c, "a": res.a_opt, "zeta0": res.zeta0_opt,
           "cost": res.cost_value}, args.format, out)
    return 0


def cmd_multiserver(args, out):
    p = _params(args)
    rows = [(m.n, m.m_n, m.p_n, m.delta_n) for m in slow_server_table(args.n, p)]
    meta = {"lambda": p.lam, "mu": p.mu, "zeta0": zeta0(p), "version": __version__}
    _emit_table(meta, ["n", "m_n", "p_n", "delta_n"], rows, args.format, out)
    return 0


def cmd_idle(args, out):
    p = _params(args)
    mean, var = idle_moments(p)
    _emit({"lambda": p.lam, "mu": p.mu, "idle_atom": zeta0(p), "idle_mean": mean,
           "idle_variance": var, "wait_idle_covariance": wait_idle_cross_covariance(p),
           "wait_idle_correlation": cross_correlation(p)}, args.format, out)
    return 0


def cmd_simulate(args, out):
    p = QueueParams(args.lam, args.mu)  # transient runs (rho >= 1) allowed
    configs = [SimConfig(p, Policy(args.policy), args.arrivals, args.warmup, args.seed + r)
               for r in range(args.replicas)]
    results = run_replicas(configs, max_workers=None if args.replicas > 1 else 1)
    reports = []
    for cfg, st in zip(configs, results):
        s = empirical_summary(st)
        reports.append({
            "policy": cfg.policy.value, "lambda": p.lam, "mu": p.mu, "seed": cfg.seed,
            "rng": RNG_ALGORITHM, "arrivals": cfg.n_arrivals, "warmup": cfg.warmup_arrivals,
            "mean": s.mean, "mean_se": s.mean_se, "variance": s.variance,
            "mean_pos": s.mean_pos, "variance_pos": s.variance_pos,
            "zero_fraction": s.zero_fraction, "idle_mean": s.idle_mean,
            "idle_variance": s.idle_variance, "idle_zero_fraction": s.idle_zero_fraction,
            "wait_idle_covariance": s.wait_idle_covariance,
        })
        if args.export:
            prefix = args.export if args.replicas == 1 else f"{args.export}_r{cfg.seed}"
            export_csv(st, prefix)
    if args.format == "json":
        out.write(json.dumps(reports[0] if len(reports) == 1 else reports, indent=2) + "\n")
    else:
        keys = list(reports[0])
        out.write(",".join(keys) + "\n")
        for r in reports:
            out.write(",".join(_fmt(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys) + "\n")
    return 0


def cmd_verify(args, out):
    names = list(CHECKS) if args.check == "all" else [args.check]
    kwargs = {"n_arrivals": args.arrivals} if "invariance" in names else {}
    results = run_checks(names, _params(args), **kwargs)
    ok = True
    for group, rows in results.items():
        for r in rows:
            ok &= r.passed
            out.write(f"{'PASS' if r.passed else 'FAIL'} {group}:{r.name} value={_fmt(r.value)} "
                      f"expected={_fmt(r.expected)} diff={r.diff:.3e} tol={r.tol:.1e}\n")
    out.write("all checks passed\n" if ok else "verification FAILED\n")
    return 0 if ok else EXIT_VERIFY


def build_parser():
    parser = argparse.ArgumentParser(prog="dm1queue", description="D/M/1 queue analytics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def queue_args(sp):
        sp.add_argument("--lambda", dest="lam", type=_positive, default=2.0, help="arrival rate")
        sp.add_argument("--mu", type=_positive, default=3.0, help="service rate")

    def fmt_arg(sp, default="json"):
        sp.add_argument("--format", choices=["csv", "json"], default=default)

    sp = sub.add_parser("moments", help="waiting-time moments for one policy")
    queue_args(sp)
    sp.add_argument("--policy", choices=sorted(_MOMENTS), default="fifo")
    fmt_arg(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("density", help="continuous wait density on a grid")
    queue_args(sp)
    sp.add_argument("--policy", choices=sorted(_MOMENTS), default="lifo")
    sp.add_argument("--xmax", type=_positive, default=3.0)
    sp.add_argument("--step", type=_positive, default=0.01)
    sp.add_argument("--out", default="-", help="output file, '-' for stdout")
    fmt_arg(sp, "csv")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("optimize", help="cost-optimal interarrival time")
    sp.add_argument("--mu", type=_positive, default=3.0)
    sp.add_argument("--c", type=float, default=0.5, help="weight on mean waiting, in (0, 1)")
    fmt_arg(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("multiserver", help="slow-server table for n = 1..N")
    queue_args(sp)
    sp.add_argument("--n", type=int, default=5)
    fmt_arg(sp, "csv")
    sp.set_defaults(func=cmd_multiserver)

    sp = sub.add_parser("idle", help="idle-period moments and wait correlation")
    queue_args(sp)
    fmt_arg(sp)
    sp.set_defaults(func=cmd_idle)

    sp = sub.add_parser("simulate", help="discrete-event simulation")
    queue_args(sp)
    sp.add_argument("--policy", choices=[p.value for p in Policy], default="fifo")
    sp.add_argument("--arrivals", type=int, default=1_000_000)
    sp.add_argument("--warmup", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--export", default=None, help="CSV prefix for raw samples")
    fmt_arg(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="run self-checks; exit 3 on failure")
    queue_args(sp)
    sp.add_argument("--check", choices=sorted(CHECKS) + ["all"], default="all")
    sp.add_argument("--arrivals", type=int, default=1_000_000)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    if getattr(args, "replicas", 1) < 1:
        parser.error("--replicas must be >= 1")
    if getattr(args, "n", 1) < 1:
        parser.error("--n must be >= 1")
    try:
        return args.func(args, out)
    except DM1Error as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
