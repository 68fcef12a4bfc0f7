"""Named self-checks used by ``dm1queue verify``.

Each check returns a list of :class:`CheckResult`; a check group passes
when every row does. The reference values live in
``REFERENCE`` so the CLI, the demos and the tests agree on them.
"""
from dataclasses import dataclass
import math
import time

import numpy as np

from .control import (CostSpec, cost, cross_correlation, golden_section, idle_distribution,
                      idle_moments, optimal_a)
from .core import QueueParams, zeta0, zeta0_prime_s
from .fifo import fifo_distribution, fifo_moments, lsys_moments
from .lifo import lifo_distribution, lifo_moments
from .multiserver import slow_server_metrics
from .siro import siro_arc, siro_distribution, siro_g, siro_moments, verify_transform
from .simulator import (Policy, SimConfig, empirical_summary, ks_distance, ks_two_sample, run)

__all__ = ["CheckResult", "REFERENCE", "CHECKS", "run_checks"]

# Reference 8-digit values for lam=2, mu=3 (and mu=3 for the cost optimum).
REFERENCE = {
    "zeta0": 0.41718835,
    "zeta0_prime_s": -0.55741433,
    "fifo.mean": 0.23860673,
    "fifo.variance": 0.21600433,
    "fifo.mean_pos": 0.57194007,
    "fifo.variance_pos": 0.32711544,
    "lsys.mean": 0.71582021,
    "lsys.variance": 1.22821879,
    "lifo.variance": 0.67242217,
    "lifo.variance_pos": 1.42114846,
    "siro.variance": 0.34029290,
    "siro.variance_pos": 0.62503500,
    "idle.variance": 0.03157553,
    "idle.correlation": -0.44448913,
    "cost.c=0.5.zeta0": 0.31784443,
    "cost.c=0.5.a": 0.56008398,
    "cost.c=0.2.a": 0.44983251,
    "cost.c=0.8.a": 0.75436304,
    "multi.2": (0.16901950, 0.70448039),
    "multi.3": (0.12647170, 0.77887245),
    "multi.4": (0.09744181, 0.82962932),
    "multi.5": (0.07648770, 0.89364299),
}

# Reference values are truncated to 8 decimals.
REFERENCE_TOL = 1e-7


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def diff(self):
        return self.value - self.expected

    @property
    def passed(self):
        return abs(self.diff) <= self.tol


def _row(name, value, expected, tol=REFERENCE_TOL):
    return CheckResult(name, float(value), float(expected), float(tol))


def check_reference(params=None):
    """Every reference constant for the running example."""
    p = params or QueueParams(2.0, 3.0)
    R = REFERENCE
    out = [
        _row("zeta0", zeta0(p), R["zeta0"]),
        _row("zeta0_prime_s", zeta0_prime_s(p), R["zeta0_prime_s"]),
    ]
    fm = fifo_moments(p)
    for key in ("mean", "variance", "mean_pos", "variance_pos"):
        out.append(_row(f"fifo.{key}", getattr(fm, key), R[f"fifo.{key}"]))
    lm, lv = lsys_moments(p)
    out += [_row("lsys.mean", lm, R["lsys.mean"]), _row("lsys.variance", lv, R["lsys.variance"])]
    li = lifo_moments(p)
    out += [_row("lifo.variance", li.variance, R["lifo.variance"]),
            _row("lifo.variance_pos", li.variance_pos, R["lifo.variance_pos"])]
    si = siro_moments(p)
    out += [_row("siro.variance", si.variance, R["siro.variance"]),
            _row("siro.variance_pos", si.variance_pos, R["siro.variance_pos"])]
    im, iv = idle_moments(p)
    out += [_row("idle.mean", im, 1.0 / 6.0, 1e-12),
            _row("idle.variance", iv, R["idle.variance"]),
            _row("idle.correlation", cross_correlation(p), R["idle.correlation"])]
    half = optimal_a(CostSpec(0.5, 3.0))
    out += [_row("cost.c=0.5.zeta0", half.zeta0_opt, R["cost.c=0.5.zeta0"]),
            _row("cost.c=0.5.a", half.a_opt, R["cost.c=0.5.a"]),
            _row("cost.c=0.2.a", optimal_a(CostSpec(0.2, 3.0)).a_opt, R["cost.c=0.2.a"]),
            _row("cost.c=0.8.a", optimal_a(CostSpec(0.8, 3.0)).a_opt, R["cost.c=0.8.a"])]
    for c in (0.2, 0.5, 0.8):
        spec = CostSpec(c, 3.0)
        gs = golden_section(lambda a: cost(a, spec), 1.0 / 3.0 + 1e-3, 5.0 / 3.0, tol=1e-11)
        out.append(_row(f"cost.c={c}.golden", gs, optimal_a(spec).a_opt))
    for n in range(2, 6):
        m = slow_server_metrics(n, p)
        out += [_row(f"multi.{n}.m", m.m_n, R[f"multi.{n}"][0]),
                _row(f"multi.{n}.p", m.p_n, R[f"multi.{n}"][1])]
    return out


def check_mass(params=None):
    """Total probability of each mixed law by quadrature."""
    p = params or QueueParams(2.0, 3.0)
    out = []
    for dist in (fifo_distribution(p), lifo_distribution(p), siro_distribution(p)):
        out.append(_row(f"{dist.label}.mass", dist.numeric_mass(), 1.0, 1e-8))
    idle = idle_distribution(p)
    x, w = np.polynomial.legendre.leggauss(40)
    xs = 0.5 * p.a * (x + 1.0)
    out.append(_row("idle.mass", idle.atom_at_zero + 0.5 * p.a * float(w @ idle.density(xs)), 1.0, 1e-12))
    return out


def check_arc(params=None, n_points=100):
    """Recursion density on the first cell against the exponential-integral arc."""
    p = params or QueueParams(2.0, 3.0)
    z = zeta0(p)
    xs = np.linspace(0.0, p.a, n_points + 2)[1:-1]
    t = time.perf_counter()
    rec = z * siro_g(xs, p)
    arc = np.array([siro_arc(x, p) for x in xs])
    worst = int(np.argmax(np.abs(rec - arc)))
    return [_row(f"siro.arc(x={xs[worst]:.4f}) worst of {n_points}", rec[worst], arc[worst], 1e-8),
            _row("siro.arc.runtime_s", time.perf_counter() - t, 0.0, 10.0)]


def check_transform(params=None, s_grid=(0.5, 1.0, 2.0, 5.0)):
    p = params or QueueParams(2.0, 3.0)
    return [_row(f"siro.transform(s={c.s:g})", c.lhs, c.rhs, 1e-5) for c in verify_transform(s_grid, p)]


def check_invariance(params=None, n_arrivals=1_000_000, seed=20221027):
    """Simulated policy-invariant quantities and per-policy goodness of fit."""
    p = params or QueueParams(2.0, 3.0)
    z = zeta0(p)
    mean = fifo_moments(p).mean
    dists = {Policy.FIFO: fifo_distribution(p), Policy.LIFO: lifo_distribution(p),
             Policy.SIRO: siro_distribution(p)}
    out = []
    idles = {}
    for pol, dist in dists.items():
        st = run(SimConfig(p, pol, n_arrivals, seed=seed))
        s = empirical_summary(st)
        idles[pol] = st.idle_lengths
        name = pol.value
        out += [
            _row(f"sim.{name}.mean", s.mean, mean, 3 * s.mean_se),
            _row(f"sim.{name}.zero_fraction", s.zero_fraction, 1.0 - z, 3 * s.zero_fraction_se),
            _row(f"sim.{name}.idle_mean", s.idle_mean, p.a - 1.0 / p.mu, 3 * s.idle_mean_se),
            _row(f"sim.{name}.ks_positive_wait", ks_distance(st.waits[st.waits > 0], dist.positive_cdf),
                 0.0, 0.005),
        ]
    pols = list(idles)
    for i in range(len(pols)):
        for j in range(i + 1, len(pols)):
            out.append(_row(f"sim.idle_ks.{pols[i].value}-{pols[j].value}",
                            ks_two_sample(idles[pols[i]], idles[pols[j]]), 0.0, 0.005))
    return out


CHECKS = {
    "reference": check_reference,
    "mass": check_mass,
    "arc": check_arc,
    "transform": check_transform,
    "invariance": check_invariance,
}


def run_checks(names, params=None, **kwargs):
    results = {}
    for name in names:
        fn = CHECKS[name]
        if name == "invariance":
            results[name] = fn(params, **kwargs)
        else:
            results[name] = fn(params)
    return results
