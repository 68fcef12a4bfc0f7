"""Discrete-event D/M/1 simulation under FIFO, LIFO and SIRO.

Client ``i`` (0-based) arrives at ``(i + 1) a``. Service durations come
from one exponential stream consumed in order of service start, so the
three policies see the same workload and differ only in which waiting
client is picked. A second stream drives the SIRO pick.

Conventions:

* a departure and an arrival at the same instant: the departure goes
  first, so the arrival finds an empty server and waits 0;
* ``idle_lengths[i]`` is the empty-system time inside
  ``[(i+1) a, (i+2) a)``, the interval opened by client ``i``;
* ``lsys_at_arrival[i]`` counts clients present just before ``i`` arrives;
* clients still waiting after the last arrival are served without further
  arrivals (the drain touches only the last few clients).
"""
from collections import deque
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass
import enum
import math

import numpy as np

from .core import QueueParams
from .errors import DomainError

__all__ = [
    "Policy",
    "SimConfig",
    "SimStats",
    "SimSummary",
    "RNG_ALGORITHM",
    "run",
    "run_replicas",
    "empirical_summary",
    "batch_means_se",
    "ks_distance",
    "ks_two_sample",
    "lindley_waits",
    "export_csv",
]

RNG_ALGORITHM = "numpy.PCG64 via SeedSequence(seed).spawn(2): [service, siro-pick]"
MAX_ARRIVALS = 200_000_000


class Policy(enum.Enum):
    FIFO = "fifo"
    LIFO = "lifo"
    SIRO = "siro"


@dataclass(frozen=True)
class SimConfig:
    params: QueueParams
    policy: Policy
    n_arrivals: int
    warmup_arrivals: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        n = self.n_arrivals
        if isinstance(n, bool) or int(n) != n or n < 0:
            raise DomainError(f"n_arrivals must be a nonnegative integer, got {n!r}")
        if n > MAX_ARRIVALS:
            raise OverflowError(f"n_arrivals={n} exceeds the event limit {MAX_ARRIVALS}")
        if self.warmup_arrivals is None:
            # 1% with a floor of 1e4, but never more than half the run
            w = min(max(10_000, n // 100), n // 2)
            object.__setattr__(self, "warmup_arrivals", w)
        w = self.warmup_arrivals
        if int(w) != w or w < 0 or (n > 0 and w >= n):
            raise DomainError(f"need n_arrivals > warmup_arrivals >= 0, got {n}, {w}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SimStats:
    """Post-warmup samples; arrays are aligned by client index."""

    waits: np.ndarray
    idle_lengths: np.ndarray
    lsys_at_arrival: np.ndarray
    seed: int
    policy: Policy
    rng: str = RNG_ALGORITHM
    services: np.ndarray | None = None  # service draws in start order, full run


def _streams(seed):
    svc, pick = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.Generator(np.random.PCG64(svc)), np.random.Generator(np.random.PCG64(pick))


def run(config, keep_services=False):
    """Simulate ``config.n_arrivals`` clients and drop the warmup prefix."""
    params, policy, n = config.params, config.policy, int(config.n_arrivals)
    if n == 0:
        empty = np.zeros(0)
        return SimStats(empty, empty.copy(), np.zeros(0, dtype=np.int64), config.seed, policy)
    a = params.a
    svc_rng, pick_rng = _streams(config.seed)
    services = svc_rng.exponential(1.0 / params.mu, size=n)
    svc = services.tolist()
    picks = pick_rng.random(n).tolist() if policy is Policy.SIRO else None

    waits = [0.0] * n
    idle = [0.0] * n
    lsys = [0] * n
    queue = deque() if policy is Policy.FIFO else []
    fifo = policy is Policy.FIFO
    lifo = policy is Policy.LIFO
    busy = False
    busy_until = 0.0
    free_at = 0.0
    nxt = 0  # next service draw
    npick = 0

    def serve_until(t):
        nonlocal busy, busy_until, free_at, nxt, npick
        while busy and busy_until <= t:
            if queue:
                if fifo:
                    i = queue.popleft()
                elif lifo:
                    i = queue.pop()
                else:
                    idx = int(picks[npick] * len(queue))
                    npick += 1
                    i = queue[idx]
                    queue[idx] = queue[-1]
                    queue.pop()
                waits[i] = busy_until - (i + 1) * a
                busy_until += svc[nxt]
                nxt += 1
            else:
                busy = False
                free_at = busy_until

    for k in range(n):
        t = (k + 1) * a
        serve_until(t)
        if k:
            idle[k - 1] = 0.0 if busy else t - free_at
        lsys[k] = len(queue) + busy
        if busy:
            queue.append(k)
        else:
            busy = True
            busy_until = t + svc[nxt]
            nxt += 1
    t_end = (n + 1) * a
    serve_until(t_end)
    idle[n - 1] = 0.0 if busy else t_end - free_at
    serve_until(math.inf)

    w = int(config.warmup_arrivals)
    return SimStats(
        np.asarray(waits[w:]),
        np.asarray(idle[w:]),
        np.asarray(lsys[w:], dtype=np.int64),
        config.seed,
        policy,
        services=services if keep_services else None,
    )


def run_replicas(configs, max_workers=None):
    """Run configs in parallel processes; results keep the input order."""
    configs = list(configs)
    if max_workers == 1 or len(configs) <= 1:
        return [run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, configs))


def lindley_waits(services, a, n):
    """FIFO waits from ``w[k+1] = max(0, w[k] + s[k] - a)``."""
    out = np.zeros(n)
    w = 0.0
    for k in range(1, n):
        w = max(0.0, w + services[k - 1] - a)
        out[k] = w
    return out


def batch_means_se(x, n_batches=50):
    """Standard error of the mean of a correlated series by batch means."""
    x = np.asarray(x, dtype=float)
    m = x.size // n_batches
    if m < 2:
        return float(np.std(x, ddof=1) / math.sqrt(max(x.size, 1)))
    means = x[: m * n_batches].reshape(n_batches, m).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


@dataclass(frozen=True)
class SimSummary:
    n: int
    mean: float
    variance: float
    mean_pos: float
    variance_pos: float
    zero_fraction: float
    idle_mean: float
    idle_variance: float
    idle_zero_fraction: float
    lsys_pmf_estimate: np.ndarray
    wait_idle_covariance: float
    mean_se: float
    variance_se: float
    zero_fraction_se: float
    idle_mean_se: float

    def variance_ci(self, z=2.5758):
        """Normal-approximation interval for the wait variance (99% by default)."""
        return self.variance - z * self.variance_se, self.variance + z * self.variance_se


def empirical_summary(stats):
    w = stats.waits
    if w.size == 0:
        raise DomainError("empirical_summary: no samples")
    idle = stats.idle_lengths
    pos = w[w > 0]
    zero = (w == 0).astype(float)
    return SimSummary(
        n=int(w.size),
        mean=float(w.mean()),
        variance=float(w.var(ddof=1)) if w.size > 1 else 0.0,
        mean_pos=float(pos.mean()) if pos.size else math.nan,
        variance_pos=float(pos.var(ddof=1)) if pos.size > 1 else math.nan,
        zero_fraction=float(zero.mean()),
        idle_mean=float(idle.mean()),
        idle_variance=float(idle.var(ddof=1)) if idle.size > 1 else 0.0,
        idle_zero_fraction=float((idle == 0).mean()),
        lsys_pmf_estimate=np.bincount(stats.lsys_at_arrival) / w.size,
        wait_idle_covariance=float(np.cov(w, idle)[0, 1]) if w.size > 1 else 0.0,
        mean_se=batch_means_se(w),
        variance_se=batch_means_se((w - w.mean()) ** 2),
        zero_fraction_se=batch_means_se(zero),
        idle_mean_se=batch_means_se(idle),
    )


def ks_distance(samples, cdf):
    """One-sample Kolmogorov-Smirnov statistic against a vectorized CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("ks_distance: no samples")
    F = cdf(x)
    hi = np.arange(1, n + 1) / n - F
    lo = F - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def ks_two_sample(x, y):
    from scipy.stats import ks_2samp

    return float(ks_2samp(x, y).statistic)


def export_csv(stats, prefix):
    """Write ``<prefix>_clients.csv`` and ``<prefix>_intervals.csv``."""
    fmt = "{:.12g}".format
    paths = (f"{prefix}_clients.csv", f"{prefix}_intervals.csv")
    with open(paths[0], "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["client", "wait", "lsys_at_arrival"])
        for i, (w, l) in enumerate(zip(stats.waits, stats.lsys_at_arrival)):
            wr.writerow([i, fmt(w), int(l)])
    with open(paths[1], "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["interval", "idle"])
        for i, v in enumerate(stats.idle_lengths):
            wr.writerow([i, fmt(v)])
    return paths
