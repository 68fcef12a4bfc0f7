"""Idle periods and the cost-optimal interarrival time.

The idle time inside one interarrival interval has an atom ``zeta0`` at 0
and density ``mu zeta0 (1-zeta0) exp(mu (1-zeta0) x)`` on ``[0, a)``.

Cost weighs mean idleness against mean waiting,

    C(a) = (1 - c)(a - 1/mu) + c zeta0 / (mu (1 - zeta0)),

and the stationary point has a closed form through the secondary
Lambert branch:

    zeta0* = -1 / W_{-1}(-exp(-1/(1-c))),   a* = -ln(zeta0*) / (mu (1 - zeta0*)).
"""
from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .core import QueueParams, zeta0
from .errors import DomainError, StabilityError
from .fifo import fifo_moments
from .special import Branch, lambert

__all__ = [
    "IdleDistribution",
    "idle_distribution",
    "idle_moments",
    "wait_idle_cross_covariance",
    "cross_correlation",
    "CostSpec",
    "CostResult",
    "cost",
    "cost_derivative",
    "optimal_a",
    "golden_section",
]


@dataclass(frozen=True)
class IdleDistribution:
    atom_at_zero: float
    density: Callable[[np.ndarray], np.ndarray]
    support_end: float

    def cdf(self, x):
        """``P{idle <= x}``; closed form, used for goodness-of-fit tests."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.support_end)
        z = self.atom_at_zero
        r = -math.log(z) / self.support_end  # mu (1 - zeta0)
        return z + z * np.expm1(r * x)


def idle_distribution(params):
    z = zeta0(params)
    r = params.mu * (1.0 - z)
    a = params.a

    def density(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x < a)
        return np.where(inside, params.mu * z * (1.0 - z) * np.exp(r * np.minimum(x, a)), 0.0)

    return IdleDistribution(z, density, a)


def idle_moments(params):
    """Mean ``(1 - rho) a`` and variance ``(1 + z - 2 a mu z) / (mu^2 (1 - z))``."""
    z = zeta0(params)
    mu, a = params.mu, params.a
    mean = a - 1.0 / mu
    var = (1.0 + z - 2.0 * a * mu * z) / (mu * mu * (1.0 - z))
    return mean, var


def wait_idle_cross_covariance(params):
    """Covariance of a client's FIFO wait and the idle time that follows its arrival."""
    z = zeta0(params)
    mu, a = params.mu, params.a
    return ((1.0 - z) * math.exp(-a * mu) / (mu * mu * z)
            + a * z / (mu * (1.0 - z))
            - 1.0 / (mu * mu * (1.0 - z)))


def cross_correlation(params):
    cov = wait_idle_cross_covariance(params)
    _, var_idle = idle_moments(params)
    return cov / math.sqrt(fifo_moments(params).variance * var_idle)


@dataclass(frozen=True)
class CostSpec:
    """Weight ``c`` in (0, 1) on mean waiting; ``1 - c`` goes to mean idleness."""

    c: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.c < 1.0):
            raise DomainError(f"cost weight c must lie in (0, 1), got {self.c!r}")
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise DomainError(f"mu must be positive, got {self.mu!r}")


@dataclass(frozen=True)
class CostResult:
    a_opt: float
    zeta0_opt: float
    cost_value: float


def _params(a, spec):
    if not a * spec.mu > 1.0:
        raise StabilityError(f"cost needs a*mu > 1, got a={a!r}, mu={spec.mu!r}")
    return QueueParams.from_interarrival(a, spec.mu)


def cost(a, spec):
    p = _params(a, spec)
    z = zeta0(p)
    c = spec.c
    return (1.0 - c) * (a - 1.0 / spec.mu) + c * z / (spec.mu * (1.0 - z))


def cost_derivative(a, spec):
    """``dC/da = (1 - c) - c zeta0 / ((1 - zeta0)(1 - a mu zeta0))``."""
    p = _params(a, spec)
    z = zeta0(p)
    c = spec.c
    return (1.0 - c) - c * z / ((1.0 - z) * (1.0 - a * spec.mu * z))


def optimal_a(spec):
    """Closed-form minimizer of :func:`cost` for fixed ``mu``."""
    c = spec.c
    w = lambert(-math.exp(-1.0 / (1.0 - c)), Branch.SECONDARY)
    z = -1.0 / w
    a = -math.log(z) / (spec.mu * (1.0 - z))
    return CostResult(a, z, cost(a, spec))


def golden_section(f, lo, hi, tol=1e-10, max_iter=500):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns the abscissa."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)
