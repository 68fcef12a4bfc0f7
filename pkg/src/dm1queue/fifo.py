"""First-in-first-out waiting times and the number-in-system law.

Under FIFO the wait is a zero atom of mass ``1 - zeta0`` plus an
exponential tail with rate ``mu (1 - zeta0)``, and the number found in
the system by an arrival is geometric with ratio ``zeta0``.
"""
import math

import numpy as np

from .core import zeta0
from .distribution import MixedDistribution, MomentSummary
from .errors import DomainError

__all__ = [
    "fifo_distribution",
    "fifo_transform",
    "fifo_moments",
    "lsys_pmf",
    "lsys_moments",
]


def fifo_distribution(params):
    z = zeta0(params)
    rate = params.mu * (1.0 - z)
    scale = params.mu * z * (1.0 - z)

    def density(x):
        x = np.asarray(x, dtype=float)
        return scale * np.exp(-rate * x)

    return MixedDistribution(1.0 - z, density, spacing=1.0 / rate, has_kinks=False, label="fifo")


def fifo_transform(s, params):
    """Closed-form ``F(s) = 1 - zeta0 + zeta0 * mu(1-zeta0) / (s + mu(1-zeta0))``."""
    z = zeta0(params)
    r = params.mu * (1.0 - z)
    return 1.0 - z + z * r / (s + r)


def fifo_moments(params):
    z = zeta0(params)
    mu = params.mu
    q = mu * (1.0 - z)
    return MomentSummary(
        mean=z / q,
        variance=z * (2.0 - z) / (q * q),
        mean_pos=1.0 / q,
        variance_pos=1.0 / (q * q),
    )


def lsys_pmf(ell, params):
    """``P{L_sys = ell} = (1 - zeta0) zeta0**ell`` seen by an arrival."""
    if isinstance(ell, bool) or int(ell) != ell or ell < 0:
        raise DomainError(f"lsys_pmf: ell must be a nonnegative integer, got {ell!r}")
    z = zeta0(params)
    return (1.0 - z) * z ** int(ell)


def lsys_moments(params):
    """Mean and variance of the geometric number-in-system law."""
    z = zeta0(params)
    return z / (1.0 - z), z / (1.0 - z) ** 2


def lsys_truncation(params):
    """Series cut-off used by numeric cross-checks: tail below 1e-16."""
    z = zeta0(params)
    return max(400, int(math.ceil(400.0 / -math.log(z))))
