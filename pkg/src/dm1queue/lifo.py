"""Last-in-first-out waiting times.

On each lattice cell ``k a < x < (k+1) a`` the continuous part of the wait
density is

    f(x) = mu^(k+1) zeta0 x^(k-1) (x - k a) exp(-mu x) / k!,

which stitches together the delay-differential equation driven by the
atoms of ``theta``, the inverse transform of ``zeta(s)``. The density
restarts from zero at every lattice point: a client arriving just as the
server frees up is taken at once.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from .core import zeta, zeta0, zeta0_prime_s
from .distribution import MixedDistribution, MomentSummary
from .errors import DomainError, TruncationError

__all__ = [
    "ThetaAtoms",
    "theta_atoms",
    "lifo_fragment",
    "lifo_density",
    "lifo_distribution",
    "lifo_transform",
    "lifo_moments",
]

# below this cell index plain arithmetic is safe
_LOG_SPACE_FROM = 20


@dataclass(frozen=True)
class ThetaAtoms:
    """Weights ``exp(-k/rho) (k/rho)^(k-1) / k!`` located at ``x = a k``."""

    weights: np.ndarray  # weights[i] belongs to k = i + 1
    spacing: float

    @property
    def k_max(self):
        return len(self.weights)

    @property
    def locations(self):
        return self.spacing * np.arange(1, self.k_max + 1)


def _log_theta_weight(k, inv_rho):
    k = np.asarray(k, dtype=float)
    return -k * inv_rho + (k - 1.0) * np.log(k * inv_rho) - gammaln(k + 1.0)


def theta_atoms(params, tol=1e-18):
    """Atoms of ``theta`` up to the first weight below ``tol`` past the mode.

    The weights sum to ``zeta0``. Past the mode consecutive weights shrink
    by a factor tending to ``(1/rho) exp(1 - 1/rho) < 1``, so the dropped
    tail is of order ``tol``.
    """
    params.require_stable()
    if not tol > 0:
        raise DomainError("theta_atoms: tol must be positive")
    inv_rho = params.a_mu
    log_tol = math.log(tol)
    logs = []
    k = 1
    while True:
        lw = float(_log_theta_weight(k, inv_rho))
        logs.append(lw)
        if lw < log_tol and (k == 1 or lw < logs[-2]):
            break
        k += 1
        if k > 10_000_000:
            raise TruncationError("theta_atoms: weights decay too slowly (rho too close to 1)")
    return ThetaAtoms(np.exp(np.array(logs)), params.a)


def _fragment(k, x, mu, z, a):
    """Vectorized cell-``k`` formula (no domain checks)."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return mu * z * np.exp(-mu * x)
    gap = x - k * a
    if k < _LOG_SPACE_FROM:
        return mu ** (k + 1) * z * x ** (k - 1) * gap * np.exp(-mu * x) / math.factorial(k)
    logmag = (k + 1) * math.log(mu) + (k - 1) * np.log(x) - mu * x - gammaln(k + 1.0)
    return z * gap * np.exp(logmag)


def lifo_fragment(k, x, params):
    """Closed-form LIFO density on the open cell ``(k a, (k+1) a)``."""
    params.require_stable()
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"lifo_fragment: k must be a nonnegative integer, got {k!r}")
    k = int(k)
    a = params.a
    if not (k * a < x < (k + 1) * a):
        raise DomainError(f"lifo_fragment: x={x!r} outside ({k * a}, {(k + 1) * a})")
    return float(_fragment(k, x, params.mu, zeta0(params), a))


def _lattice_index(x, lam):
    """``floor(lam x)`` with lattice points snapped to their own cell.

    Grid points like ``3 * 0.1 * 5`` land a few ulps off a multiple of
    ``a``; they are treated as the lattice point itself so the right-limit
    convention applies.
    """
    t = lam * x
    k = np.floor(t)
    near = np.abs(t - np.round(t)) <= 1e-12 * np.maximum(1.0, np.abs(t))
    return np.where(near, np.round(t), k).astype(np.int64)


def lifo_density(params):
    """Vectorized stitched density; lattice points take the right limit 0."""
    z = zeta0(params)
    mu, a, lam = params.mu, params.a, params.lam

    def density(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        pos = x > 0
        k = _lattice_index(x, lam)
        for kk in np.unique(k[pos]):
            sel = pos & (k == kk)
            out[sel] = _fragment(int(kk), x[sel], mu, z, a)
        out[pos & (k >= 1) & (np.abs(x - k * a) <= 1e-12 * np.maximum(1.0, x))] = 0.0
        return out[0] if scalar else out

    return density


def lifo_distribution(params):
    z = zeta0(params)
    return MixedDistribution(1.0 - z, lifo_density(params), spacing=params.a, has_kinks=True, label="lifo")


def lifo_transform(s, params):
    """``F(s) = 1 - zeta0 + zeta0 mu (1 - zeta(s)) / (s + mu - mu zeta(s))``."""
    z0 = zeta0(params)
    zs = zeta(s, params)
    mu = params.mu
    if s == 0.0:
        return 1.0
    return 1.0 - z0 + z0 * mu * (1.0 - zs) / (s + mu - mu * zs)


def lifo_moments(params):
    z = zeta0(params)
    zp = zeta0_prime_s(params)
    mu = params.mu
    q2 = (mu * (1.0 - z)) ** 2
    return MomentSummary(
        mean=z / (mu * (1.0 - z)),
        variance=z * (2.0 - z - 2.0 * mu * zp) / q2,
        mean_pos=1.0 / (mu * (1.0 - z)),
        variance_pos=(1.0 - 2.0 * mu * zp) / q2,
    )
