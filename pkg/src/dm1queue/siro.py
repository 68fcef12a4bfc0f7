"""Serve-in-random-order waiting times.

The continuous part of the SIRO wait density is ``zeta0 * g(x)`` where the
conditional density ``g`` comes from a two-index recursion. For offsets
``y`` within a lattice cell,

    h[j, 0](y) = sum_{r=1}^{j+1} r/(j+1) * d/dy[y^(j+1-r) e^-y / (j+1-r)!]
    h[j, k](y) = sum_{r=1}^{j+1} r/(j+1) * pois(j+1-r; 1/rho) * h[r, k-1](y)

and

    g(x) = -mu (1 - zeta0) * sum_j zeta0^j h[j, K](mu x - K/rho),  K = floor(lam x).

Level 0 telescopes to ``h[j, 0](y) = -P(Poisson(y) <= j) / (j + 1)``;
every level obeys ``|h[j, k]| <= 1/(j+1)``, which bounds the truncation
of the ``j`` series by ``zeta0^J / ((J+1)(1 - zeta0))``.

On the first cell the density also has the closed form
``mu (1-zeta0) [E1(mu (1-zeta0) x) - E1(mu x)]``; that arc equals
``zeta0 * g`` (not ``g``), and ``g`` is nonnegative with the leading minus.
"""
from dataclasses import dataclass
import functools
import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln, pdtr, xlogy

from .core import QueueParams, zeta, zeta0, zeta0_prime_s
from .distribution import MixedDistribution, MomentSummary
from .errors import ConvergenceError, DomainError, TruncationError
from .lifo import _lattice_index
from .special import exp_integral, laplace_numeric

__all__ = [
    "SiroTable",
    "siro_table",
    "siro_g",
    "siro_density",
    "siro_arc",
    "siro_distribution",
    "siro_moments",
    "b_function",
    "b_partial_z",
    "phi_numeric",
    "TransformCheck",
    "verify_transform",
]

J_CAP = 200
# trailing push-down coefficients whose total contribution is below this are dropped
_TRIM_ABS = 1e-18


def _poisson_pmf(m, mean):
    """Poisson pmf in log space; zero for negative ``m``."""
    m = np.asarray(m, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.exp(xlogy(m, mean) - mean - gammaln(np.maximum(m, 0.0) + 1.0))
    return np.where(m < 0, 0.0, out)


def _level0_direct(j, y):
    """Level-0 entry by its defining sum.

    Each term is the derivative ``pois(m-1; y) - pois(m; y)`` with
    ``m = j+1-r``; the ``m = 0`` term is exactly ``-exp(-y)`` so no
    ``y^-1`` ever appears.
    """
    r = np.arange(1, j + 2)
    m = j + 1 - r
    terms = (r / (j + 1.0)) * (_poisson_pmf(m - 1, y) - _poisson_pmf(m, y))
    return float(terms.sum())


def _recursion_matrix(n, inv_rho):
    """``M[j, r] = r/(j+1) pois(j+1-r; 1/rho)`` for ``j < n``, ``r <= n``."""
    p = _poisson_pmf(np.arange(n + 1), inv_rho)
    j = np.arange(n)[:, None]
    r = np.arange(n + 1)[None, :]
    m = j + 1 - r
    valid = (r >= 1) & (m >= 0)
    M = np.where(valid, r / (j + 1.0) * p[np.clip(m, 0, n)], 0.0)
    return M


@dataclass(frozen=True)
class SiroTable:
    """Recursion values ``h[j, k](offset)``; ``levels[k][j]``.

    Level ``k`` holds ``j = 0 .. j_max + k_max - k``.
    """

    levels: tuple
    offset: float
    j_max: int
    k_max: int

    def __getitem__(self, jk):
        j, k = jk
        return float(self.levels[k][j])


def siro_table(y, k_level, j_max, params):
    """Fill the recursion table bottom-up at offset ``y``.

    Level 0 is evaluated from its defining sum; levels ``k >= 1`` apply
    the recursion to the level below. Each level loses one index because
    entry ``j`` needs ``j + 1`` from the level beneath.
    """
    params.require_stable()
    inv_rho = params.a_mu
    if not (0.0 <= y < inv_rho):
        raise DomainError(f"siro_table: offset y={y!r} outside [0, {inv_rho})")
    if k_level < 0 or j_max < 0:
        raise DomainError("siro_table: k_level and j_max must be nonnegative")
    if j_max > J_CAP:
        raise TruncationError(f"siro_table: j_max={j_max} exceeds cap {J_CAP}")
    top = j_max + k_level
    level = np.array([_level0_direct(j, y) for j in range(top + 1)])
    levels = [level]
    M = _recursion_matrix(top, inv_rho)
    for k in range(1, k_level + 1):
        n = top - k + 1
        level = M[:n, :n + 1] @ levels[-1][:n + 1]
        levels.append(level)
    return SiroTable(tuple(levels), float(y), int(j_max), int(k_level))


class _SiroEngine:
    """Cached push-down coefficients ``c_k = v M^k`` with ``v_j = zeta0^j``.

    Then ``sum_j zeta0^j h[j, k](y) = sum_j c_k[j] h[j, 0](y)``, which needs
    only the closed level-0 form.
    """

    def __init__(self, params, tol):
        self.params = params
        self.z0 = zeta0(params)
        self.inv_rho = params.a_mu
        z = self.z0
        # smallest J with zeta0^J / ((J+1)(1-zeta0)) < tol
        J = 1
        while z ** J / ((J + 1) * (1.0 - z)) >= tol:
            J += 1
            if J > J_CAP:
                raise TruncationError(
                    f"siro: series in j needs more than {J_CAP} terms (zeta0={z:.6g}, tol={tol:g})")
        self.j_max = J
        self.coeffs = [z ** np.arange(J)]
        self._M = _recursion_matrix(2 * J + 64, self.inv_rho)

    def _matrix(self, n):
        if self._M.shape[0] < n:
            self._M = _recursion_matrix(max(n, 2 * self._M.shape[0]), self.inv_rho)
        return self._M[:n, :n + 1]

    def coeff(self, k):
        while len(self.coeffs) <= k:
            c = self.coeffs[-1]
            if c.size == 0:
                self.coeffs.append(c)
                continue
            nxt = c @ self._matrix(c.size)
            # drop a trailing block whose contribution is bounded by _TRIM_ABS
            tail = np.cumsum((np.abs(nxt) / (np.arange(nxt.size) + 1.0))[::-1])[::-1]
            keep = np.nonzero(tail >= _TRIM_ABS)[0]
            nxt = nxt[:keep[-1] + 1] if keep.size else nxt[:0]
            self.coeffs.append(nxt)
        return self.coeffs[k]

    def g(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        pos = x > 0
        lam, mu = self.params.lam, self.params.mu
        k = _lattice_index(x, lam)
        for kk in np.unique(k[pos]):
            sel = pos & (k == kk)
            c = self.coeff(int(kk))
            if c.size == 0:
                continue
            y = np.maximum(mu * x[sel] - kk * self.inv_rho, 0.0)
            j = np.arange(c.size)
            cdf = pdtr(j[:, None], y[None, :])
            out[sel] = mu * (1.0 - self.z0) * ((c / (j + 1.0)) @ cdf)
        return out[0] if scalar else out


@functools.lru_cache(maxsize=32)
def _engine(lam, mu, tol):
    return _SiroEngine(QueueParams(lam, mu), tol)


def siro_g(x, params, tol=1e-14):
    """Conditional density of the SIRO wait given it is positive.

    ``x`` may be a scalar or array. Lattice points take the cell to their
    right (offset 0).
    """
    params.require_stable()
    return _engine(params.lam, params.mu, tol).g(x)


def siro_density(params, tol=1e-14):
    """Vectorized continuous part ``zeta0 * g`` of the SIRO wait law."""
    eng = _engine(params.lam, params.mu, tol)
    z0 = eng.z0

    def density(x):
        return z0 * eng.g(x)

    return density


def siro_arc(x, params):
    """Closed form of the density on the first cell ``0 < x < a``."""
    params.require_stable()
    if not (0.0 < x < params.a):
        raise DomainError(f"siro_arc: x={x!r} outside (0, {params.a})")
    z = zeta0(params)
    c = params.mu * (1.0 - z)
    return c * (exp_integral(c * x) - exp_integral(params.mu * x))


def siro_distribution(params, tol=1e-14):
    z = zeta0(params)
    return MixedDistribution(1.0 - z, siro_density(params, tol), spacing=params.a,
                             has_kinks=True, label="siro")


def siro_moments(params):
    z = zeta0(params)
    zp = zeta0_prime_s(params)
    mu = params.mu
    q2 = (mu * (1.0 - z)) ** 2
    d = 2.0 - mu * zp
    return MomentSummary(
        mean=z / (mu * (1.0 - z)),
        variance=z * (4.0 - 2.0 * z - 4.0 * mu * zp + mu * z * zp) / (q2 * d),
        mean_pos=1.0 / (mu * (1.0 - z)),
        variance_pos=(2.0 - 3.0 * mu * zp) / (q2 * d),
    )


def b_function(s, z, params):
    """``B(s, z) = mu(1-zeta0)/(1-z) * (1 - exp(-a q)) / q``, ``q = s + mu - mu z``."""
    if not z < 1.0:
        raise DomainError(f"b_function: need z < 1, got {z!r}")
    z0 = zeta0(params)
    q = s + params.mu - params.mu * z
    return params.mu * (1.0 - z0) / (1.0 - z) * (-math.expm1(-params.a * q)) / q


def b_partial_z(s, z, params):
    """Analytic ``dB/dz``."""
    if not z < 1.0:
        raise DomainError(f"b_partial_z: need z < 1, got {z!r}")
    z0 = zeta0(params)
    a, mu = params.a, params.mu
    q = s + mu - mu * z
    em = -math.expm1(-a * q)  # 1 - exp(-a q)
    ratio = em / q
    dratio_dq = (a * math.exp(-a * q) * q - em) / (q * q)
    return mu * (1.0 - z0) * (ratio / (1.0 - z) ** 2 - mu * dratio_dq / (1.0 - z))


def phi_numeric(s, params, tol=1e-7):
    """Transform of the conditional SIRO density by nested quadrature.

    ``Phi(s) = B(s, zeta0) - int_{zeta(s)}^{zeta0} exp(-I(u)) dB/du du`` with
    ``I(u) = int_u^{zeta0} dv / D(v)``, ``D(v) = v - exp(-a(mu + s - mu v))``.
    ``D`` has a simple zero at ``zeta(s)``, so ``I`` diverges
    logarithmically there. The log part is integrated exactly:
    ``exp(-I(u)) = ((u - zeta(s)) / (zeta0 - zeta(s)))^(1/D') * exp(-R(u))``
    with ``R`` the integral of the smooth remainder.
    """
    params.require_stable()
    if not s >= 0.0:
        raise DomainError(f"phi_numeric: need s >= 0, got {s!r}")
    a, mu = params.a, params.mu
    z0 = zeta0(params)
    zs = zeta(s, params)
    b0 = b_function(s, z0, params)
    if z0 - zs <= 0.0:
        return b0
    am = a * mu
    d1 = 1.0 - am * zs  # D'(zeta(s))
    expo = 1.0 / d1
    width = z0 - zs

    def smooth(v):
        # D(v) = t - zeta(s) expm1(x) with t = v - zeta(s), x = a mu t, so
        # 1/D - 1/(D' t) = zeta(s) (expm1(x) - x) / (D D' t)
        t = v - zs
        x = am * t
        if abs(x) < 1e-3:
            sx = 0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0))  # (expm1(x) - x) / x^2
            return zs * am * am * sx / ((d1 - zs * am * x * sx) * d1)
        dv = t - zs * math.expm1(x)
        return zs * (math.expm1(x) - x) / (dv * d1 * t)

    inner_tol = min(1e-9, tol * 1e-2)

    def weight(u):
        r, err = integrate.quad(smooth, u, z0, epsabs=inner_tol, epsrel=1e-12, limit=200)
        if err > 10 * inner_tol:
            raise ConvergenceError(f"phi_numeric: inner integral error {err:.2e} at u={u!r}")
        return ((u - zs) / width) ** expo * math.exp(-r)

    val, err = integrate.quad(lambda u: weight(u) * b_partial_z(s, u, params), zs, z0,
                              epsabs=tol * 1e-2, epsrel=1e-12, limit=200)
    if err > tol:
        raise ConvergenceError(f"phi_numeric: outer integral error {err:.2e} > {tol:.2e}")
    return b0 - val


@dataclass(frozen=True)
class TransformCheck:
    s: float
    lhs: float  # numeric transform of zeta0 * g
    rhs: float  # zeta0 * Phi(s)
    diff: float


def verify_transform(s_grid, params, tol=1e-8):
    """Compare the recursion density's Laplace transform with ``zeta0 Phi(s)``."""
    z0 = zeta0(params)
    dens = siro_density(params)
    f = lambda t: float(dens(t))
    bps = [k * params.a for k in range(1, 9)]
    out = []
    for s in s_grid:
        if not s > 0:
            raise DomainError(f"verify_transform: s must be positive, got {s!r}")
        lhs = laplace_numeric(f, s, bps, mass=z0, tol=tol)
        rhs = z0 * phi_numeric(s, params)
        out.append(TransformCheck(float(s), lhs, rhs, lhs - rhs))
    return out
