"""D/M/n with ``n`` slow servers, each serving at rate ``mu/n``.

``zeta0`` is the single-server root at ``(lam, mu)``; it is not recomputed
per server.
"""
from dataclasses import dataclass
import math

from .core import zeta0
from .errors import DomainError, ResonanceError

__all__ = ["SlowServerMetrics", "q_factor", "log_q_factor", "delta_n", "slow_server_metrics",
           "slow_server_table"]


@dataclass(frozen=True)
class SlowServerMetrics:
    n: int
    m_n: float  # expected wait
    p_n: float  # probability of no wait
    delta_n: float


def _check_int(name, v, low):
    if isinstance(v, bool) or int(v) != v or v < low:
        raise DomainError(f"{name} must be an integer >= {low}, got {v!r}")
    return int(v)


def log_q_factor(j, x, params):
    """``log Q_j(x)``, ``Q_j(x) = prod_{i<=j} (1 - e^{-a i x}) / e^{-a i x}``."""
    j = _check_int("j", j, 1)
    if not x > 0:
        raise DomainError(f"q_factor: need x > 0, got {x!r}")
    a = params.a
    # each factor is e^{a i x} - 1
    return math.fsum(math.log(math.expm1(a * i * x)) for i in range(1, j + 1))


def q_factor(j, x, params):
    lq = log_q_factor(j, x, params)
    if lq > 709.0:
        raise OverflowError(f"Q_{j}({x}) exceeds double range (log = {lq:.1f})")
    return math.exp(lq)


def _signed_terms(n, x, params, z):
    a = params.a
    out = []
    for j in range(1, n + 1):
        den = n * (1.0 - z) - j
        if abs(den) < 1e-12:
            raise ResonanceError(f"n(1 - zeta0) - j vanishes at n={n}, j={j}")
        e = -math.expm1(-a * j * x)  # 1 - e^{-a j x}
        num = n * e - j
        if num == 0.0:
            continue
        log_mag = (math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
                   + log_q_factor(j, x, params) - math.log(e)
                   + math.log(abs(num)) - math.log(abs(den)))
        sign = 1.0 if (num > 0) == (den > 0) else -1.0
        out.append((sign, log_mag))
    return out


def delta_n(n, x, params):
    """``Delta_n(x)``; only ``x = mu/n`` has a queueing meaning."""
    n = _check_int("n", n, 1)
    if not x > 0:
        raise DomainError(f"delta_n: need x > 0, got {x!r}")
    z = zeta0(params)
    terms = [(1.0, -math.log1p(-z))] + _signed_terms(n, x, params, z)
    shift = max(lm for _, lm in terms)
    total = math.fsum(sgn * math.exp(lm - shift) for sgn, lm in terms)
    if total <= 0.0:
        raise DomainError(f"delta_n: bracket is not positive at n={n}, x={x!r}")
    return math.exp(-shift - math.log(total))


def slow_server_metrics(n, params):
    n = _check_int("n", n, 1)
    z = zeta0(params)
    d = delta_n(n, params.mu / n, params)
    return SlowServerMetrics(n, d / (params.mu * (1.0 - z) ** 2), 1.0 - d / (1.0 - z), d)


def slow_server_table(n_max, params):
    return [slow_server_metrics(n, params) for n in range(1, n_max + 1)]
