"""D/M/1 parameters and the root ``zeta0`` that governs every equilibrium
quantity.

``zeta(s)`` solves ``z = exp(-a (mu + s - mu z))``; it is evaluated through
the principal Lambert branch,

    zeta(s) = -rho * W(-(1/rho) * exp(-1/rho - a s)),

and ``zeta0 = zeta(0)``.
"""
from dataclasses import dataclass
import math

from .errors import DomainError, StabilityError
from .special import Branch, lambert

__all__ = [
    "QueueParams",
    "RootData",
    "zeta0",
    "zeta0_prime_s",
    "zeta",
    "root_data",
    "mu_zeta0_deriv_a",
]


@dataclass(frozen=True)
class QueueParams:
    """Arrival rate ``lam`` and service rate ``mu`` of a D/M/1 queue.

    The interarrival constant ``a = 1/lam`` and intensity ``rho = lam/mu``
    are derived. Construction does not require ``rho < 1`` because the
    simulator also runs transient (unstable) systems; analytic routines
    call :meth:`require_stable`.
    """

    lam: float
    mu: float

    def __post_init__(self):
        for name in ("lam", "mu"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))

    @classmethod
    def from_interarrival(cls, a, mu):
        if not a > 0:
            raise DomainError(f"interarrival time must be positive, got {a!r}")
        return cls(1.0 / a, mu)

    @property
    def a(self):
        return 1.0 / self.lam

    @property
    def rho(self):
        return self.lam / self.mu

    @property
    def a_mu(self):
        """``a * mu = 1/rho``, the mean number of services per interarrival."""
        return self.mu / self.lam

    def require_stable(self):
        if not self.a_mu > 1.0:
            raise StabilityError(
                f"equilibrium needs rho < 1, got rho={self.rho!r} (lam={self.lam}, mu={self.mu})")
        return self


@dataclass(frozen=True)
class RootData:
    zeta0: float
    zeta0_prime_s: float


def _zeta0_from_amu(a_mu):
    if not a_mu > 1.0:
        raise StabilityError(f"equilibrium needs a*mu > 1, got {a_mu!r}")
    if a_mu > 700.0:
        # W(x) = x - x^2 + ... for tiny x; zeta0 ~ exp(-a mu) underflows anyway
        return math.exp(-a_mu)
    w = lambert(-a_mu * math.exp(-a_mu), Branch.PRINCIPAL)
    return -w / a_mu


def zeta0(params):
    """Root in (0, 1) of ``z = exp(-a mu (1 - z))``."""
    params.require_stable()
    return _zeta0_from_amu(params.a_mu)


def zeta0_prime_s(params):
    """``d zeta / d s`` at ``s = 0``, equal to ``-a zeta0 / (1 - a mu zeta0)``."""
    z = zeta0(params)
    return -params.a * z / (1.0 - params.a_mu * z)


def root_data(params):
    z = zeta0(params)
    return RootData(z, -params.a * z / (1.0 - params.a_mu * z))


def zeta(s, params):
    """Solution of ``z = exp(-a (mu + s - mu z))`` for ``s >= 0``."""
    params.require_stable()
    if not s >= 0.0:
        raise DomainError(f"zeta: need s >= 0, got {s!r}")
    if s == 0.0:
        return zeta0(params)
    inv_rho = params.a_mu
    # log of the Lambert argument magnitude; below ~-700 W(x) = x to double precision
    log_arg = math.log(inv_rho) - inv_rho - params.a * s
    if log_arg < -700.0:
        return math.exp(-inv_rho - params.a * s)
    w = lambert(-math.exp(log_arg), Branch.PRINCIPAL)
    return -params.rho * w


def mu_zeta0_deriv_a(params):
    """Derivative of ``mu * zeta0`` with respect to ``a`` at fixed ``mu``.

    Closed form ``-mu^2 zeta0 (1 - zeta0) / (1 - a mu zeta0)``; always
    negative because spacing arrivals further apart lowers congestion.
    """
    z = zeta0(params)
    mu = params.mu
    return -mu * mu * z * (1.0 - z) / (1.0 - params.a_mu * z)
