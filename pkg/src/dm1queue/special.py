"""Real Lambert W branches, the exponential integral E1 and a piecewise
numerical Laplace transform.

Everything here is scalar and dependency-light on purpose: the queue
formulas call these in tight loops and need predictable accuracy near
the branch point ``-1/e``.
"""
import enum
import math

from scipy import integrate

from .errors import ConvergenceError, DomainError

__all__ = ["Branch", "lambert", "exp_integral", "laplace_numeric"]

_INV_E = math.exp(-1.0)
_EULER_GAMMA = 0.57721566490153286061


class Branch(enum.Enum):
    """Real branches of the Lambert W function.

    ``PRINCIPAL`` is the branch with ``w >= -1`` on ``[-1/e, inf)``;
    ``SECONDARY`` is the branch with ``w <= -1`` on ``[-1/e, 0)``
    (``k = -1`` in the usual numbering).
    """

    PRINCIPAL = 0
    SECONDARY = -1


def _branch_point_series(p):
    # w = -1 + p - p^2/3 + 11/72 p^3 - 43/540 p^4 + 769/17280 p^5, p = +-sqrt(2(ex+1))
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * 769.0 / 17280.0))))


def lambert(x, branch=Branch.PRINCIPAL, max_iter=50):
    """Solve ``w * exp(w) = x`` on a real branch by Halley iteration.

    Parameters
    ----------
    x : float
        Argument. ``x >= -1/e`` for the principal branch,
        ``-1/e <= x < 0`` for the secondary one.
    branch : Branch
        Which real branch to return.
    max_iter : int
        Iteration cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    float
        ``w >= -1`` (principal) or ``w <= -1`` (secondary).
    """
    branch = Branch(branch)
    x = float(x)
    if math.isnan(x):
        raise DomainError("lambert: x is NaN")
    # tolerate a few ulps below -1/e from callers computing -b*exp(-b)
    excess = math.e * x + 1.0
    if excess < -1e-15:
        raise DomainError(f"lambert: x={x!r} < -1/e")
    excess = max(excess, 0.0)
    if branch is Branch.SECONDARY and x >= 0.0:
        raise DomainError(f"lambert: secondary branch needs x < 0, got {x!r}")
    if math.isinf(x):
        return math.inf

    sign = 1.0 if branch is Branch.PRINCIPAL else -1.0
    if excess < 1e-6:
        # truncation error ~0.03 p^6 < 1e-18 here
        return _branch_point_series(sign * math.sqrt(2.0 * excess))
    if branch is Branch.PRINCIPAL and x == 0.0:
        return 0.0

    if x < -0.25:
        w = _branch_point_series(sign * math.sqrt(2.0 * excess))
    elif branch is Branch.PRINCIPAL:
        if x < 3.0:
            w = math.log1p(x)
        else:
            l1 = math.log(x)
            w = l1 - math.log(l1)
    else:
        l1 = math.log(-x)
        w = l1 - math.log(-l1)

    prev = math.inf
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        dw = f / denom
        if abs(dw) >= prev and abs(dw) <= 1e-12 * (1.0 + abs(w)):
            # step no longer shrinks: rounding floor reached
            return w
        w -= dw
        prev = abs(dw)
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            return w
    raise ConvergenceError(f"lambert: no convergence for x={x!r} on {branch.name}")


def exp_integral(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``.

    A power series is used below 1 and a Lentz continued fraction above.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"exp_integral: need x > 0, got {x!r}")
    if x < 1.0:
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            add = term / k
            total += add
            if abs(add) < 1e-17 * abs(total) or k > 200:
                break
            k += 1
        return -_EULER_GAMMA - math.log(x) - total
    if x > 745.0:
        return 0.0
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError(f"exp_integral: continued fraction stalled at x={x!r}")


def laplace_numeric(f, s, breakpoints, mass=None, envelope=None, tol=1e-8,
                    tail_tol=1e-10, max_panels=100_000):
    """Laplace transform ``int_0^inf exp(-s x) f(x) dx`` of a density.

    The half line is cut at ``breakpoints`` (kinks of ``f``); past the last
    breakpoint panels of the final spacing are appended until a certified
    bound on the remainder drops below ``tail_tol``. At least one bound must
    be supplied:

    * ``mass`` -- the exact total integral of ``f >= 0``; the remainder is
      then at most ``exp(-s X) * (mass - int_0^X f)``.
    * ``envelope=(scale, rate)`` -- ``f(x) <= scale * exp(-rate x)`` for all
      ``x`` past the last breakpoint.

    Raises
    ------
    ConvergenceError
        If a panel misses its error budget or the tail never certifies.
    """
    if not s >= 0.0:
        raise DomainError(f"laplace_numeric: need s >= 0, got {s!r}")
    if mass is None and envelope is None:
        raise DomainError("laplace_numeric: supply mass= or envelope= for the tail bound")
    edges = [0.0] + [float(b) for b in breakpoints if b > 0.0]
    if any(b1 <= b0 for b0, b1 in zip(edges, edges[1:])):
        raise DomainError("laplace_numeric: breakpoints must be strictly increasing")
    step = edges[-1] - edges[-2] if len(edges) > 1 else 1.0

    panel_tol = min(tol, 1e-10) * 1e-3
    total = 0.0
    partial_mass = 0.0
    err_sum = 0.0

    def tail_bound(x_end):
        bounds = []
        if mass is not None:
            bounds.append(math.exp(-s * x_end) * max(mass - partial_mass, 0.0) + err_sum)
        if envelope is not None and x_end >= edges[-1]:
            scale, rate = envelope
            if s + rate > 0.0:
                bounds.append(scale * math.exp(-(s + rate) * x_end) / (s + rate))
        return min(bounds) if bounds else math.inf

    i = 0
    lo = edges[0]
    while True:
        if i + 1 < len(edges):
            hi = edges[i + 1]
        else:
            hi = lo + step
        val, err = integrate.quad(lambda t: math.exp(-s * t) * f(t), lo, hi,
                                  epsabs=panel_tol, epsrel=1e-13, limit=200)
        if err > 10 * panel_tol + 1e-13 * abs(val):
            raise ConvergenceError(f"laplace_numeric: panel [{lo}, {hi}] error {err:.2e}")
        total += val
        err_sum += err
        if mass is not None:
            m, merr = integrate.quad(f, lo, hi, epsabs=panel_tol, epsrel=1e-13, limit=200)
            partial_mass += m
            err_sum += merr
        i += 1
        lo = hi
        if i >= len(edges) - 1 and tail_bound(hi) < tail_tol:
            break
        if i > max_panels:
            raise ConvergenceError("laplace_numeric: tail bound not certified within panel cap")
    if err_sum > tol:
        raise ConvergenceError(f"laplace_numeric: accumulated error {err_sum:.2e} > {tol:.2e}")
    return total

