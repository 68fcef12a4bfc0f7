"""Mixed waiting-time laws: an atom at zero plus a continuous density.

The three service policies share this container. Analytic moments come
from each policy module; the numeric methods here (mass, moments, CDF,
transform) exist as independent cross-checks and for the simulator's
goodness-of-fit tests.
"""
from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import ConvergenceError
from .special import laplace_numeric

__all__ = ["MixedDistribution", "MomentSummary"]

# Gauss-Legendre nodes on [-1, 1] for panel integration of smooth pieces
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class MomentSummary:
    """Waiting-time moments; ``*_pos`` are conditional on a positive wait."""

    mean: float
    variance: float
    mean_pos: float
    variance_pos: float


@dataclass(frozen=True)
class MixedDistribution:
    """``atom_at_zero * delta(x) + density(x)`` on ``x >= 0``.

    Attributes
    ----------
    atom_at_zero : float
        Probability of a zero wait.
    density : callable
        Vectorized continuous part on ``x > 0``; integrates to
        ``1 - atom_at_zero``.
    spacing : float
        Panel width for numeric work. For lattice policies this is the
        interarrival time ``a`` and every multiple of it is a kink.
    has_kinks : bool
        Whether multiples of ``spacing`` are genuine breakpoints.
    label : str
        Policy name, for reports.
    """

    atom_at_zero: float
    density: Callable[[np.ndarray], np.ndarray]
    spacing: float
    has_kinks: bool = True
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def continuous_mass(self):
        return 1.0 - self.atom_at_zero

    def support_breakpoints(self, x_max):
        """Kink locations in ``(0, x_max]``; empty for a smooth density."""
        if not self.has_kinks:
            return []
        n = int(math.floor(x_max / self.spacing + 1e-9))
        return [k * self.spacing for k in range(1, n + 1)]

    def _panels(self, tail_tol=1e-16, max_panels=20_000):
        """Per-panel Gauss-Legendre masses and first two raw moments.

        Panels are added until a panel carries less than ``tail_tol`` and the
        unaccounted continuous mass is below 1e-11 (the rounding floor of the
        accumulated sum). Cached because CDF tables and moments reuse it.
        """
        key = ("panels", tail_tol)
        if key in self._cache:
            return self._cache[key]
        h = self.spacing
        rows = []
        acc = 0.0
        k = 0
        while True:
            lo = k * h
            x = lo + 0.5 * h * (_GL_X + 1.0)
            w = 0.5 * h * _GL_W
            fx = np.asarray(self.density(x), dtype=float)
            m0 = float(np.dot(w, fx))
            rows.append((lo, lo + h, m0, float(np.dot(w, x * fx)), float(np.dot(w, x * x * fx))))
            acc += m0
            k += 1
            if m0 < tail_tol and self.continuous_mass - acc < 1e-11:
                break
            if k > max_panels:
                raise ConvergenceError(f"{self.label}: density tail not exhausted in {max_panels} panels")
        arr = np.array(rows)
        self._cache[key] = arr
        return arr

    def numeric_mass(self):
        """Atom plus quadrature of the density; should be 1."""
        return self.atom_at_zero + float(self._panels()[:, 2].sum())

    def numeric_moments(self):
        """Quadrature moments, independent of any closed form."""
        p = self._panels()
        m0, m1, m2 = (float(p[:, i].sum()) for i in (2, 3, 4))
        mean = m1
        var = m2 - m1 * m1
        mean_pos = m1 / m0
        var_pos = m2 / m0 - mean_pos * mean_pos
        return MomentSummary(mean, var, mean_pos, var_pos)

    def numeric_mass_adaptive(self, tol=1e-12):
        """Adaptive-quadrature mass with breakpoints at every kink."""
        p = self._panels()
        total = 0.0
        for lo, hi, _, _, _ in p:
            val, _ = integrate.quad(lambda t: float(self.density(np.array([t]))[0]), lo, hi,
                                    epsabs=tol, epsrel=1e-13, limit=200)
            total += val
        return self.atom_at_zero + total

    def positive_cdf(self, x, points_per_panel=64):
        """CDF of the wait conditional on being positive, at points ``x``.

        Built from a fine cumulative table (Gauss-Legendre on sub-panels)
        and linear interpolation; accurate to ~1e-7, which is ample for
        Kolmogorov-Smirnov comparisons with sampled data.
        """
        key = ("cdf", points_per_panel)
        if key not in self._cache:
            p = self._panels(tail_tol=1e-12)
            x_end = p[-1, 1]
            grid = np.linspace(0.0, x_end, int(round(x_end / self.spacing)) * points_per_panel + 1)
            lo, hi = grid[:-1], grid[1:]
            half = 0.5 * (hi - lo)
            nodes = lo[:, None] + half[:, None] * (_GL_X[None, :] + 1.0)
            vals = np.asarray(self.density(nodes.ravel()), dtype=float).reshape(nodes.shape)
            pieces = half * (vals @ _GL_W)
            cum = np.concatenate([[0.0], np.cumsum(pieces)]) / self.continuous_mass
            self._cache[key] = (grid, cum)
        grid, cum = self._cache[key]
        return np.interp(np.asarray(x, dtype=float), grid, cum, right=1.0)

    def transform(self, s, tol=1e-8):
        """``F(s) = atom + int_0^inf exp(-s x) density(x) dx`` numerically."""
        f = lambda t: float(self.density(np.array([t]))[0])
        if self.has_kinks:
            bps = self.support_breakpoints(self.spacing * 8)
        else:
            bps = [self.spacing]
        return self.atom_at_zero + laplace_numeric(f, s, bps, mass=self.continuous_mass, tol=tol)

    def continuous_transform(self, s, tol=1e-8):
        return self.transform(s, tol=tol) - self.atom_at_zero
