import math

import numpy as np
from numpy.testing import assert_allclose
import pytest
from scipy.signal import lfilter

from dm1queue import QueueParams, DomainError, StabilityError, zeta0
from dm1queue.lifo import (lifo_distribution, lifo_fragment, lifo_moments, lifo_transform,
                           theta_atoms)
from dm1queue.special import laplace_numeric

ZETA0 = 0.41718835
# 40-digit values at lam=2, mu=3
FRAG2_AT_1P2 = 0.036933209878059113
CONT_TRANSFORM_AT_ONE = 0.29699881156505969


def _integrate_delay_ode(params, x_end, h=1e-5):
    """March f' = -mu f + mu sum_k w_k f(x - a k) on a grid aligned with the lattice.

    Each atom of theta at ``a k`` makes the density jump by ``-mu zeta0 w_k``
    (the atom of theta convolved with the atom of f at 0 and with -delta).
    Left and right limits are kept at lattice points. Between lattice points
    the linear ODE is stepped exactly in the homogeneous part with trapezoid
    forcing, so the error is O(h^2).
    """
    mu, a = params.mu, params.a
    z = zeta0(params)
    w = theta_atoms(params).weights
    m = int(round(a / h))
    cells = int(math.ceil(x_end / a))
    decay = math.exp(-mu * h)
    fl = np.zeros((cells, m + 1))  # left limits; column 0 unused
    fr = np.zeros((cells, m + 1))  # right limits; column m unused
    start = mu * z
    for c in range(cells):
        forcing_l = np.zeros(m + 1)
        forcing_r = np.zeros(m + 1)
        for k in range(1, c + 1):
            forcing_r += w[k - 1] * fr[c - k]
            forcing_l += w[k - 1] * fl[c - k]
        # at the cell's left edge use the right limit, at its right edge the left limit
        s_r = mu * forcing_r[:-1]
        s_l = mu * forcing_l[1:]
        u = 0.5 * h * (decay * s_r + s_l)
        y = lfilter([1.0], [1.0, -decay], u, zi=[decay * start])[0]
        fr[c, 0] = start
        fr[c, 1:m] = y[:-1]
        fl[c, 1:] = y
        if c + 1 < cells:
            start = y[-1] - mu * z * w[c]
    # f_l(0) must be 0 for the shifted copy k=c at the cell start
    fl[0, 0] = 0.0
    grid = a * (np.arange(cells)[:, None] + np.arange(m + 1)[None, :] / m)
    return grid, fl, fr


@pytest.fixture(scope="module")
def ode_solution():
    return _integrate_delay_ode(QueueParams(2.0, 3.0), 2.0)


def test_theta_atoms(params):
    t = theta_atoms(params)
    assert_allclose(t.weights[0], math.exp(-1.5), rtol=1e-14)
    assert_allclose(t.weights[1], math.exp(-3.0) * 1.5, rtol=1e-14)
    assert np.all(t.weights > 0)
    assert abs(math.fsum(t.weights) - zeta0(params)) < 1e-10
    assert_allclose(t.locations[:3], [0.5, 1.0, 1.5])
    with pytest.raises(DomainError):
        theta_atoms(params, tol=0.0)


def test_fragments(params):
    assert_allclose(lifo_fragment(0, 1e-12, params), 3 * ZETA0, rtol=1e-7)
    assert abs(lifo_fragment(1, 0.5 + 1e-13, params)) < 1e-11
    x = 1.2
    expected = 0.5 * 27 * zeta0(params) * x * (x - 1.0) * math.exp(-3 * x)
    assert_allclose(lifo_fragment(2, x, params), expected, rtol=1e-14)
    assert_allclose(lifo_fragment(2, x, params), FRAG2_AT_1P2, rtol=1e-14)
    with pytest.raises(DomainError):
        lifo_fragment(2, 0.9, params)
    with pytest.raises(DomainError):
        lifo_fragment(1.5, 0.9, params)


def test_fragment_log_space_continuity():
    # a cell past the log-space switch agrees with direct arithmetic
    p = QueueParams(2.0, 2.4)
    k = 25
    x = (k + 0.4) * p.a
    direct = (p.mu ** (k + 1) * zeta0(p) * x ** (k - 1) * (x - k * p.a) * math.exp(-p.mu * x)
              / math.factorial(k))
    assert_allclose(lifo_fragment(k, x, p), direct, rtol=1e-12)


def test_fragment_against_delay_ode(params, ode_solution):
    grid, fl, fr = ode_solution
    m = grid.shape[1] - 1
    dens = lifo_distribution(params).density
    for x in (0.25, 0.75, 1.2, 1.7):
        c, i = int(x / params.a), int(round((x / params.a % 1) * m))
        assert abs(fr[c, i] - dens(x)) < 1e-8
    # right limits at the lattice come out zero without being imposed
    for c in range(1, grid.shape[0]):
        assert abs(fr[c, 0]) < 1e-9


def test_delay_ode_residual(params):
    """Closed-form fragments satisfy f' = -mu f + mu sum_k w_k f(x - a k) inside cells."""
    mu, a = params.mu, params.a
    z = zeta0(params)
    w = theta_atoms(params).weights
    dens = lifo_distribution(params).density

    def deriv(x):
        k = int(x / a)
        c = mu ** (k + 1) * z / math.factorial(k) * math.exp(-mu * x)
        if k == 0:
            return -mu * mu * z * math.exp(-mu * x)
        gap = x - k * a
        return c * ((k - 1) * x ** (k - 2) * gap + x ** (k - 1) - mu * x ** (k - 1) * gap)

    xs = np.linspace(0.01, 4.0, 200)
    xs = xs[np.abs(xs / a - np.round(xs / a)) > 1e-3]
    for x in xs:
        k = int(x / a)
        rhs = -mu * dens(x) + mu * sum(w[j - 1] * dens(x - j * a) for j in range(1, k + 1))
        assert abs(deriv(x) - rhs) < 1e-10


def test_distribution(params):
    d = lifo_distribution(params)
    assert_allclose(d.density(0.25), 3 * ZETA0 * math.exp(-0.75), rtol=1e-7)
    for k in range(1, 6):
        assert abs(d.density(k * params.a)) <= 1e-12
        assert abs(d.density(k * params.a + 1e-14)) <= 1e-12
    assert d.density(0.0) == 0.0 and d.density(-1.0) == 0.0
    assert abs(d.numeric_mass() - 1.0) < 1e-8
    assert_allclose(d.support_breakpoints(1.6), [0.5, 1.0, 1.5])


def test_transform_against_quadrature(params):
    d = lifo_distribution(params)
    f = lambda x: float(d.density(x))
    bps = [k * params.a for k in range(1, 9)]
    num = laplace_numeric(f, 1.0, bps, mass=d.continuous_mass)
    closed = lifo_transform(1.0, params) - d.atom_at_zero
    assert abs(num - closed) < 1e-8
    assert abs(closed - CONT_TRANSFORM_AT_ONE) < 1e-12


def test_moments(params):
    m = lifo_moments(params)
    assert_allclose([m.mean, m.variance, m.mean_pos, m.variance_pos],
                    [0.23860673, 0.67242217, 0.57194007, 1.42114846], atol=1e-7)
    nm = lifo_distribution(params).numeric_moments()
    assert abs(nm.mean - m.mean) < 1e-7
    assert abs(nm.variance - m.variance) < 1e-6


def test_unstable():
    with pytest.raises(StabilityError):
        lifo_distribution(QueueParams(3.0, 2.0))
