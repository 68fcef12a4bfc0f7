import math

import numpy as np
from numpy.testing import assert_allclose
import pytest
from hypothesis import given, settings, strategies as st

from dm1queue import QueueParams, StabilityError, DomainError
from dm1queue.core import mu_zeta0_deriv_a, root_data, zeta, zeta0, zeta0_prime_s

ZETA0 = 0.41718835
ZETA0_PRIME = -0.55741433
# 40-digit bisection of z = exp(-a (mu + 1 - mu z)) at lam=2, mu=3
ZETA_AT_ONE = 0.17630435983490473


def test_zeta0_reference(params):
    assert abs(zeta0(params) - ZETA0) < 1e-7
    assert abs(zeta0_prime_s(params) - ZETA0_PRIME) < 1e-7


def test_zeta0_fixed_point_oracle(params):
    z = 0.5
    for _ in range(200):
        z = math.exp(-params.a_mu * (1.0 - z))
    assert_allclose(zeta0(params), z, atol=1e-10)


def test_zeta0_heavy_service():
    p = QueueParams(1.0, 50.0)
    assert_allclose(zeta0(p), math.exp(-50.0), rtol=1e-6)


def test_zeta0_prime_finite_difference(params):
    h = 1e-6
    fd = (zeta(h, params) - zeta(0.0, params)) / h
    assert abs(fd - zeta0_prime_s(params)) < 1e-4
    rd = root_data(params)
    assert rd.zeta0 == zeta0(params) and rd.zeta0_prime_s == zeta0_prime_s(params)


def test_zeta_values(params):
    assert zeta(0.0, params) == zeta0(params)
    lo, hi = 1e-9, 1.0 - 1e-9
    f = lambda z: z - math.exp(-params.a * (params.mu + 1.0 - params.mu * z))
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    assert_allclose(zeta(1.0, params), 0.5 * (lo + hi), atol=1e-12)
    assert_allclose(zeta(1.0, params), ZETA_AT_ONE, atol=1e-15)


def test_zeta_huge_s(params):
    assert_allclose(zeta(2000.0, params), math.exp(-1.5 - 1000.0), rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=20.0), st.floats(min_value=1.01, max_value=30.0))
def test_zeta_residual_on_grid(lam, ratio):
    p = QueueParams(lam, lam * ratio)
    zs = [zeta(s, p) for s in np.arange(0.0, 10.01, 0.1)]
    for s, z in zip(np.arange(0.0, 10.01, 0.1), zs):
        assert 0.0 < z < 1.0
        assert abs(z - math.exp(-p.a * (p.mu + s - p.mu * z))) <= 1e-12
    assert all(np.diff(zs) < 0)


def test_mu_zeta0_deriv_a(params):
    z = ZETA0
    closed = -9.0 * z * (1 - z) / (1 - 1.5 * z)
    assert_allclose(mu_zeta0_deriv_a(params), closed, atol=1e-6)
    h = 1e-6
    f = lambda a: 3.0 * zeta0(QueueParams.from_interarrival(a, 3.0))
    fd = (f(0.5 + h) - f(0.5 - h)) / (2 * h)
    assert abs(fd - mu_zeta0_deriv_a(params)) < 1e-5


def test_params_validation(params):
    assert params.a == 0.5 and params.rho == 2.0 / 3.0 and params.a_mu == 1.5
    for bad in [(0.0, 1.0), (-1.0, 1.0), (1.0, math.inf), (math.nan, 1.0)]:
        with pytest.raises(DomainError):
            QueueParams(*bad)
    with pytest.raises(StabilityError):
        zeta0(QueueParams(3.0, 3.0))
    with pytest.raises(StabilityError):
        zeta(1.0, QueueParams(4.0, 3.0))
    with pytest.raises(DomainError):
        zeta(-0.1, params)
    assert isinstance(StabilityError("x"), ValueError)
