import math

import numpy as np
import pytest

from corrsv.densities import marginal_pdf
from corrsv.quadrature import QuadratureError, quad_1d, quad_2d


def test_exponential():
    v, err = quad_1d(lambda x: np.exp(-x), 0, 50, tol=1e-12)
    assert v == pytest.approx(1 - math.exp(-50), abs=1e-12)
    assert err <= 1e-12 * max(1, abs(v))


def test_gamma_two():
    v, _ = quad_1d(lambda x: x * np.exp(-x), 0, 50, tol=1e-12)
    assert v == pytest.approx(1 - 51 * math.exp(-50), abs=1e-12)


def test_marginal_normalization():
    v, _ = quad_1d(lambda a: marginal_pdf(a, 2, 3), 0, 50, tol=1e-10)
    assert v == pytest.approx(1.0, abs=1e-8)


def test_polynomial_is_exact():
    # a 21-point Kronrod rule integrates degree-31 polynomials exactly
    v, _ = quad_1d(lambda x: x**9 - 3 * x**4, -1, 2, tol=1e-12)
    assert v == pytest.approx((2**10 - 1) / 10 - 3 * (2**5 + 1) / 5, rel=1e-14)


def test_endpoint_singularity_of_sqrt():
    v, _ = quad_1d(np.sqrt, 0, 1, tol=1e-10)
    assert v == pytest.approx(2 / 3, rel=1e-10)


def test_vector_valued_integrand():
    ks = np.arange(4)[:, None]
    v, err = quad_1d(lambda x: x**ks * np.exp(-x), 0, 60, tol=1e-12)
    np.testing.assert_allclose(v, [1, 1, 2, 6], rtol=1e-11)
    assert err.shape == (4,)


def test_reversed_and_empty_interval():
    v, _ = quad_1d(lambda x: np.ones_like(x), 2, 1, tol=1e-12)
    assert v == pytest.approx(-1.0)
    assert quad_1d(np.exp, 1.0, 1.0) == (0.0, 0.0)


def test_tolerance_floor():
    with pytest.raises(ValueError):
        quad_1d(np.exp, 0, 1, tol=1e-13)


def test_non_convergence_carries_partial_estimate():
    with pytest.raises(QuadratureError) as info:
        quad_1d(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0, 1, tol=1e-12, max_intervals=50)
    assert np.isfinite(info.value.value)
    assert info.value.err_est > 0


def test_halving_tolerance_is_self_consistent():
    f = lambda x: np.exp(-x) * np.cos(3 * x) ** 2
    v1, e1 = quad_1d(f, 0, 40, tol=1e-6)
    v2, _ = quad_1d(f, 0, 40, tol=5e-7)
    assert abs(v1 - v2) <= e1


def test_quad_2d_separable():
    v, err = quad_2d(lambda x, y: np.exp(-x - y), (0, 50), (0, 50), tol=1e-12)
    assert v == pytest.approx((1 - math.exp(-50)) ** 2, abs=1e-11)
    assert err < 1e-10


def test_quad_2d_ridge():
    # mass concentrated along the diagonal
    v, _ = quad_2d(lambda x, y: np.exp(-((x - y) ** 2) / 0.01) / math.sqrt(0.01 * math.pi), (0, 10), (-5, 15), tol=1e-10)
    assert v == pytest.approx(10.0, rel=1e-9)


def test_quad_2d_rectangle():
    v, _ = quad_2d(lambda x, y: x * y**2 + 0 * x * y, (0, 2), (1, 3), tol=1e-12)
    assert v == pytest.approx(2 * (27 - 1) / 3, rel=1e-13)
