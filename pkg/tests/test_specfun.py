from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from corrsv.quadrature import quad_1d
from corrsv.specfun import (
    DomainError,
    bessel_i_scaled,
    bessel_j0,
    hille_hardy_closed,
    hille_hardy_condition,
    hille_hardy_series,
    hille_hardy_terms_needed,
    laguerre,
    laguerre_table,
    log_bessel_i,
    log_bessel_i_scaled,
    log_factorial,
)


def exact_laguerre(k, nu, x):
    """Explicit sum in rational arithmetic."""
    x = Fraction(x)
    return sum(
        Fraction((-1) ** j * math.comb(k + nu, k - j), math.factorial(j)) * x**j for j in range(k + 1)
    )


# --- modified Bessel I ------------------------------------------------------


@pytest.mark.parametrize("nu", [0, 1, 2, 5, 17, 40, 64])
def test_scaled_bessel_matches_scipy(nu):
    z = np.concatenate([np.linspace(0, 5, 51), np.geomspace(5, 1e4, 200)])
    got = bessel_i_scaled(nu, z)
    ref = special.ive(nu, z)
    mask = ref > 1e-300
    np.testing.assert_allclose(got[mask], ref[mask], rtol=1e-12)


def test_scaled_bessel_at_zero():
    assert bessel_i_scaled(0, 0.0) == 1.0
    assert bessel_i_scaled(3, 0.0) == 0.0
    assert log_bessel_i_scaled(2, 0.0) == -np.inf


def test_log_bessel_large_argument_does_not_overflow():
    z = np.array([800.0, 5e3, 1e5])
    ref = np.log(special.ive(3, z)) + z
    np.testing.assert_allclose(log_bessel_i(3, z), ref, rtol=1e-13)


def test_bessel_i_small_argument_leading_term():
    # I_nu(z) ~ (z/2)^nu / nu! as z -> 0
    z = 1e-8
    assert log_bessel_i(4, z) == pytest.approx(4 * math.log(z / 2) - math.lgamma(5), rel=1e-14)


@pytest.mark.parametrize("nu", [-1, 1.5, 65])
def test_bessel_order_domain(nu):
    with pytest.raises(DomainError):
        bessel_i_scaled(nu, 1.0)


def test_bessel_negative_argument():
    with pytest.raises(DomainError):
        bessel_i_scaled(0, -1.0)


# --- Laguerre ----------------------------------------------------------------


@pytest.mark.parametrize("nu", [0, 1, 3, 8])
def test_laguerre_matches_scipy(nu):
    x = np.linspace(0, 60, 301)
    table = laguerre_table(40, nu, x)
    for k in (0, 1, 2, 7, 20, 40):
        ref = special.eval_genlaguerre(k, nu, x)
        np.testing.assert_allclose(table[k], ref, rtol=1e-10, atol=1e-10 * np.max(np.abs(ref)))


@pytest.mark.parametrize("k,nu,x", [(0, 0, 2.5), (1, 2, 0.75), (5, 0, 3.25), (9, 4, 1.5), (12, 1, 7.0)])
def test_laguerre_exact_rational(k, nu, x):
    assert laguerre(k, nu, x) == pytest.approx(float(exact_laguerre(k, nu, x)), rel=1e-12, abs=1e-13)


def test_laguerre_at_zero_is_binomial():
    for k in range(10):
        for nu in range(4):
            assert laguerre(k, nu, 0.0) == pytest.approx(math.comb(k + nu, k), rel=1e-14)


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_laguerre_orthogonality(nu):
    # int x^nu e^-x L_k L_l dx = (k+nu)!/k! delta_kl
    for k in range(5):
        for l in range(5):
            v, _ = quad_1d(
                lambda x: x**nu * np.exp(-x) * laguerre(k, nu, x) * laguerre(l, nu, x), 0, 100, tol=1e-12
            )
            ref = math.factorial(k + nu) / math.factorial(k) if k == l else 0.0
            assert v == pytest.approx(ref, abs=1e-10)


def test_laguerre_degree_limit():
    with pytest.raises(DomainError):
        laguerre(129, 0, 1.0)
    with pytest.raises(DomainError):
        laguerre(3, 0, -0.5)


def test_laguerre_table_shape():
    x = np.zeros((3, 4))
    assert laguerre_table(5, 1, x).shape == (6, 3, 4)


# --- J0 -----------------------------------------------------------------------


def test_j0_matches_scipy_absolute():
    x = np.linspace(-200, 200, 40001)
    assert np.max(np.abs(bessel_j0(x) - special.j0(x))) < 1e-10


def test_j0_special_values():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(2.404825557695773)) < 1e-12
    assert bessel_j0(math.pi) == pytest.approx(special.j0(math.pi), abs=1e-14)


@given(st.floats(min_value=0, max_value=500))
def test_j0_even(x):
    assert bessel_j0(x) == bessel_j0(-x)


# --- factorials -----------------------------------------------------------------


def test_log_factorial():
    for n in (0, 1, 5, 30, 255, 256, 1000):
        assert log_factorial(n) == pytest.approx(math.lgamma(n + 1), rel=1e-14, abs=1e-14)


# --- Hille-Hardy ----------------------------------------------------------------


def _closed_oracle(x, y, z, nu):
    t = x * y * z
    return (
        t ** (-nu / 2)
        / (1 - z)
        * np.exp(-z * (x + y) / (1 - z))
        * special.ive(nu, 2 * np.sqrt(t) / (1 - z))
        * np.exp(2 * np.sqrt(t) / (1 - z))
    )


@pytest.mark.parametrize("nu", [0, 1, 3])
def test_hille_hardy_closed_matches_scipy(nu):
    x = np.array([0.3, 1.0, 4.0, 9.0])
    got = hille_hardy_closed(x[:, None], x[None, :], 0.6, nu)
    np.testing.assert_allclose(got, _closed_oracle(x[:, None], x[None, :], 0.6, nu), rtol=1e-12)


def test_hille_hardy_closed_boundary_limit():
    for nu in range(4):
        ref = 1.0 / (math.factorial(nu) * (1 - 0.4) ** (nu + 1))
        assert hille_hardy_closed(0.0, 0.0, 0.4, nu) == pytest.approx(ref, rel=1e-14)
        # one argument zero: only the exponential survives
        assert hille_hardy_closed(0.0, 2.0, 0.4, nu) == pytest.approx(ref * math.exp(-0.4 * 2 / 0.6), rel=1e-14)


def test_hille_hardy_series_first_terms():
    # two terms: 1/nu! + z L_1(x) L_1(y) / (nu+1)!
    x, y, z, nu = 0.7, 1.9, 0.3, 2
    ref = 1 / 2 + z * (nu + 1 - x) * (nu + 1 - y) / 6
    assert hille_hardy_series(x, y, z, nu, 2) == pytest.approx(ref, rel=1e-15)


def test_hille_hardy_series_converges_monotonically_in_error():
    x, y, z, nu = 2.0, 3.0, 0.5, 1
    closed = hille_hardy_closed(x, y, z, nu)
    errs = [abs(hille_hardy_series(x, y, z, nu, t) - closed) for t in (10, 20, 40, 80)]
    assert errs[-1] < 1e-14 * closed
    assert errs[0] > errs[2]


def test_hille_hardy_ill_conditioned_point():
    # terms exceed the sum by ~e^190: needs the extended-precision path
    x, y, z = 0.0, 10.0, 0.95
    terms = hille_hardy_terms_needed(x, y, z, 0)
    assert hille_hardy_condition(x, y, z, 0, terms) > 1e5
    closed = hille_hardy_closed(x, y, z, 0)
    assert hille_hardy_series(x, y, z, 0, terms) == pytest.approx(closed, rel=1e-10)


def test_hille_hardy_terms_needed_grows_with_z():
    counts = [hille_hardy_terms_needed(1.0, 2.0, z, 0) for z in (0.1, 0.5, 0.9)]
    assert counts == sorted(counts)
    assert hille_hardy_terms_needed(1.0, 2.0, 0.0, 0) == 1


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0, max_value=8),
    st.floats(min_value=0, max_value=8),
    st.floats(min_value=0.01, max_value=0.8),
    st.integers(min_value=0, max_value=3),
)
def test_hille_hardy_identity_property(x, y, z, nu):
    terms = hille_hardy_terms_needed(x, y, z, nu)
    assert hille_hardy_series(x, y, z, nu, terms) == pytest.approx(hille_hardy_closed(x, y, z, nu), rel=1e-9)


def test_hille_hardy_domain():
    with pytest.raises(DomainError):
        hille_hardy_series(1.0, 1.0, 1.0, 0, 10)
    with pytest.raises(DomainError):
        hille_hardy_closed(1.0, 1.0, -0.2, 0)
    with pytest.raises(DomainError):
        hille_hardy_series(1.0, 1.0, 0.5, 0, 0)
