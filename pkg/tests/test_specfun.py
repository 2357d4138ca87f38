import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import eval_hermite

from heralded.specfun import (
    MAX_ORDER,
    gauss_hermite_integral,
    gen_hermite,
    hermite_coefficients,
    hyp2f1_terminating,
    two_index_hermite,
)

finite = st.floats(-3, 3, allow_nan=False)
complexes = st.builds(complex, finite, finite)


def test_low_orders():
    assert gen_hermite(0, 1.3 + 2j, -0.4j) == 1
    x, y = 0.7 - 0.2j, 1.1 + 0.5j
    assert gen_hermite(2, x, y) == pytest.approx(x * x + 2 * y, rel=1e-15)
    assert gen_hermite(3, 2.0, -1.0) == pytest.approx(-4.0)


def test_coefficients_are_integer_counts():
    # H_6(x, y) = x^6 + 30 x^4 y + 180 x^2 y^2 + 120 y^3
    assert hermite_coefficients(6) == [1, 30, 180, 120]


@given(st.integers(1, 40), complexes, complexes)
def test_recurrence(n, x, y):
    lhs = gen_hermite(n + 1, x, y)
    rhs = x * gen_hermite(n, x, y) + 2 * y * n * gen_hermite(n - 1, x, y)
    scale = max(abs(lhs), abs(x * gen_hermite(n, x, y)), abs(2 * y * n * gen_hermite(n - 1, x, y)), 1e-300)
    assert abs(lhs - rhs) <= 1e-12 * scale


def _physicists(n, x):
    h0, h1 = np.ones_like(x), 2 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * k * h0
    return h1


@pytest.mark.parametrize("n", range(41))
def test_reduces_to_physicists_hermite(n):
    x = np.linspace(-10, 10, 81)
    expected = _physicists(n, x)
    got = gen_hermite(n, 2 * x, -1.0)
    np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_order_sixty_has_no_overflow():
    val = gen_hermite(MAX_ORDER, 2.5, -1.0)
    assert np.isfinite(val)
    assert val == pytest.approx(eval_hermite(MAX_ORDER, 1.25), rel=1e-12)


def test_order_above_limit_rejected():
    with pytest.raises(ValueError):
        gen_hermite(MAX_ORDER + 1, 1.0, 1.0)


def test_two_index_small_cases():
    x, y, w, z, t = 0.3 + 0.1j, -0.5, 1.2j, 0.4 - 0.3j, 0.9 + 0.2j
    assert two_index_hermite(0, 0, x, y, w, z, t) == 1
    assert two_index_hermite(1, 1, x, y, w, z, t) == pytest.approx(x * w + t, rel=1e-15)
    for m in range(6):
        assert two_index_hermite(m, 0, x, y, w, z, t) == pytest.approx(gen_hermite(m, x, y), rel=1e-14)


@given(st.integers(0, 12), st.integers(0, 12), complexes, complexes, complexes, complexes)
def test_two_index_factorizes_at_zero_coupling(m, n, x, y, w, z):
    got = two_index_hermite(m, n, x, y, w, z, 0)
    expected = gen_hermite(m, x, y) * gen_hermite(n, w, z)
    assert abs(got - expected) <= 1e-12 * max(abs(expected), 1e-300)


def _integral_by_quadrature(m, n, d1, e1, f1, d2, e2, f2, alpha, beta):
    def integrand(u):
        return (
            np.exp(-alpha * u * u + beta * u)
            * gen_hermite(m, d1 * u + e1, f1)
            * gen_hermite(n, d2 * u + e2, f2)
        )

    center = (beta / (2 * alpha)).real
    half = 40 / math.sqrt(alpha.real)
    re = integrate.quad(lambda u: integrand(u).real, center - half, center + half, limit=500, epsabs=0, epsrel=1e-13)[0]
    im = integrate.quad(lambda u: integrand(u).imag, center - half, center + half, limit=500, epsabs=0, epsrel=1e-13)[0]
    return complex(re, im)


def test_gaussian_integral_trivial_cases():
    alpha, beta = 1.3 - 0.4j, 0.2 + 0.7j
    got = gauss_hermite_integral(0, 0, 0, 0, 0, 0, 0, 0, alpha, beta)
    assert got == pytest.approx(np.sqrt(np.pi / alpha) * np.exp(beta ** 2 / (4 * alpha)), rel=1e-14)
    assert abs(gauss_hermite_integral(1, 0, 2, 0, -1, 0, 0, 0, 1.0, 0.0)) < 1e-15


def test_gaussian_integral_rejects_divergent():
    with pytest.raises(ValueError):
        gauss_hermite_integral(1, 1, 1, 0, 0, 1, 0, 0, -0.1 + 1j, 0)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_gaussian_integral_matches_quadrature(rng):
    def draw():
        return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

    for _ in range(50):
        m, n = (int(v) for v in rng.integers(0, 7, size=2))
        args = [draw() for _ in range(6)]
        alpha = complex(rng.uniform(0.5, 3), rng.uniform(-1, 1))
        beta = draw()
        closed = gauss_hermite_integral(m, n, *args, alpha, beta)
        numeric = _integral_by_quadrature(m, n, *args, alpha, beta)
        assert abs(closed - numeric) <= 1e-9 * abs(numeric), (m, n)


def test_gaussian_integral_reference_draw():
    d1, e1, f1, d2, e2, f2 = 0.8 + 0.3j, -0.2 + 0.5j, 0.4 - 0.1j, -0.6 + 0.2j, 0.3j, -0.3 + 0.2j
    alpha, beta = 1.5 + 0.4j, 0.3 - 0.6j
    closed = gauss_hermite_integral(4, 3, d1, e1, f1, d2, e2, f2, alpha, beta)
    numeric = _integral_by_quadrature(4, 3, d1, e1, f1, d2, e2, f2, alpha, beta)
    assert abs(closed - numeric) < 1e-10 * abs(numeric)


def test_hyp2f1_terminating_small_orders():
    z = 0.37 - 1.2j
    assert hyp2f1_terminating(0, z) == 1
    assert hyp2f1_terminating(1, z) == 1
    assert hyp2f1_terminating(2, z) == pytest.approx(1 + z / 2)
    assert hyp2f1_terminating(3, z) == pytest.approx(1 + 3 * z / 2)


@pytest.mark.parametrize("n", [4, 7, 10])
def test_hyp2f1_matches_scipy_for_real_argument(n):
    from scipy.special import hyp2f1

    for z in (-0.7, 0.3, 0.9):
        assert hyp2f1_terminating(n, z) == pytest.approx(hyp2f1((1 - n) / 2, -n / 2, 1, z), rel=1e-12)
