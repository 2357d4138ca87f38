import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_hermite

from conftest import DX, FOCK_T, R8, X, overlap, random_params
from heralded.fock_oracle import fock_state, fock_wavefunction, two_mode_wavefunction
from heralded.scheme import (
    ImpossibleOutcome,
    SchemeParams,
    db_to_nepers,
    derived_coefficients,
    herald_probability,
    nepers_to_db,
    normalization,
    output_wavefunction,
    squeezed_vacuum_wavefunction,
)
from heralded.specfun import gen_hermite

valid = st.builds(
    SchemeParams,
    st.floats(0.05, 1.3),
    st.floats(0.05, math.pi),
    st.floats(0.02, 0.98),
    st.integers(0, 8),
)


def test_params_validation():
    for bad in [(-0.1, 1, 0.5), (1, -0.1, 0.5), (1, 3.2, 0.5), (1, 1, 1.1), (math.nan, 1, 0.5)]:
        with pytest.raises(ValueError):
            SchemeParams(*bad)
    with pytest.raises(ValueError):
        SchemeParams(1, 1, 0.5, -1)
    p = SchemeParams(0.7, 2.0, 0.6, 3)
    assert p.t ** 2 + p.rho ** 2 == pytest.approx(1, abs=1e-16)


def test_db_conversion():
    assert db_to_nepers(8) == pytest.approx(0.9210340371976183)
    assert nepers_to_db(db_to_nepers(11.24)) == pytest.approx(11.24)


def test_squeezed_vacuum_limits():
    x = np.linspace(-4, 4, 9)
    for phi in (0.0, 1.0, math.pi):
        np.testing.assert_allclose(squeezed_vacuum_wavefunction(0, phi, x), np.pi ** -0.25 * np.exp(-x * x / 2))
    assert squeezed_vacuum_wavefunction(0.5, 0, 0.0) == pytest.approx(np.pi ** -0.25 * math.exp(0.25))


def test_squeezed_vacuum_normalized(rng):
    for r, phi in zip(rng.uniform(0, 1.5, 20), rng.uniform(0, math.pi, 20)):
        psi = squeezed_vacuum_wavefunction(r, phi, X)
        assert np.sum(np.abs(psi) ** 2) * DX == pytest.approx(1, abs=1e-10)


def test_derived_coefficients_simple_cases():
    co = derived_coefficients(SchemeParams(0.0, 1.3, 0.4))
    assert co.a == pytest.approx(1)
    assert co.b == 0
    assert co.gamma == 0
    p = SchemeParams(0.8, math.pi, FOCK_T)
    assert derived_coefficients(p).gamma == pytest.approx(math.sinh(0.8))


def test_coefficients_reproduce_direct_construction(rng):
    """exp(-c x^2 - a y^2 + b x y) against the beam-splitter product of input wavefunctions."""
    y = np.linspace(-3, 3, 13)
    x = np.linspace(-3, 3, 13)
    Y, Xg = np.meshgrid(y, x, indexing="ij")
    for p in random_params(rng, 50, r_max=1.4, n_max=0):
        co = derived_coefficients(p)
        t, rho = p.t, p.rho
        direct = (
            squeezed_vacuum_wavefunction(p.r, 0.0, t * Y + rho * Xg)
            * squeezed_vacuum_wavefunction(p.r, p.phi, -rho * Y + t * Xg)
            * np.exp(-Y ** 2 / 2)  # Gaussian factor of the detector's Hermite function
        )
        # the closed form uses the mirrored herald coordinate y -> -y
        closed = np.exp(-co.c * Xg ** 2 - co.a * Y ** 2 - co.b * Xg * Y)
        ratio = direct / closed
        np.testing.assert_allclose(ratio, ratio[6, 6], rtol=1e-9)
        assert co.a.real > 0


@given(valid)
def test_parity(p):
    psi = output_wavefunction(p)
    x = np.linspace(0.1, 6, 25)
    scale = np.max(np.abs(psi(x)))
    np.testing.assert_allclose(psi(-x), (-1) ** p.n * psi(x), atol=1e-12 * scale, rtol=1e-12)


@given(valid)
def test_normalized(p):
    psi = output_wavefunction(p)
    assert np.sum(np.abs(psi(X)) ** 2) * DX == pytest.approx(1, abs=1e-8)


def test_normalization_matches_quadrature(rng):
    for p in random_params(rng, 30):
        psi = output_wavefunction(p)
        unnormalized = psi.norm_factor * math.sqrt(normalization(p))
        raw = unnormalized * np.exp(psi.envelope_coeff * X ** 2) * gen_hermite(p.n, psi.hermite_linear * X, psi.hermite_offset)
        assert np.sum(np.abs(raw) ** 2) * DX == pytest.approx(normalization(p), rel=1e-8)


def test_normalization_n0_closed_form():
    p = SchemeParams(0.6, 2.1, 0.3, 0)
    cot2 = 1 / math.tan(p.phi / 2) ** 2
    expected = math.sqrt(math.pi) * math.sqrt((cot2 + math.exp(4 * p.r)) / (p.gamma ** 2 + 1))
    assert normalization(p) == pytest.approx(expected, rel=1e-14)


def test_normalization_finite_as_gamma_vanishes():
    for n in range(6):
        vals = [normalization(SchemeParams(0.9, 2.0, t, n)) for t in (1e-3, 1e-5, 1e-7)]
        assert all(math.isfinite(v) for v in vals)


def test_n0_is_gaussian():
    psi = output_wavefunction(SchemeParams(0.9, 1.7, 0.35, 0))
    assert psi.n == 0
    assert psi.envelope_coeff.real < 0


def test_odd_herald_impossible_when_arms_separate():
    for p in (SchemeParams(0.9, 0.0, 0.5, 1), SchemeParams(0.9, 2.0, 1.0, 3), SchemeParams(0.9, 2.0, 0.0, 1)):
        with pytest.raises(ImpossibleOutcome, match="impossible outcome"):
            output_wavefunction(p)
    assert herald_probability(SchemeParams(0.9, 0.0, 0.5, 1)) == 0


def test_degenerate_even_herald_is_squeezed_vacuum():
    p = SchemeParams(0.9, 2.0, 1.0, 2)
    psi = output_wavefunction(p)
    expected = squeezed_vacuum_wavefunction(0.9, 2.0, X)
    assert abs(overlap(psi(X), expected)) ** 2 == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_fock_point_gives_fock_state(n):
    psi = output_wavefunction(SchemeParams(R8, math.pi, FOCK_T, n))
    fock = fock_wavefunction(fock_state(n), X)
    assert abs(overlap(fock, psi(X))) ** 2 >= 1 - 1e-8


def test_probability_vacuum_and_range(rng):
    for t, phi in [(0.3, 1.0), (0.9, math.pi)]:
        assert herald_probability(SchemeParams(0.0, phi, t, 0)) == 1.0
    for p in random_params(rng, 40):
        assert 0 <= herald_probability(p) <= 1


def test_probability_at_cat_optimum():
    r = math.acosh(8 / math.sqrt(3 * math.sqrt(73) - 9))
    t = math.sqrt((math.sqrt(73) - 3) / math.tanh(r) + 8) / 4
    assert herald_probability(SchemeParams(r, math.pi, t, 1)) == pytest.approx(0.18, abs=0.005)


def test_probabilities_sum_to_one_when_far_from_truncation():
    p = SchemeParams(0.6, 2.0, 0.4)
    total = sum(herald_probability(p.with_n(n)) for n in range(61))
    assert total == pytest.approx(1, abs=1e-10)


def test_two_mode_product_matches_fock_splitter():
    # sanity for the test helper itself; full check lives in test_fock_oracle
    from heralded.fock_oracle import beam_splitter_apply, squeezed_vacuum_fock

    v = beam_splitter_apply(squeezed_vacuum_fock(0.4, 0, 40), squeezed_vacuum_fock(0.4, 1.0, 40), 1.0)
    x = np.linspace(-2, 2, 5)
    got = two_mode_wavefunction(v, x[:, None], x[None, :])
    a = squeezed_vacuum_wavefunction(0.4, 0, x)[:, None] * squeezed_vacuum_wavefunction(0.4, 1.0, x)[None, :]
    np.testing.assert_allclose(np.abs(got), np.abs(a), atol=1e-9)


def test_hermite_reference():
    # the Fock-1 wavefunction is the odd Hermite function
    psi = output_wavefunction(SchemeParams(R8, math.pi, FOCK_T, 1))
    ref = np.pi ** -0.25 / math.sqrt(2) * np.exp(-X * X / 2) * eval_hermite(1, X)
    assert abs(overlap(ref, psi(X))) == pytest.approx(1, abs=1e-10)
