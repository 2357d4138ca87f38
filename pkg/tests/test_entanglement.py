import math

import numpy as np
import pytest

from conftest import R8
from heralded.entanglement import (
    degree_grid,
    entangled_t_interval,
    entanglement_degree,
    separability_boundary,
)


def test_trivial_points():
    for t, phi in [(0, math.pi), (1, math.pi), (0.5, 0)]:
        rep = entanglement_degree(R8, phi, t)
        assert rep.degree == pytest.approx(0, abs=1e-15)
        assert not rep.entangled


def test_fock_point_value():
    rep = entanglement_degree(R8, math.pi, 1 / math.sqrt(2))
    assert rep.degree == pytest.approx(10 ** 0.8, rel=1e-12)
    assert rep.entangled
    assert rep.nullifier_variance_sum == pytest.approx(math.exp(-2 * R8))


def test_rejects_out_of_range():
    with pytest.raises(ValueError):
        entanglement_degree(-1, 1, 0.5)


def test_report_invariants(rng):
    for r, phi, t in zip(rng.uniform(0, 2, 100), rng.uniform(0, math.pi, 100), rng.uniform(0, 1, 100)):
        rep = entanglement_degree(r, phi, t)
        assert rep.degree >= 0
        assert rep.entangled == (rep.degree > 1)


def test_maximum_at_fock_point():
    phis = np.linspace(0, math.pi, 181)
    ts = np.linspace(0, 1, 201)
    for r in (0.3, R8, 1.5):
        grid = degree_grid(r, phis, ts)
        i, j = np.unravel_index(np.argmax(grid), grid.shape)
        assert phis[i] == pytest.approx(math.pi)
        assert ts[j] == pytest.approx(1 / math.sqrt(2), abs=5e-3)


def test_no_squeezing_no_entanglement():
    assert all(math.isnan(lo) and math.isnan(hi) for _, lo, hi in separability_boundary(0.0, 11))


def test_wide_interval_for_large_squeezing():
    _, lo, hi = separability_boundary(6.0, 3)[-1]
    assert lo < 1e-5 and hi > 1 - 1e-10


def test_boundary_residual():
    phi = math.pi / 2
    for t in entangled_t_interval(R8, phi):
        assert 2 * t * math.sqrt(1 - t * t) * math.sin(phi / 2) * math.exp(2 * R8) == pytest.approx(1, abs=1e-10)


def test_boundary_matches_grid(rng):
    for phi, lo, hi in separability_boundary(R8, 41):
        for t in rng.uniform(0, 1, 25):
            inside = not math.isnan(lo) and lo < t < hi
            assert inside == entanglement_degree(R8, phi, t).entangled or min(abs(t - lo), abs(t - hi)) < 1e-9


def test_separable_region_at_eight_db():
    # the separable corner near phi = 0 and the t-edges
    assert not entanglement_degree(R8, 0.1, 0.5).entangled
    assert not entanglement_degree(R8, math.pi, 0.05).entangled
    assert entanglement_degree(R8, math.pi / 2, 0.5).entangled


def test_requires_two_samples():
    with pytest.raises(ValueError):
        separability_boundary(R8, 1)
