from math import sqrt

import numpy as np
import pytest

from entvec.errors import EntvecError, SingularMarginal
from entvec.normalform import FilterSet, apply_filters, marginal_flatness, normal_form
from entvec.oracle import random_density_matrix
from entvec.states import Rho1Params, bell, ghz, psi_epsilon, rho1, sigma_filtered
from entvec.tensor import DensityMatrix, ket, tensor_product
from entvec.witness import dimensionality_vector_bound


def test_identity_filters():
    rho = rho1(Rho1Params(0.1, 0.2, 0.3, 0.4))
    out = apply_filters(rho, FilterSet.identity(rho.dims))
    np.testing.assert_allclose(out.entries, rho.entries, atol=1e-15)


def test_filter_balances_psi_epsilon():
    for eps in (0.01, 0.1, 0.3):
        a1 = np.diag([1 / sqrt(3 * (1 - 2 * eps)), 1 / sqrt(3 * eps), 1 / sqrt(3 * eps)])
        out = apply_filters(psi_epsilon(eps), FilterSet((a1, np.eye(3), np.eye(3))))
        np.testing.assert_allclose(out.entries, ghz(3, 3).density().entries, atol=1e-12)


def test_diagonal_filter_on_diagonal_state():
    rho = DensityMatrix((2, 2), np.diag([0.1, 0.2, 0.3, 0.4]))
    out = apply_filters(rho, FilterSet((np.diag([1.0, 2.0]), np.eye(2))))
    expected = np.diag([0.1, 0.2, 1.2, 1.6]) / 3.1
    np.testing.assert_allclose(out.entries, expected)


def test_filter_shape_mismatch():
    with pytest.raises(EntvecError):
        apply_filters(bell(), FilterSet.identity((2, 3)))


def test_flatness_examples():
    assert marginal_flatness(ghz(3)) == pytest.approx(0, abs=1e-12)
    assert marginal_flatness(ket(2, 0).density()) == pytest.approx(1 / sqrt(2))
    assert marginal_flatness(DensityMatrix((3, 2), np.eye(6) / 6)) == pytest.approx(0, abs=1e-15)


def test_normal_form_bell_unchanged():
    out, filters = normal_form(bell())
    np.testing.assert_allclose(out.entries, bell().density().entries, atol=1e-12)
    assert filters.steps == 0 and filters.converged


def test_sigma_maps_to_rho1(rng):
    for _ in range(10):
        p = rng.dirichlet(np.ones(4))
        out, filters = normal_form(sigma_filtered(Rho1Params(*p)))
        assert filters.converged
        assert np.linalg.norm(out.entries - rho1(Rho1Params(*p)).entries) < 1e-8


def test_product_raises_singular():
    with pytest.raises(SingularMarginal):
        normal_form(tensor_product([ket(2, 0), ket(2, 0)]))


def test_random_states_converge_and_filters_reproduce(rng):
    for _ in range(40):
        rho = random_density_matrix((2, 2, 2), rng)
        out, filters = normal_form(rho, tol=1e-8, max_iter=200)
        assert filters.converged and filters.flatness <= 1e-8
        assert np.linalg.norm(apply_filters(rho, filters).entries - out.entries) < 1e-8
        for a in filters.operators:
            assert abs(np.linalg.det(a)) == pytest.approx(1)
        assert all(np.isfinite(filters.condition_numbers()))


def test_nonconvergence_is_flagged(rng):
    rho = random_density_matrix((2, 3), rng)
    out, filters = normal_form(rho, tol=0.0, max_iter=3)
    assert filters.steps == 3 and not filters.converged
    assert out.trace() == pytest.approx(1)


def test_normal_form_enhances_dimensionality():
    for eps in (0.01, 0.05, 0.1):
        out, _ = normal_form(psi_epsilon(eps))
        assert dimensionality_vector_bound(out).dims == (3, 3, 3)
    assert dimensionality_vector_bound(psi_epsilon(0.1)).dims == (2, 2, 2)


def test_explicit_filter_direction_maps_sigma_to_rho1():
    # chi = sqrt2|00> + sqrt2/4|11> is balanced by diag(1/sqrt2, sqrt2) on both
    # parties: sqrt2 * 1/2 == sqrt2/4 * 2
    params = Rho1Params(0.2, 0.3, 0.1, 0.4)
    a = np.diag([1 / sqrt(2), sqrt(2)])
    out = apply_filters(sigma_filtered(params), FilterSet((a, a, a)))
    np.testing.assert_allclose(out.entries, rho1(params).entries, atol=1e-12)
    _, filters = normal_form(sigma_filtered(params))
    for f in filters.operators:
        np.testing.assert_allclose(np.abs(f), a, atol=1e-8)
