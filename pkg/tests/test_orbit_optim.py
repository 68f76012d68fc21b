import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitlap.data import WeightedMatrixData, WeightedVectorData
from orbitlap.errors import DomainError, UnstableDataError
from orbitlap.laplace_models import complete_loglik, complete_loglik_matrix
from orbitlap.orbit_optim import (
    FiniteSet,
    FullGL,
    LeftRightGL,
    assemble_mle,
    closed_form_sl_minimizer,
    estimate,
    finite_group_minimize,
    flip_flop_minimize,
    moment_residual,
    orbit_norm,
    outer_alpha,
    weighted_scatter,
    whiten_by_weights,
)
from orbitlap.stability import StabilityClass

from .conftest import S_ELEMENT


def test_closed_form_diagonal():
    b, c = closed_form_sl_minimizer(np.diag([4.0, 1.0]))
    assert np.allclose(b.T @ b, np.diag([0.5, 2.0]), atol=1e-14)
    assert c == pytest.approx(4.0, rel=1e-15)


def test_closed_form_singular():
    with pytest.raises(UnstableDataError):
        closed_form_sl_minimizer(np.diag([1.0, 1e-13]))
    with pytest.raises(UnstableDataError):
        closed_form_sl_minimizer(np.zeros((2, 2)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 5))
def test_closed_form_properties(seed, p):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((p + 2, p))
    data = WeightedVectorData(y, rng.exponential(size=p + 2) + 0.1)
    s = weighted_scatter(data)
    b, c = closed_form_sl_minimizer(s)
    assert np.linalg.det(b.T @ b) == pytest.approx(1.0, abs=1e-10)
    assert orbit_norm(b, data) == pytest.approx(c, rel=1e-10)
    # the transformed scatter is a multiple of the identity
    t = b @ s @ b.T
    assert np.allclose(t, (c / p) * np.eye(p), rtol=0, atol=1e-9 * c)


def test_outer_alpha():
    alpha, value = outer_alpha(4.0, 2, 1)
    assert alpha == 0.5
    assert value == pytest.approx(2 * (1 - math.log(2) + math.log(4)))
    with pytest.raises(UnstableDataError):
        outer_alpha(0.0, 2, 1)


def test_full_estimate_is_n_times_inverse_scatter():
    rng = np.random.default_rng(0)
    data = WeightedVectorData(rng.standard_normal((10, 3)), rng.exponential(size=10))
    rep = estimate(data, FullGL(3))
    want = data.n * np.linalg.inv(weighted_scatter(data))
    assert np.allclose(rep.concentration, want, rtol=1e-12, atol=0)
    assert rep.stability.stability is StabilityClass.STABLE
    assert rep.mle_unique == "unique"


def test_full_estimate_unstable():
    data = WeightedVectorData([[1.0, 2.0], [2.0, 4.0]], [1.0, 3.0])
    rep = estimate(data, FullGL(2))
    assert rep.concentration is None
    assert rep.objective == math.inf
    assert rep.mle_unique == "none"
    assert rep.stability.stability is StabilityClass.UNSTABLE


def test_finite_ties(finite_example):
    data, model = finite_example
    ties = finite_group_minimize(model, data)
    assert [k for k, _, _ in ties] == [0, 1, 2, 3]
    assert all(v == pytest.approx(4.0) for _, _, v in ties)


def test_finite_set_validation():
    with pytest.raises(DomainError):
        FiniteSet((np.diag([2.0, 1.0]),))
    with pytest.raises(DomainError):
        FiniteSet((np.eye(2), np.eye(2)))
    with pytest.raises(DomainError):
        FiniteSet((np.eye(2), np.eye(3)))
    with pytest.raises(DomainError):
        FiniteSet(())
    m = FiniteSet((np.eye(2), S_ELEMENT))
    assert m.p == 2


def test_model_data_mismatch(finite_example, rotation_pair):
    data, _ = finite_example
    with pytest.raises(DomainError):
        estimate(data, FullGL(3))
    with pytest.raises(DomainError):
        estimate(data, LeftRightGL(2, 2))
    with pytest.raises(DomainError):
        estimate(rotation_pair, FullGL(2))
    with pytest.raises(DomainError):
        LeftRightGL(0, 2)


def test_example_pair_is_already_balanced(rotation_pair):
    rep = flip_flop_minimize(rotation_pair)
    assert rep.converged and rep.iterations == 0
    assert rep.inner_value == pytest.approx(4.0, rel=1e-14)
    res, (r1, r2) = moment_residual(rotation_pair)
    assert res < 1e-14


def _random_matrix_data(rng, n, p, q):
    return WeightedMatrixData(rng.standard_normal((n, p, q)), rng.exponential(size=n) + 0.05)


@pytest.mark.parametrize("seed", range(10))
def test_flip_flop_balances(seed):
    rng = np.random.default_rng(seed)
    p, q = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    data = _random_matrix_data(rng, p + q + 1, p, q)
    rep = flip_flop_minimize(data)
    assert rep.converged
    h = np.array(rep.history)
    assert np.all(np.diff(h) <= 1e-12 * h[:-1])
    b1, b2 = rep.minimizer
    assert np.linalg.det(b1) == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.det(b2) == pytest.approx(1.0, abs=1e-9)
    assert orbit_norm((b1, b2), data) == pytest.approx(rep.inner_value, rel=1e-9)


def test_flip_flop_validation(rotation_pair):
    with pytest.raises(DomainError):
        flip_flop_minimize(rotation_pair, tol=0.0)
    with pytest.raises(DomainError):
        flip_flop_minimize(rotation_pair, max_iter=0)
    with pytest.raises(TypeError):
        flip_flop_minimize(WeightedVectorData([[1.0]], [1.0]))


def test_flip_flop_singular_scatter(quadrant):
    rep = flip_flop_minimize(quadrant["unstable"])
    assert rep.status == "singular" and not rep.converged


def test_kronecker_split_is_trace_balanced():
    rng = np.random.default_rng(3)
    data = _random_matrix_data(rng, 6, 2, 3)
    rep = estimate(data, LeftRightGL(2, 3))
    psi1, psi2 = rep.factors
    assert np.trace(psi1) / 2 == pytest.approx(np.trace(psi2) / 3, rel=1e-12)
    assert np.allclose(np.kron(psi2, psi1), rep.concentration, rtol=1e-12)
    want = -6 * data.n * (1 - math.log(6 * data.n) + math.log(rep.c))
    assert complete_loglik_matrix(data, psi1, psi2) == pytest.approx(want, rel=1e-10)


def test_assemble_rejects_bad_alpha():
    with pytest.raises(DomainError):
        assemble_mle(0.0, np.eye(2), FullGL(2))


def test_gradient_vanishes_at_full_mle():
    rng = np.random.default_rng(8)
    data = WeightedVectorData(rng.standard_normal((8, 3)), rng.exponential(size=8))
    psi = estimate(data, FullGL(3)).concentration
    h = 1e-5 * np.linalg.eigvalsh(psi)[0]
    for i in range(3):
        for j in range(i, 3):
            e = np.zeros((3, 3))
            e[i, j] = e[j, i] = 1.0
            g = (complete_loglik(data, psi + h * e) - complete_loglik(data, psi - h * e)) / (2 * h)
            assert abs(g) <= 1e-6


def test_whitening_and_finite_residual(finite_example):
    data, model = finite_example
    assert np.allclose(whiten_by_weights(WeightedVectorData([[2.0]], [4.0])), [[1.0]])
    assert moment_residual(data, model) == (0.0, ())
