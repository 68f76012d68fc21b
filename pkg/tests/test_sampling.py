import numpy as np
import pytest
from scipy import stats

from orbitlap.errors import DomainError
from orbitlap.laplace_models import MatrixLaplaceParams, MultivariateLaplaceParams
from orbitlap.sampling import SampleRequest, sample, sample_matsl, sample_mvsl


def test_deterministic_per_seed():
    params = MultivariateLaplaceParams(np.eye(2))
    a = sample(SampleRequest(50, 7, params))
    b = sample(SampleRequest(50, 7, params))
    c = sample(SampleRequest(50, 8, params))
    assert np.array_equal(a.samples, b.samples) and np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.samples, c.samples)


def test_weights_and_gaussians_use_separate_streams():
    # the weight stream does not depend on the dimension
    a = sample(SampleRequest(20, 3, MultivariateLaplaceParams(np.eye(2))))
    b = sample(SampleRequest(20, 3, MultivariateLaplaceParams(np.eye(4))))
    assert np.array_equal(a.weights, b.weights)


def test_vector_representation():
    sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
    data = sample_mvsl(SampleRequest(40_000, 1, MultivariateLaplaceParams(sigma)))
    z = data.samples / np.sqrt(data.weights)[:, None]
    assert np.allclose(np.cov(z.T), sigma, rtol=0.05, atol=0.03)
    assert stats.kstest(data.weights, "expon").pvalue > 1e-3


def test_matrix_covariance_is_kronecker():
    s1 = np.array([[1.5, 0.4], [0.4, 1.0]])
    s2 = np.array([[1.0, -0.3], [-0.3, 0.8]])
    data = sample_matsl(SampleRequest(60_000, 2, MatrixLaplaceParams(s1, s2)))
    vec = data.vectorized().samples
    assert np.allclose(np.cov(vec.T), np.kron(s2, s1), rtol=0.05, atol=0.03)


def test_request_validation():
    params = MultivariateLaplaceParams(np.eye(1))
    with pytest.raises(DomainError):
        SampleRequest(0, 1, params)
    with pytest.raises(DomainError):
        SampleRequest(5, -1, params)
    with pytest.raises(DomainError):
        SampleRequest(5, 2**64, params)
    with pytest.raises(TypeError):
        SampleRequest(5, 1, np.eye(2))
