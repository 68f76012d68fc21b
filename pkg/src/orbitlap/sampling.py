"""
Seeded sampling of complete samples through Y = sqrt(W) Z.

Stream layout
-------------
Generator: NumPy ``PCG64`` seeded through ``SeedSequence(seed)``.  The seed
sequence is split with ``spawn(2)``; child 0 drives the mixing weights
(``standard_exponential(N)``), child 1 drives the Gaussian factor
(``standard_normal`` of shape (N, p) or (N, p, q), C order).  Gaussian draws are
coloured with the lower Cholesky factor L (Sigma = L L'): z = L e for vectors
and Z = L1 E L2' for matrices, so vec(Z) has covariance Sigma2 kron Sigma1.
"""

from dataclasses import dataclass

import numpy as np

from .data import WeightedMatrixData, WeightedVectorData
from .errors import DomainError
from .laplace_models import MatrixLaplaceParams, MultivariateLaplaceParams

__all__ = ["SampleRequest", "sample_mvsl", "sample_matsl", "sample"]

GENERATOR = "PCG64"
STREAM_VERSION = 1


@dataclass(frozen=True, eq=False)
class SampleRequest:
    count: int
    seed: int
    params: object

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise DomainError(f"count must be a positive integer, got {self.count!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.params, (MultivariateLaplaceParams, MatrixLaplaceParams)):
            raise TypeError("params must be MultivariateLaplaceParams or MatrixLaplaceParams")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "seed", int(self.seed))


def _streams(seed):
    weight_seq, gauss_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(weight_seq)), np.random.Generator(
        np.random.PCG64(gauss_seq)
    )


def sample_mvsl(req):
    """Draw N complete pairs (y_i, w_i) from SL_p(Sigma) x Exp(1)."""
    if not isinstance(req.params, MultivariateLaplaceParams):
        raise TypeError("sample_mvsl needs MultivariateLaplaceParams")
    rng_w, rng_z = _streams(req.seed)
    w = rng_w.standard_exponential(req.count)
    chol = np.linalg.cholesky(req.params.sigma)
    z = rng_z.standard_normal((req.count, req.params.p)) @ chol.T
    return WeightedVectorData(np.sqrt(w)[:, None] * z, w)


def sample_matsl(req):
    """Draw N complete pairs (X_i, w_i) from MSL_{p,q}(Sigma1, Sigma2) x Exp(1)."""
    if not isinstance(req.params, MatrixLaplaceParams):
        raise TypeError("sample_matsl needs MatrixLaplaceParams")
    rng_w, rng_z = _streams(req.seed)
    w = rng_w.standard_exponential(req.count)
    l1 = np.linalg.cholesky(req.params.sigma1)
    l2 = np.linalg.cholesky(req.params.sigma2)
    e = rng_z.standard_normal((req.count, req.params.p, req.params.q))
    z = l1 @ e @ l2.T
    return WeightedMatrixData(np.sqrt(w)[:, None, None] * z, w)


def sample(req):
    if isinstance(req.params, MatrixLaplaceParams):
        return sample_matsl(req)
    return sample_mvsl(req)
