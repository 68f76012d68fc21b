"""Containers for complete samples (observations paired with their mixing weights)."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["MIN_WEIGHT", "WeightedVectorData", "WeightedMatrixData"]

# 1/w must stay finite.
MIN_WEIGHT = 1e-300


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.shape[0] != n:
        raise DomainError(f"expected {n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite")
    if np.any(w < MIN_WEIGHT):
        raise DomainError(f"weights must be >= {MIN_WEIGHT:g} (strictly positive)")
    return w


@dataclass(frozen=True)
class WeightedVectorData:
    """N pairs (y_i, w_i) with y_i in R^p and w_i > 0.

    ``samples`` is stored as an (N, p) array and ``weights`` as an (N,) array.
    """

    samples: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.samples, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        if y.ndim != 2 or y.shape[0] < 1 or y.shape[1] < 1:
            raise DomainError(f"vector samples must have shape (N, p), got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise DomainError("samples must be finite")
        w = _check_weights(self.weights, y.shape[0])
        y.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "samples", y)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def p(self):
        return self.samples.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class WeightedMatrixData:
    """N pairs (X_i, w_i) with X_i a real p x q matrix and w_i > 0."""

    samples: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim == 2:
            x = x[None, :, :]
        if x.ndim != 3 or min(x.shape) < 1:
            raise DomainError(f"matrix samples must have shape (N, p, q), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("samples must be finite")
        w = _check_weights(self.weights, x.shape[0])
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def p(self):
        return self.samples.shape[1]

    @property
    def q(self):
        return self.samples.shape[2]

    def __len__(self):
        return self.n

    def vectorized(self):
        """The same sample with every X_i replaced by vec(X_i) (column stacking)."""
        y = self.samples.transpose(0, 2, 1).reshape(self.n, self.p * self.q)
        return WeightedVectorData(y, self.weights)
