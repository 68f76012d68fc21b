"""
Densities and likelihoods of the multivariate and matrix variate symmetric
Laplace distributions.

Conventions
-----------
The multivariate law SL_p(Sigma) has density

    f(y) = 2 / ((2 pi)^{p/2} |Sigma|^{1/2}) * (q/2)^{nu/2} * K_nu(sqrt(2 q)),

with ``q = y' Sigma^{-1} y`` and ``nu = (2 - p)/2``.  It is the w-marginal of the
joint density of (Y, W) when Y = sqrt(W) Z, Z ~ N_p(0, Sigma), W ~ Exp(1).

A random p x q matrix X is matrix variate symmetric Laplace with parameters
(Sigma1, Sigma2) when vec(X) ~ SL_pq(Sigma2 kron Sigma1).

Complete-data log-likelihoods are expressed in the concentration matrix
Psi = Sigma^{-1} and use the *unhalved* normalization

    l_c(Psi) = N log|Psi| - sum_i (1/w_i) y_i' Psi y_i,

which is exactly twice the halved form -N/2 log|Sigma| - 1/2 sum_i ... plus a
constant that depends only on the data.  Both forms share the same maximizers.

The observed log-likelihood :func:`observed_loglik` drops the additive constant

    N * (log 2 - (p/2) log(2 pi) - (nu/2) log 2)

relative to the sum of log densities; :func:`observed_loglik_offset` returns it
so callers can recover sum_i log f(y_i).
"""

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import as_spd, logdet_spd, sym_inv
from .data import WeightedMatrixData, WeightedVectorData
from .errors import DomainError, PoleError
from .special_functions import log_bessel_k

__all__ = [
    "MultivariateLaplaceParams",
    "MatrixLaplaceParams",
    "bessel_order",
    "log_pdf_mvsl",
    "log_pdf_matsl",
    "log_joint_pdf",
    "log_joint_pdf_matrix",
    "observed_loglik",
    "observed_loglik_offset",
    "complete_loglik",
    "complete_loglik_matrix",
]

_LOG_2PI = math.log(2.0 * math.pi)
_LOG2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class MultivariateLaplaceParams:
    """Scale matrix Sigma (p x p, SPD) of SL_p(Sigma)."""

    sigma: np.ndarray

    def __post_init__(self):
        s = as_spd(self.sigma, "sigma")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def p(self):
        return self.sigma.shape[0]

    @property
    def psi(self):
        """Concentration matrix Sigma^{-1}."""
        return sym_inv(self.sigma)

    @property
    def logdet(self):
        return logdet_spd(self.sigma)

    @classmethod
    def from_concentration(cls, psi):
        return cls(sym_inv(as_spd(psi, "psi")))


@dataclass(frozen=True, eq=False)
class MatrixLaplaceParams:
    """Row scale Sigma1 (p x p) and column scale Sigma2 (q x q) of MSL_{p,q}."""

    sigma1: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        s1 = as_spd(self.sigma1, "sigma1")
        s2 = as_spd(self.sigma2, "sigma2")
        s1.setflags(write=False)
        s2.setflags(write=False)
        object.__setattr__(self, "sigma1", s1)
        object.__setattr__(self, "sigma2", s2)

    @property
    def p(self):
        return self.sigma1.shape[0]

    @property
    def q(self):
        return self.sigma2.shape[0]

    @property
    def psi1(self):
        return sym_inv(self.sigma1)

    @property
    def psi2(self):
        return sym_inv(self.sigma2)

    def vec_params(self):
        """Parameters of vec(X): SL_pq(Sigma2 kron Sigma1)."""
        return MultivariateLaplaceParams(np.kron(self.sigma2, self.sigma1))


def bessel_order(dim):
    """Bessel order nu = (2 - d)/2 used by the d-dimensional density."""
    return (2.0 - dim) / 2.0


def _quad_form(y, params):
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != params.p:
        raise DomainError(f"expected a vector of length {params.p}, got {y.shape[0]}")
    return float(y @ np.linalg.solve(params.sigma, y))


def _matrix_trace_form(x, params):
    x = np.asarray(x, dtype=float)
    if x.shape != (params.p, params.q):
        raise DomainError(f"expected a {params.p}x{params.q} matrix, got {x.shape}")
    # tr(Sigma2^{-1} x' Sigma1^{-1} x)
    a = np.linalg.solve(params.sigma1, x)
    b = np.linalg.solve(params.sigma2, x.T)
    return float(np.sum(a * b.T))


def _log_density_from_form(qform, dim, logdet):
    nu = bessel_order(dim)
    base = _LOG2 - 0.5 * dim * _LOG_2PI - 0.5 * logdet
    if qform <= 0.0:
        if nu > 0:
            # (q/2)^{nu/2} K_nu(sqrt(2q)) -> Gamma(nu)/2 as q -> 0
            return base + math.lgamma(nu) - _LOG2
        raise PoleError(f"density of dimension {dim} has a pole at the origin")
    return base + 0.5 * nu * math.log(0.5 * qform) + log_bessel_k(nu, math.sqrt(2.0 * qform))


def log_pdf_mvsl(y, params):
    """Log density of SL_p(Sigma) at y.

    At y = 0 the density is finite only for p = 1 (value 1/sqrt(2 Sigma)); for
    p >= 2 it diverges and :class:`PoleError` is raised.
    """
    return _log_density_from_form(_quad_form(y, params), params.p, params.logdet)


def log_pdf_matsl(x, params):
    """Log density of MSL_{p,q}(Sigma1, Sigma2) at the p x q matrix x."""
    p, q = params.p, params.q
    logdet = q * logdet_spd(params.sigma1) + p * logdet_spd(params.sigma2)
    return _log_density_from_form(_matrix_trace_form(x, params), p * q, logdet)


def _log_joint(qform, w, dim, logdet):
    w = float(w)
    if not (w > 0.0) or not math.isfinite(w):
        raise DomainError(f"mixing weight must be finite and > 0, got {w!r}")
    return -0.5 * dim * _LOG_2PI - 0.5 * logdet - 0.5 * dim * math.log(w) - w - qform / (2.0 * w)


def log_joint_pdf(y, w, params):
    """Log joint density of (Y, W) at (y, w) for Y = sqrt(W) Z."""
    return _log_joint(_quad_form(y, params), w, params.p, params.logdet)


def log_joint_pdf_matrix(x, w, params):
    """Log joint density of (X, W) at (x, w) for the matrix variate law."""
    p, q = params.p, params.q
    logdet = q * logdet_spd(params.sigma1) + p * logdet_spd(params.sigma2)
    return _log_joint(_matrix_trace_form(x, params), w, p * q, logdet)


def _as_vector_rows(data):
    if isinstance(data, WeightedVectorData):
        return data.samples
    y = np.asarray(data, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    return y


def observed_loglik(data, params):
    """Observed-data log-likelihood of SL_p(Sigma), up to an additive constant.

    Returns

        -N/2 log|Sigma| + nu/2 sum_i log(q_i) + sum_i log K_nu(sqrt(2 q_i)),

    with ``q_i = y_i' Sigma^{-1} y_i``.  ``data`` is an (N, p) array of
    observations or a :class:`WeightedVectorData` (its weights are ignored).
    Adding :func:`observed_loglik_offset` gives sum_i log f(y_i).
    """
    y = _as_vector_rows(data)
    if y.shape[1] != params.p:
        raise DomainError(f"samples have dimension {y.shape[1]}, params {params.p}")
    nu = bessel_order(params.p)
    forms = np.einsum("ij,ij->i", y, np.linalg.solve(params.sigma, y.T).T)
    if np.any(forms <= 0.0):
        bad = int(np.flatnonzero(forms <= 0.0)[0])
        raise PoleError(f"sample {bad} is at the origin; the log-likelihood has a pole there")
    total = -0.5 * y.shape[0] * params.logdet
    total += 0.5 * nu * float(np.sum(np.log(forms)))
    total += sum(log_bessel_k(nu, math.sqrt(2.0 * f)) for f in forms)
    return float(total)


def observed_loglik_offset(p, n):
    """Constant c with sum_i log f(y_i) = observed_loglik(...) + c."""
    nu = bessel_order(p)
    return n * (_LOG2 - 0.5 * p * _LOG_2PI - 0.5 * nu * _LOG2)


def complete_loglik(data, psi):
    """Complete-data log-likelihood N log|Psi| - sum_i y_i' Psi y_i / w_i."""
    psi = as_spd(psi, "psi")
    if psi.shape[0] != data.p:
        raise DomainError(f"psi is {psi.shape[0]}x{psi.shape[0]}, data has p={data.p}")
    y = data.samples
    forms = np.einsum("ij,jk,ik->i", y, psi, y)
    return data.n * logdet_spd(psi) - float(np.sum(forms / data.weights))


def complete_loglik_matrix(data, psi1, psi2):
    """Complete-data log-likelihood of the matrix model.

    qN log|Psi1| + pN log|Psi2| - sum_i tr(Psi2 X_i' Psi1 X_i) / w_i.
    """
    if not isinstance(data, WeightedMatrixData):
        raise TypeError("complete_loglik_matrix expects WeightedMatrixData")
    psi1 = as_spd(psi1, "psi1")
    psi2 = as_spd(psi2, "psi2")
    p, q, n = data.p, data.q, data.n
    if psi1.shape[0] != p or psi2.shape[0] != q:
        raise DomainError("concentration factors do not match the data dimensions")
    x = data.samples
    traces = np.einsum("ab,nbc,cd,nda->n", psi2, np.transpose(x, (0, 2, 1)), psi1, x)
    return (
        q * n * logdet_spd(psi1)
        + p * n * logdet_spd(psi2)
        - float(np.sum(traces / data.weights))
    )
