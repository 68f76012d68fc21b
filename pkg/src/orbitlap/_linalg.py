"""Small dense linear-algebra helpers used across modules."""

import numpy as np

from .errors import DomainError

SYMMETRY_RTOL = 1e-12


def as_spd(matrix, name="matrix"):
    """Validate a symmetric positive definite matrix and return it as a float array.

    Symmetry is checked to ``SYMMETRY_RTOL`` relative to the largest entry; the
    returned array is the exactly symmetrized input.
    """
    a = np.array(matrix, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * max(scale, 1e-300):
        raise DomainError(f"{name} is not symmetric")
    a = 0.5 * (a + a.T)
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise DomainError(f"{name} is not positive definite") from None
    return a


def logdet_spd(a):
    return 2.0 * float(np.sum(np.log(np.diag(np.linalg.cholesky(a)))))


def sym_sqrt(a):
    """Symmetric positive definite square root via an eigendecomposition."""
    vals, vecs = np.linalg.eigh(a)
    return (vecs * np.sqrt(vals)) @ vecs.T


def sym_inv(a):
    vals, vecs = np.linalg.eigh(a)
    return (vecs / vals) @ vecs.T


def det_normalized_inverse(m):
    """(det M)^{1/n} M^{-1} for symmetric PD M, together with n (det M)^{1/n}.

    This is the minimizer of tr(P M) over SPD P with det P = 1, and the
    attained value.  Returns ``None`` for the matrix when M is numerically
    singular.
    """
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    n = m.shape[0]
    top = vals[-1]
    if not top > 0.0 or vals[0] <= 1e-14 * top:
        return None, 0.0
    log_geo = float(np.mean(np.log(vals)))
    geo = np.exp(log_geo)
    p = (vecs * (geo / vals)) @ vecs.T
    return 0.5 * (p + p.T), n * geo


def traceless_basis(n):
    """Orthonormal (Frobenius) basis of the traceless n x n real matrices.

    Ordering is fixed: off-diagonal units E_ij (row-major, i != j), then the
    diagonal directions (E_kk - E_{k+1,k+1}) orthonormalized by Gram-Schmidt
    in the order k = 0, 1, ..., n-2.
    """
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = np.zeros((n, n))
                e[i, j] = 1.0
                basis.append(e)
    diag = []
    for k in range(n - 1):
        d = np.zeros(n)
        d[k], d[k + 1] = 1.0, -1.0
        for prev in diag:
            d = d - (d @ prev) * prev
        d = d / np.linalg.norm(d)
        diag.append(d)
        basis.append(np.diag(d))
    return basis
