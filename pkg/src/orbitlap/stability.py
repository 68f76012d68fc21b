"""
Stability of weighted data under the group action, and what it implies for MLEs.

Classes, for the determinant-one group acting on the statistic v = Y^W:

* unstable - 0 lies in the orbit closure; the likelihood is unbounded.
* semistable, not polystable - the orbit norm is bounded below but its
  infimum is not attained; the likelihood is bounded with no maximizer.
* polystable - the orbit is closed; an MLE exists.
* stable - polystable with a finite stabilizer; certified here by a
  zero-dimensional stabilizer Lie algebra.

Only the identity component of the stabilizer is visible to the Lie-algebra
computation; discrete stabilizer elements are not enumerated.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import traceless_basis
from .data import WeightedVectorData
from .errors import DomainError, InconclusiveError, UnstableDataError
from .orbit_optim import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    FiniteSet,
    FullGL,
    LeftRightGL,
    OptimizerReport,
    _check_model_data,
    closed_form_sl_minimizer,
    finite_group_minimize,
    flip_flop_minimize,
    moment_residual,
    weighted_scatter,
    whiten_by_weights,
)
from .thresholds import StabilityThresholds

__all__ = [
    "StabilityClass",
    "StabilizerInfo",
    "Classification",
    "MleFamily",
    "stabilizer_lie_dim",
    "analyze",
    "classify",
    "mle_family",
    "STABILIZER_SCOPE",
]

log = logging.getLogger(__name__)

STABILIZER_SCOPE = "identity component only (Lie algebra); discrete stabilizer elements are not enumerated"


class StabilityClass(enum.Enum):
    UNSTABLE = "unstable"
    SEMISTABLE_NOT_POLYSTABLE = "semistable_not_polystable"
    POLYSTABLE = "polystable"
    STABLE = "stable"

    @property
    def has_mle(self):
        return self in (StabilityClass.POLYSTABLE, StabilityClass.STABLE)

    @property
    def is_bounded(self):
        return self is not StabilityClass.UNSTABLE


@dataclass
class StabilizerInfo:
    """Stabilizer Lie algebra: its dimension and a Frobenius-orthonormal basis.

    Basis elements are p x p matrices M (vector data) or pairs (M1, M2)
    (left-right action); pairs are orthonormal in the combined inner product.
    """

    lie_dim: int
    basis: list = field(default_factory=list)


@dataclass
class Classification:
    stability: StabilityClass
    diagnostics: dict
    stabilizer: object = None

    @property
    def lie_dim(self):
        return None if self.stabilizer is None else self.stabilizer.lie_dim


@dataclass
class MleFamily:
    """Shape of the set of MLEs.

    ``kind`` is ``"unique"``, ``"finite-family"`` or ``"infinite-family"``.
    ``size`` is the number of distinct MLEs (``None`` when infinite);
    ``directions`` is an orthonormal basis of the stabilizer directions that
    move the estimate; ``max_drift`` is the largest first-order relative change
    of the estimate over unit stabilizer directions.
    """

    kind: str
    size: object
    directions: list = field(default_factory=list)
    max_drift: float = 0.0


# ---------------------------------------------------------------------------
# Stabilizer
# ---------------------------------------------------------------------------


def _null_space(columns, rtol):
    """Orthonormal basis (as coordinate vectors) of the kernel of a column stack."""
    a = np.column_stack(columns)
    n = a.shape[1]
    # the full V is only needed when there are fewer rows than unknowns
    _, s, vt = np.linalg.svd(a, full_matrices=a.shape[0] < n)
    top = s[0] if s.size else 0.0
    if top == 0.0:
        return [vt[k] for k in range(n)]
    rank = int(np.sum(s > rtol * top))
    return [vt[k] for k in range(rank, n)]


def stabilizer_lie_dim(data, model, thresholds=None):
    """Tangent directions at the identity that fix every sample.

    Vector data: traceless M with M y_i = 0 for all i.  Left-right action:
    traceless (M1, M2) with M1 X_i + X_i M2' = 0 for all i.  A finite set has
    no tangent directions.
    """
    th = thresholds or StabilityThresholds()
    _check_model_data(model, data)
    if isinstance(model, FiniteSet):
        return StabilizerInfo(0, [])
    v = whiten_by_weights(data)
    if isinstance(model, FullGL):
        basis = traceless_basis(data.p)
        if not basis:
            return StabilizerInfo(0, [])
        cols = [(v @ e.T).ravel() for e in basis]
        null = _null_space(cols, th.stabilizer_rtol)
        mats = [sum(c * e for c, e in zip(vec, basis)) for vec in null]
        return StabilizerInfo(len(mats), mats)

    p, q = data.p, data.q
    b1 = traceless_basis(p)
    b2 = traceless_basis(q)
    cols = [np.einsum("ij,njk->nik", e, v).ravel() for e in b1]
    cols += [np.einsum("nij,kj->nik", v, e).ravel() for e in b2]
    if not cols:
        return StabilizerInfo(0, [])
    null = _null_space(cols, th.stabilizer_rtol)
    pairs = []
    for vec in null:
        m1 = sum((c * e for c, e in zip(vec[: len(b1)], b1)), np.zeros((p, p)))
        m2 = sum((c * e for c, e in zip(vec[len(b1):], b2)), np.zeros((q, q)))
        pairs.append((m1, m2))
    return StabilizerInfo(len(pairs), pairs)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _is_zero(data):
    return not np.any(data.samples)


def _unstable_report(data, reason):
    rep = OptimizerReport(
        minimizer=None,
        inner_value=0.0,
        residual=0.0,
        iterations=0,
        converged=False,
        max_condition=math.inf,
        status="singular",
        diagnostics={"reason": reason},
    )
    verdict = Classification(
        StabilityClass.UNSTABLE,
        {"reason": reason, "inner_value": 0.0, "stabilizer_scope": STABILIZER_SCOPE},
    )
    return verdict, rep


def _polystable(data, model, opt, th, extra):
    stab = stabilizer_lie_dim(data, model, th)
    cls = StabilityClass.STABLE if stab.lie_dim == 0 else StabilityClass.POLYSTABLE
    diag = {
        "inner_value": opt.inner_value,
        "residual": opt.residual,
        "iterations": opt.iterations,
        "lie_dim": stab.lie_dim,
        "stabilizer_scope": STABILIZER_SCOPE,
    }
    diag.update(extra)
    return Classification(cls, diag, stab)


def analyze(data, model, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, thresholds=None):
    """Run the inner minimization for ``model`` and classify the data.

    Returns ``(Classification, OptimizerReport)``.  Raises
    :class:`InconclusiveError` when an iterative run ends without a decisive
    signature.
    """
    th = thresholds or StabilityThresholds()
    _check_model_data(model, data)
    if _is_zero(data):
        return _unstable_report(data, "all samples are zero")

    if isinstance(model, FiniteSet):
        ties = finite_group_minimize(model, data, th.tie_rtol)
        best = ties[0]
        opt = OptimizerReport(
            minimizer=best[1],
            inner_value=best[2],
            residual=0.0,
            iterations=len(model.elements),
            converged=True,
            max_condition=max(np.linalg.cond(a) for a in model.elements),
            ties=[k for k, _, _ in ties],
        )
        verdict = Classification(
            StabilityClass.STABLE,
            {
                "reason": "finite group: every orbit is finite, hence closed, with finite stabilizer",
                "inner_value": opt.inner_value,
                "ties": len(ties),
                "lie_dim": 0,
                "stabilizer_scope": STABILIZER_SCOPE,
            },
            StabilizerInfo(0, []),
        )
        return verdict, opt

    if isinstance(model, FullGL):
        s = weighted_scatter(data)
        try:
            b, c = closed_form_sl_minimizer(s, th.rank_tol)
        except UnstableDataError as exc:
            return _unstable_report(data, f"weighted scatter is singular ({exc.diagnostics})")
        residual, _ = moment_residual(
            WeightedVectorData(whiten_by_weights(data) @ b.T, np.ones(data.n)), model
        )
        opt = OptimizerReport(
            minimizer=b,
            inner_value=c,
            residual=residual,
            iterations=0,
            converged=True,
            max_condition=float(np.linalg.cond(b)),
        )
        return _polystable(data, model, opt, th, {"reason": "weighted scatter is nonsingular"}), opt

    opt = flip_flop_minimize(data, tol=tol, max_iter=max_iter, thresholds=th)
    base = {
        "status": opt.status,
        "inner_value": opt.inner_value,
        "initial_value": opt.diagnostics.get("initial_value"),
        "residual": opt.residual,
        "iterations": opt.iterations,
        "max_condition": opt.max_condition,
        "stabilizer_scope": STABILIZER_SCOPE,
    }
    if opt.status in ("singular", "vanishing"):
        reason = opt.diagnostics.get("reason", "orbit norm collapsed towards 0")
        base["reason"] = reason
        base["inner_value"] = 0.0
        opt.inner_value = 0.0
        return Classification(StabilityClass.UNSTABLE, base), opt
    if opt.status == "converged":
        return _polystable(data, model, opt, th, {"reason": "moment map vanishes", "status": "converged"}), opt
    if opt.status == "stagnant":
        base["reason"] = (
            "orbit norm bounded away from 0 while the moment residual decays sublinearly "
            "and the iterates diverge"
        )
        for key in ("residual_exponents", "condition_exponents", "value_exponents"):
            base[key] = opt.diagnostics.get(key)
        return Classification(StabilityClass.SEMISTABLE_NOT_POLYSTABLE, base), opt
    base["reason"] = "iteration budget exhausted without a decisive signature"
    base["checkpoints"] = opt.diagnostics.get("checkpoints", [])
    raise InconclusiveError("could not classify the data within max_iter iterations", base)


def classify(data, model, thresholds=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Stability class of the weighted data under ``model``.

    Returns a :class:`Classification`; raises :class:`InconclusiveError`
    when the iterative path cannot decide.
    """
    verdict, _ = analyze(data, model, tol=tol, max_iter=max_iter, thresholds=thresholds)
    return verdict


# ---------------------------------------------------------------------------
# MLE family
# ---------------------------------------------------------------------------


def _conjugation_delta(direction, factors, model):
    """First-order change of the concentration under conjugation by exp(t M), relative."""
    if isinstance(model, LeftRightGL):
        m1, m2 = direction
        g1, g2 = factors
        d1 = m1.T @ g1 + g1 @ m1
        d2 = m2.T @ g2 + g2 @ m2
        delta = np.kron(d2, g1) + np.kron(g2, d1)
        return (delta / np.linalg.norm(np.kron(g2, g1))).ravel()
    (g,) = factors
    delta = direction.T @ g + g @ direction
    return (delta / np.linalg.norm(g)).ravel()


def _combine(weights, basis):
    if isinstance(basis[0], tuple):
        return tuple(sum(w * b[k] for w, b in zip(weights, basis)) for k in range(len(basis[0])))
    return sum(w * b for w, b in zip(weights, basis))


def mle_family(report, stabilizer, model, rtol=1e-8):
    """Describe the set of MLEs from a converged inner minimization.

    Every MLE is S' Psi S for S in the stabilizer of the data, with Psi the
    estimate built from ``report``.  A finite set counts distinct values of
    A'A among tied minimizers.  Otherwise the stabilizer Lie algebra is
    tested at first order: if no direction moves Psi, the MLE is unique.
    """
    if not report.converged:
        raise DomainError("mle_family needs a converged optimizer report")
    if isinstance(model, FiniteSet):
        distinct = []
        for k in report.ties:
            a = model.elements[k]
            g = a.T @ a
            if not any(np.allclose(g, h, rtol=1e-12, atol=1e-12) for h in distinct):
                distinct.append(g)
        size = len(distinct)
        return MleFamily("unique" if size == 1 else "finite-family", size)
    if stabilizer is None or stabilizer.lie_dim == 0:
        return MleFamily("unique", 1)

    if isinstance(model, LeftRightGL):
        b1, b2 = report.minimizer
        factors = (b1.T @ b1, b2.T @ b2)
    else:
        b = report.minimizer
        factors = (b.T @ b,)
    # the derivative is linear in the direction: split the stabilizer span
    # into directions that fix the estimate and directions that move it
    deltas = np.column_stack([_conjugation_delta(m, factors, model) for m in stabilizer.basis])
    _, sv, vt = np.linalg.svd(deltas, full_matrices=False)
    worst = float(sv[0]) if sv.size else 0.0
    moving = [_combine(vt[k], stabilizer.basis) for k in range(sv.size) if sv[k] > rtol]
    if moving:
        return MleFamily("infinite-family", None, moving, worst)
    return MleFamily("unique", 1, [], worst)
