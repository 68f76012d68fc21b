"""
Maximum likelihood estimation as norm minimization along group orbits.

For a complete sample (y_i, w_i) the statistic Y^W = (y_i / sqrt(w_i))_i is
acted on by a matrix group G, and

    sup_{A in G} l_c(A'A) = -inf_{alpha > 0} ( alpha * c - d N log alpha ),
    c = inf_{B in G_SL} ||B . Y^W||^2,

with d = p for vector models and d = pq for matrix models.  The MLEs are
alpha * B'B (or alpha * B2'B2 kron B1'B1) with alpha = dN / c.

Three groups are supported:

* :class:`FullGL` - all of GL_p; the inner problem has a closed form.
* :class:`FiniteSet` - a finite set of matrices with |det| = 1, searched
  exhaustively.
* :class:`LeftRightGL` - GL_p x GL_q acting by X -> A1 X A2'; the inner
  problem is solved by alternating exact minimization (flip-flop).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import det_normalized_inverse, sym_sqrt
from .data import WeightedMatrixData, WeightedVectorData
from .errors import DomainError, UnstableDataError
from .thresholds import StabilityThresholds

__all__ = [
    "FullGL",
    "FiniteSet",
    "LeftRightGL",
    "OptimizerReport",
    "KroneckerConcentration",
    "MleReport",
    "whiten_by_weights",
    "weighted_scatter",
    "orbit_norm",
    "moment_residual",
    "closed_form_sl_minimizer",
    "flip_flop_minimize",
    "finite_group_minimize",
    "outer_alpha",
    "assemble_mle",
    "estimate",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10000
DET_TOL = 1e-10


# ---------------------------------------------------------------------------
# Group models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FullGL:
    """The full general linear group GL_p acting on R^p."""

    p: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p!r}")

    @property
    def name(self):
        return "full"


@dataclass(frozen=True, eq=False)
class FiniteSet:
    """A finite set of p x p matrices with |det| = 1.

    This is the determinant-one slice of a group that is closed under nonzero
    scalars; the scalars themselves are handled by the outer problem.
    """

    elements: tuple

    def __post_init__(self):
        mats = [np.array(a, dtype=float, ndmin=2) for a in self.elements]
        if not mats:
            raise DomainError("a finite group model needs at least one element")
        p = mats[0].shape[0]
        for k, a in enumerate(mats):
            if a.shape != (p, p):
                raise DomainError(f"element {k} has shape {a.shape}, expected ({p}, {p})")
            if not np.all(np.isfinite(a)):
                raise DomainError(f"element {k} is not finite")
            det = np.linalg.det(a)
            if abs(abs(det) - 1.0) > DET_TOL:
                raise DomainError(f"element {k} has |det| = {abs(det):.17g}, expected 1")
            a.setflags(write=False)
        for i in range(len(mats)):
            for j in range(i):
                if np.allclose(mats[i], mats[j], rtol=0.0, atol=1e-12):
                    raise DomainError(f"elements {j} and {i} coincide")
        object.__setattr__(self, "elements", tuple(mats))

    @property
    def p(self):
        return self.elements[0].shape[0]

    @property
    def name(self):
        return "finite"


@dataclass(frozen=True)
class LeftRightGL:
    """GL_p x GL_q acting on p x q matrices by X -> A1 X A2'."""

    p: int
    q: int

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")

    @property
    def name(self):
        return "leftright"


def _check_model_data(model, data):
    if isinstance(model, (FullGL, FiniteSet)):
        if not isinstance(data, WeightedVectorData):
            raise DomainError(f"the {model.name} model needs vector data")
        if data.p != model.p:
            raise DomainError(f"data has p={data.p}, model has p={model.p}")
    elif isinstance(model, LeftRightGL):
        if not isinstance(data, WeightedMatrixData):
            raise DomainError("the left-right model needs matrix data")
        if (data.p, data.q) != (model.p, model.q):
            raise DomainError(
                f"data is {data.p}x{data.q}, model is {model.p}x{model.q}"
            )
    else:
        raise TypeError(f"unknown group model {model!r}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class OptimizerReport:
    """Outcome of an inner (determinant-one) minimization.

    ``minimizer`` is a p x p matrix B (full group), an index into the finite
    set, or a pair (B1, B2).  ``status`` is one of ``"converged"``,
    ``"singular"`` (a scatter matrix lost rank: the infimum is 0),
    ``"vanishing"`` (the orbit norm collapsed towards 0), ``"stagnant"``
    (sublinear convergence with diverging iterates) or ``"max_iter"``.
    """

    minimizer: object
    inner_value: float
    residual: float
    iterations: int
    converged: bool
    max_condition: float
    status: str = "converged"
    history: list = field(default_factory=list)
    ties: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


@dataclass
class KroneckerConcentration:
    """Concentration of the matrix model: psi2 kron psi1, with a reporting split."""

    psi1: np.ndarray
    psi2: np.ndarray

    @property
    def matrix(self):
        return np.kron(self.psi2, self.psi1)


@dataclass
class MleReport:
    optimizer: object
    alpha: object
    concentration: object
    objective: float
    stability: object
    mle_unique: str
    alternatives: list = field(default_factory=list)
    factors: object = None
    family: object = None

    @property
    def c(self):
        return None if self.optimizer is None else self.optimizer.inner_value

    @property
    def has_mle(self):
        return self.concentration is not None


# ---------------------------------------------------------------------------
# Statistic and norms
# ---------------------------------------------------------------------------


def whiten_by_weights(data):
    """Y^W (or X^W): every sample divided by the square root of its weight."""
    if isinstance(data, WeightedVectorData):
        return data.samples / np.sqrt(data.weights)[:, None]
    if isinstance(data, WeightedMatrixData):
        return data.samples / np.sqrt(data.weights)[:, None, None]
    raise TypeError("expected WeightedVectorData or WeightedMatrixData")


def weighted_scatter(data):
    """S = sum_i y_i y_i' / w_i."""
    if not isinstance(data, WeightedVectorData):
        raise TypeError("weighted_scatter expects WeightedVectorData")
    yw = whiten_by_weights(data)
    s = yw.T @ yw
    return 0.5 * (s + s.T)


def orbit_norm(element, data):
    """||A . Y^W||^2 for a p x p matrix A, or ||(A1, A2) . X^W||^2 for a pair."""
    if isinstance(data, WeightedVectorData):
        a = np.asarray(element, dtype=float)
        if a.shape != (data.p, data.p):
            raise DomainError(f"element has shape {a.shape}, data needs ({data.p}, {data.p})")
        return float(np.sum((whiten_by_weights(data) @ a.T) ** 2))
    if isinstance(data, WeightedMatrixData):
        a1, a2 = (np.asarray(m, dtype=float) for m in element)
        if a1.shape != (data.p, data.p) or a2.shape != (data.q, data.q):
            raise DomainError("element pair does not match the data dimensions")
        return float(np.sum((a1 @ whiten_by_weights(data) @ a2.T) ** 2))
    raise TypeError("expected WeightedVectorData or WeightedMatrixData")


def _gram_residuals(xw):
    """(R1, R2, tau) for whitened matrix samples of shape (N, p, q)."""
    p, q = xw.shape[1], xw.shape[2]
    g1 = np.einsum("nij,nkj->ik", xw, xw)
    g2 = np.einsum("nji,njk->ik", xw, xw)
    tau = float(np.trace(g1))
    return g1 - (tau / p) * np.eye(p), g2 - (tau / q) * np.eye(q), tau


def moment_residual(data, model=None):
    """Norm of the moment map at the identity, and the residual matrices.

    Vector data (full group): ||S - (tr S / p) I||_F with S the weighted
    scatter.  Matrix data (left-right group): max(||R1||_F, ||R2||_F) with
    R1 = sum X~ X~' - (tau/p) I and R2 = sum X~' X~ - (tau/q) I.  A finite
    group has no tangent directions, so its residual is 0.
    """
    if isinstance(model, FiniteSet):
        return 0.0, ()
    if isinstance(data, WeightedVectorData):
        s = weighted_scatter(data)
        r = s - (np.trace(s) / data.p) * np.eye(data.p)
        return float(np.linalg.norm(r)), (r,)
    if isinstance(data, WeightedMatrixData):
        r1, r2, _ = _gram_residuals(whiten_by_weights(data))
        return float(max(np.linalg.norm(r1), np.linalg.norm(r2))), (r1, r2)
    raise TypeError("expected WeightedVectorData or WeightedMatrixData")


# ---------------------------------------------------------------------------
# Inner problems
# ---------------------------------------------------------------------------


def closed_form_sl_minimizer(scatter, rank_tol=1e-12):
    """Minimize tr(B'B S) over B in SL_p for a positive definite S.

    Returns ``(B, c)`` with B the symmetric positive definite matrix satisfying
    B'B = det(S)^{1/p} S^{-1} and c = p det(S)^{1/p}.

    Raises :class:`UnstableDataError` when S is singular (smallest/largest
    eigenvalue ratio <= ``rank_tol``): then the infimum is 0 and not attained.
    """
    s = np.asarray(scatter, dtype=float)
    s = 0.5 * (s + s.T)
    p = s.shape[0]
    vals, vecs = np.linalg.eigh(s)
    top = vals[-1]
    if not top > 0.0 or vals[0] <= rank_tol * top:
        raise UnstableDataError(
            "weighted scatter is singular: the orbit closure contains 0",
            {"eigenvalues": vals.tolist()},
        )
    log_geo = float(np.mean(np.log(vals)))
    geo = math.exp(log_geo)
    b = (vecs * np.sqrt(geo / vals)) @ vecs.T
    return 0.5 * (b + b.T), p * geo


def _condition(b):
    sv = np.linalg.svd(b, compute_uv=False)
    return float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf


def _power_exponent(prev, cur):
    # Exponent e of a k**(-e) law between checkpoints k and 2k.
    if prev <= 0.0 or cur <= 0.0:
        return math.inf
    return math.log(prev / cur) / math.log(2.0)


def _stagnation_signature(checkpoints, th):
    """Decide whether checkpoint data shows sublinear, non-polystable convergence."""
    need = th.steady_checkpoints + 1
    if len(checkpoints) < need:
        return False, {}
    pts = checkpoints[-need:]
    res_exp = [_power_exponent(a["residual"], b["residual"]) for a, b in zip(pts, pts[1:])]
    cond_exp = [
        math.log(b["condition"] / a["condition"]) / math.log(2.0) for a, b in zip(pts, pts[1:])
    ]
    val_exp = [_power_exponent(a["value"], b["value"]) for a, b in zip(pts, pts[1:])]
    info = {
        "residual_exponents": res_exp,
        "condition_exponents": cond_exp,
        "value_exponents": val_exp,
    }
    in_band = all(th.exponent_min <= e <= th.exponent_max for e in res_exp)
    steady = all(
        abs(b - a) <= th.exponent_rtol * max(abs(a), abs(b)) for a, b in zip(res_exp, res_exp[1:])
    )
    drifting = all(e >= th.condition_exponent_min for e in cond_exp)
    # the value must level off rather than follow the residual down
    bounded = all(v <= 0.1 * r for v, r in zip(val_exp, res_exp))
    above_floor = pts[-1]["residual"] > th.residual_floor
    return in_band and steady and drifting and bounded and above_floor, info


def flip_flop_minimize(data, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, thresholds=None,
                       detect_stagnation=True):
    """Minimize ||(B1, B2) . X^W||^2 over SL_p x SL_q by alternating exact steps.

    With B2 fixed, the best B1'B1 is the determinant-normalized inverse of the
    row scatter sum_i Z_i Z_i' of the current transformed samples; then the
    same for B2 with the column scatter.  Each half-step is an exact
    minimization, so the orbit norm never increases.

    The run stops when the relative moment residual max(||R1||, ||R2||) / tau
    drops to ``tol`` (``converged=True``) or when one of the diagnostic exits
    in :class:`OptimizerReport` fires.  ``detect_stagnation=False`` disables
    the sublinear-convergence exit.
    """
    th = thresholds or StabilityThresholds()
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if int(max_iter) != max_iter or max_iter < 1:
        raise DomainError(f"max_iter must be a positive integer, got {max_iter!r}")
    if not isinstance(data, WeightedMatrixData):
        raise TypeError("flip_flop_minimize expects WeightedMatrixData")

    z = whiten_by_weights(data).copy()
    p, q = data.p, data.q
    b1 = np.eye(p)
    b2 = np.eye(q)
    r1, r2, tau = _gram_residuals(z)
    initial = tau
    history = [tau]
    max_cond = 1.0
    checkpoints = []
    next_checkpoint = th.window

    def report(status, converged, k, extra=None):
        # B is reported as the symmetric square root of B'B (drops the orthogonal factor).
        m1 = sym_sqrt(b1.T @ b1)
        m2 = sym_sqrt(b2.T @ b2)
        residual = float(max(np.linalg.norm(r1), np.linalg.norm(r2)))
        diag = {"initial_value": initial, "checkpoints": checkpoints}
        if extra:
            diag.update(extra)
        return OptimizerReport(
            minimizer=(m1, m2),
            inner_value=float(tau),
            residual=residual,
            iterations=k,
            converged=converged,
            max_condition=max_cond,
            status=status,
            history=history,
            diagnostics=diag,
        )

    if tau <= 0.0:
        return report("singular", False, 0, {"reason": "all samples are zero"})

    k = 0
    while True:
        rel = max(np.linalg.norm(r1), np.linalg.norm(r2)) / tau
        if rel <= tol:
            return report("converged", True, k)
        if k >= max_iter:
            return report("max_iter", False, k)

        k += 1
        for side in (0, 1):
            if side == 0:
                scatter = np.einsum("nij,nkj->ik", z, z)
            else:
                scatter = np.einsum("nji,njk->ik", z, z)
            pmat, value = det_normalized_inverse(scatter)
            if pmat is None:
                tau = 0.0
                history.append(0.0)
                return report(
                    "singular",
                    False,
                    k,
                    {"reason": "row scatter singular" if side == 0 else "column scatter singular"},
                )
            step = sym_sqrt(pmat)
            if side == 0:
                z = np.einsum("ij,njk->nik", step, z)
                b1 = step @ b1
            else:
                z = np.einsum("nij,kj->nik", z, step)
                b2 = step @ b2
            history.append(float(value))

        r1, r2, tau = _gram_residuals(z)
        cond = max(_condition(b1), _condition(b2))
        max_cond = max(max_cond, cond)

        if tau < th.unstable_ratio * initial and cond > th.unstable_condition:
            return report("vanishing", False, k)

        if detect_stagnation and k == next_checkpoint:
            rel = max(np.linalg.norm(r1), np.linalg.norm(r2)) / tau
            checkpoints.append({"iteration": k, "residual": rel, "condition": cond, "value": tau})
            next_checkpoint *= 2
            stuck, info = _stagnation_signature(checkpoints, th)
            if stuck:
                log.debug("flip-flop stagnated at iteration %d: %s", k, info)
                return report("stagnant", False, k, info)


def finite_group_minimize(model, data, tie_rtol=1e-12):
    """Evaluate the orbit norm at every element and return all minimizers.

    Returns a list of ``(index, element, value)`` for every element whose norm
    is within ``tie_rtol`` (relative) of the smallest one.
    """
    if not isinstance(model, FiniteSet):
        raise TypeError("finite_group_minimize expects a FiniteSet model")
    if not model.elements:
        raise DomainError("empty element set")
    values = [orbit_norm(a, data) for a in model.elements]
    best = min(values)
    return [
        (k, model.elements[k], v)
        for k, v in enumerate(values)
        if v - best <= tie_rtol * abs(best)
    ]


# ---------------------------------------------------------------------------
# Outer problem and assembly
# ---------------------------------------------------------------------------


def outer_alpha(c, d, n):
    """Minimize alpha * c - d n log(alpha) over alpha > 0.

    Returns ``(alpha, min_value)`` with alpha = d n / c and
    min_value = d n (1 - log(d n) + log c).  Raises
    :class:`UnstableDataError` for c <= 0 (the objective is unbounded below).
    """
    if not c > 0:
        raise UnstableDataError(f"inner infimum c = {c!r}: likelihood is unbounded above")
    dn = float(d) * float(n)
    return dn / c, dn * (1.0 - math.log(dn) + math.log(c))


def assemble_mle(alpha, minimizer, model):
    """Concentration matrix from the outer scalar and an inner minimizer.

    Full group / finite set: alpha * B'B.  Left-right group: a
    :class:`KroneckerConcentration` whose product psi2 kron psi1 equals
    alpha * B2'B2 kron B1'B1.  Only the product is determined by the data; the
    split between the factors is fixed by tr(psi1)/p = tr(psi2)/q.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha!r}")
    if isinstance(model, LeftRightGL):
        b1, b2 = (np.asarray(m, dtype=float) for m in minimizer)
        g1 = b1.T @ b1
        g2 = b2.T @ b2
        root = math.sqrt(alpha)
        t1 = root * np.trace(g1) / model.p
        t2 = root * np.trace(g2) / model.q
        kappa = math.sqrt(t2 / t1)
        psi1 = root * kappa * g1
        psi2 = root * g2 / kappa
        return KroneckerConcentration(0.5 * (psi1 + psi1.T), 0.5 * (psi2 + psi2.T))
    b = np.asarray(minimizer, dtype=float)
    if isinstance(model, FiniteSet) and b.ndim == 0:
        b = model.elements[int(b)]
    psi = alpha * (b.T @ b)
    return 0.5 * (psi + psi.T)


def estimate(data, model, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, thresholds=None):
    """Complete-data MLE of the concentration matrix over a Laplace group model.

    Runs whitening, the inner minimization for the model, the outer scalar
    problem, assembly and stability classification.  Data without an MLE
    (unstable, or semistable but not polystable) yields a report with
    ``concentration=None`` and ``mle_unique="none"``; the objective is then
    ``inf`` (unstable) or the unattained supremum.

    Raises :class:`~orbitlap.errors.InconclusiveError` when the iterative
    classifier cannot decide.
    """
    from .stability import StabilityClass, analyze, mle_family

    _check_model_data(model, data)
    th = thresholds or StabilityThresholds()
    verdict, opt = analyze(data, model, tol=tol, max_iter=max_iter, thresholds=th)
    d = model.p * model.q if isinstance(model, LeftRightGL) else model.p

    if verdict.stability is StabilityClass.UNSTABLE:
        return MleReport(
            optimizer=opt,
            alpha=None,
            concentration=None,
            objective=math.inf,
            stability=verdict,
            mle_unique="none",
        )

    alpha, min_value = outer_alpha(opt.inner_value, d, data.n)
    objective = -min_value
    if verdict.stability is StabilityClass.SEMISTABLE_NOT_POLYSTABLE:
        return MleReport(
            optimizer=opt,
            alpha=alpha,
            concentration=None,
            objective=objective,
            stability=verdict,
            mle_unique="none",
        )

    family = mle_family(opt, verdict.stabilizer, model)
    if isinstance(model, FiniteSet):
        alternatives = []
        for k in opt.ties:
            cand = assemble_mle(alpha, model.elements[k], model)
            if not any(np.allclose(cand, a, rtol=1e-12, atol=1e-12) for a in alternatives):
                alternatives.append(cand)
        concentration = alternatives[0]
        factors = None
    else:
        conc = assemble_mle(alpha, opt.minimizer, model)
        if isinstance(conc, KroneckerConcentration):
            factors = (conc.psi1, conc.psi2)
            concentration = conc.matrix
        else:
            factors = None
            concentration = conc
        alternatives = [concentration]

    return MleReport(
        optimizer=opt,
        alpha=alpha,
        concentration=concentration,
        objective=objective,
        stability=verdict,
        mle_unique=family.kind,
        alternatives=alternatives,
        factors=factors,
        family=family,
    )
