"""
Independent brute-force and quadrature oracles.

These deliberately avoid the closed forms and iterations they are used to
check: orbit minima are probed by random search over group elements, and
Bessel values and Laplace densities come from adaptive quadrature of integral
representations.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import expm

from ._linalg import as_spd, traceless_basis
from .data import WeightedMatrixData, WeightedVectorData
from .errors import DomainError, QuadratureError
from .laplace_models import (
    MatrixLaplaceParams,
    MultivariateLaplaceParams,
    _log_joint,
    _matrix_trace_form,
    _quad_form,
    complete_loglik,
)
from .orbit_optim import FiniteSet, FullGL, LeftRightGL, orbit_norm

__all__ = [
    "SearchConfig",
    "SearchResult",
    "DominanceVerdict",
    "random_orbit_search",
    "quadrature_bessel",
    "quadrature_marginalize",
    "observed_loglik_quadrature",
    "grid_likelihood_dominance",
]


@dataclass(frozen=True)
class SearchConfig:
    """Random orbit search settings.

    trials
        Number of candidate group elements evaluated.
    radius
        Largest Frobenius norm of a tangent step.
    seed
        Seed of the PCG64 stream driving the search.
    """

    trials: int = 2000
    radius: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if not (self.radius > 0) or not math.isfinite(self.radius):
            raise DomainError(f"radius must be finite and > 0, got {self.radius!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass
class SearchResult:
    value: float
    element: object
    evaluations: int


def _tangent_step(rng, basis, sigma, radius):
    if not basis:
        return None
    coef = rng.standard_normal(len(basis)) * sigma
    norm = float(np.linalg.norm(coef))
    if norm > radius:
        coef *= radius / norm
    return sum(c * e for c, e in zip(coef, basis))


def random_orbit_search(data, model, cfg=None, start=None):
    """Smallest orbit norm found by a (1+1) evolution strategy on the group.

    Candidates are exp(M) composed with the current best element, where M is
    a Gaussian combination of a fixed orthonormal traceless basis, rescaled to
    Frobenius norm at most ``cfg.radius``.  The step size follows the 1/5
    success rule and is capped at ``cfg.radius``.  For a finite set every
    element is evaluated instead.  Deterministic given the seed.
    """
    cfg = cfg or SearchConfig()
    if isinstance(model, FiniteSet):
        values = [orbit_norm(a, data) for a in model.elements]
        k = int(np.argmin(values))
        return SearchResult(values[k], model.elements[k], len(values))

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    if isinstance(model, FullGL):
        if not isinstance(data, WeightedVectorData):
            raise DomainError("the full model needs vector data")
        bases = [traceless_basis(model.p)]
        best = [np.eye(model.p) if start is None else np.asarray(start, dtype=float)]
    elif isinstance(model, LeftRightGL):
        if not isinstance(data, WeightedMatrixData):
            raise DomainError("the left-right model needs matrix data")
        bases = [traceless_basis(model.p), traceless_basis(model.q)]
        best = (
            [np.eye(model.p), np.eye(model.q)]
            if start is None
            else [np.asarray(m, dtype=float) for m in start]
        )
    else:
        raise TypeError(f"unknown group model {model!r}")

    def value(elem):
        return orbit_norm(elem[0] if len(elem) == 1 else tuple(elem), data)

    best_value = value(best)
    sigma = min(0.5, cfg.radius)
    for _ in range(cfg.trials):
        cand = []
        for basis, current in zip(bases, best):
            step = _tangent_step(rng, basis, sigma, cfg.radius)
            cand.append(current if step is None else expm(step) @ current)
        v = value(cand)
        if v < best_value:
            best, best_value = cand, v
            sigma = min(sigma * 1.5, cfg.radius)
        else:
            sigma *= 1.5 ** -0.25
            sigma = max(sigma, 1e-12)
    element = best[0] if len(best) == 1 else tuple(best)
    return SearchResult(best_value, element, cfg.trials + 1)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _log_integral(log_f, mode, epsrel, what):
    """log of int_{-inf}^{inf} exp(log_f(s)) ds for a unimodal log-concave log_f.

    The integrand is rescaled by its value at the mode and split there.
    """
    peak = log_f(mode)

    def f(s):
        try:
            return math.exp(log_f(s) - peak)
        except (OverflowError, ZeroDivisionError):
            # far tails: the integrand underflows to 0
            return 0.0

    total = 0.0
    abserr = 0.0
    for a, b in ((-np.inf, mode), (mode, np.inf)):
        val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=400)
        total += val
        abserr += err
    if not total > 0 or abserr > 10 * epsrel * total:
        raise QuadratureError(
            f"{what}: quadrature did not reach the requested accuracy",
            estimate=math.exp(peak) * total,
            abserr=math.exp(peak) * abserr,
        )
    return peak + math.log(total)


def quadrature_bessel(nu, x, epsrel=1e-12):
    """K_nu(x) from K_nu(x) = (1/2) (x/2)^nu int_0^inf t^{-nu-1} exp(-t - x^2/(4t)) dt.

    The substitution t = e^s makes the integrand log-concave with a single
    mode at e^s = (-nu + sqrt(nu^2 + x^2)) / 2, where the integral is split.
    """
    nu = float(nu)
    x = float(x)
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"x must be finite and > 0, got {x!r}")
    if not math.isfinite(nu):
        raise DomainError(f"nu must be finite, got {nu!r}")
    x2 = 0.25 * x * x

    def log_f(s):
        return -nu * s - math.exp(s) - x2 * math.exp(-s)

    mode = math.log(0.5 * (-nu + math.hypot(nu, x)))
    log_int = _log_integral(log_f, mode, epsrel, f"K_{nu}({x})")
    return math.exp(nu * math.log(0.5 * x) - math.log(2.0) + log_int)


def quadrature_marginalize(y, params, epsrel=1e-10):
    """Density at y obtained by integrating the joint density of (Y, W) over w.

    ``params`` is a :class:`MultivariateLaplaceParams` (y a vector) or a
    :class:`MatrixLaplaceParams` (y a matrix).
    """
    if isinstance(params, MultivariateLaplaceParams):
        qform = _quad_form(y, params)
        dim = params.p
        logdet = params.logdet
    elif isinstance(params, MatrixLaplaceParams):
        qform = _matrix_trace_form(y, params)
        dim = params.p * params.q
        logdet = params.q * np.linalg.slogdet(params.sigma1)[1] + params.p * np.linalg.slogdet(
            params.sigma2
        )[1]
    else:
        raise TypeError("params must be multivariate or matrix Laplace parameters")
    if not qform > 0:
        raise DomainError("the marginal density is only integrated away from the origin")

    def log_f(s):
        # w = e^s, dw = w ds
        w = math.exp(s)
        if not 0.0 < w < math.inf:
            return -math.inf
        return _log_joint(qform, w, dim, logdet) + s

    # maximizer of -(dim/2 - 1) s - e^s - qform e^{-s}/2
    a = 0.5 * dim - 1.0
    mode = math.log(0.5 * (-a + math.sqrt(a * a + 2.0 * qform)))
    return math.exp(_log_integral(log_f, mode, epsrel, "marginal density"))


def observed_loglik_quadrature(data, params):
    """sum_i log f(y_i) with every density value obtained by quadrature."""
    y = data.samples if isinstance(data, WeightedVectorData) else np.atleast_2d(data)
    return float(sum(math.log(quadrature_marginalize(row, params)) for row in y))


@dataclass
class DominanceVerdict:
    """Which candidate each criterion prefers.

    ``complete`` and ``observed`` hold the per-candidate complete-data and
    observed-data log-likelihoods; ``agree`` is True when both argmaxes
    coincide.
    """

    complete: list
    observed: list
    complete_argmax: int
    observed_argmax: int

    @property
    def agree(self):
        return self.complete_argmax == self.observed_argmax


def grid_likelihood_dominance(data, candidates):
    """Compare complete-data and observed-data maximizers over candidate concentrations.

    The observed-data log-likelihood of every candidate is computed by
    quadrature over each w_i, independently of the Bessel implementation.
    """
    if not isinstance(data, WeightedVectorData):
        raise TypeError("grid_likelihood_dominance expects WeightedVectorData")
    if not candidates:
        raise DomainError("need at least one candidate")
    psis = [as_spd(c, f"candidate {k}") for k, c in enumerate(candidates)]
    complete = [complete_loglik(data, psi) for psi in psis]
    observed = [
        observed_loglik_quadrature(data, MultivariateLaplaceParams.from_concentration(psi))
        for psi in psis
    ]
    return DominanceVerdict(
        complete, observed, int(np.argmax(complete)), int(np.argmax(observed))
    )
