"""
Oracle battery and worked-example fixtures run by ``orbitlap selftest``.

Every check is deterministic.  A check returns ``(passed, detail)``.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .data import WeightedMatrixData, WeightedVectorData
from .laplace_models import (
    MatrixLaplaceParams,
    MultivariateLaplaceParams,
    complete_loglik,
    complete_loglik_matrix,
    log_pdf_matsl,
    log_pdf_mvsl,
)
from .oracle import SearchConfig, quadrature_bessel, quadrature_marginalize, random_orbit_search
from .orbit_optim import (
    FiniteSet,
    FullGL,
    LeftRightGL,
    closed_form_sl_minimizer,
    estimate,
    flip_flop_minimize,
    weighted_scatter,
)
from .special_functions import bessel_k
from .stability import StabilityClass, classify

__all__ = ["CheckResult", "CHECKS", "run_all", "format_table"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _rel(a, b):
    return abs(a - b) / abs(b)


def _bessel_half_order():
    xs = np.linspace(0.1, 50.0, 40)
    worst = max(_rel(bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x)) for x in xs)
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def _bessel_quadrature():
    worst = 0.0
    for nu in np.linspace(-5.0, 5.0, 11):
        for x in (0.1, 0.7, 1.9, 2.1, 8.0, 50.0):
            worst = max(worst, _rel(bessel_k(nu, x), quadrature_bessel(nu, x)))
    return worst <= 1e-8, f"max rel err {worst:.2e}"


def _bessel_symmetry():
    worst = 0.0
    for nu in (0.3, 1.5, 2.75, 4.0):
        for x in (0.1, 1.0, 5.0, 40.0):
            worst = max(worst, _rel(bessel_k(-nu, x), bessel_k(nu, x)))
    return worst <= 1e-12, f"max rel err {worst:.2e}"


def _density_closure():
    rng = np.random.Generator(np.random.PCG64(11))
    worst = 0.0
    for p in (1, 2, 3):
        a = rng.standard_normal((p, p))
        params = MultivariateLaplaceParams(a @ a.T + p * np.eye(p))
        for _ in range(3):
            y = rng.standard_normal(p)
            worst = max(worst, _rel(math.exp(log_pdf_mvsl(y, params)), quadrature_marginalize(y, params)))
    return worst <= 1e-6, f"max rel err {worst:.2e}"


def _matrix_vec_density():
    s1 = np.array([[2.0, 0.3], [0.3, 1.0]])
    s2 = np.array([[1.5, -0.2, 0.0], [-0.2, 1.0, 0.1], [0.0, 0.1, 0.7]])
    params = MatrixLaplaceParams(s1, s2)
    x = np.array([[0.4, -1.0, 0.2], [1.1, 0.3, -0.5]])
    a = log_pdf_matsl(x, params)
    b = log_pdf_mvsl(x.T.reshape(-1), params.vec_params())
    return abs(a - b) <= 1e-12 * abs(b), f"|diff| {abs(a - b):.2e}"


def _finite_example():
    s = np.array([[1.0, -1.0], [0.0, -1.0]])
    model = FiniteSet((np.eye(2), -np.eye(2), s, -s))
    rep = estimate(WeightedVectorData([[2.0, 0.0]], [1.0]), model)
    want = [np.array([[0.5, 0.0], [0.0, 0.5]]), np.array([[0.5, -0.5], [-0.5, 1.0]])]
    ok = len(rep.alternatives) == 2 and all(
        any(np.allclose(a, w, rtol=0, atol=1e-9) for a in rep.alternatives) for w in want
    )
    return ok and rep.mle_unique == "finite-family", f"{len(rep.alternatives)} distinct MLEs"


def _example_matrix_data():
    x1 = np.array([[0.0, 0.0], [2.0, 0.0]])
    x2 = np.eye(2)
    x3 = np.array([[1.0, -1.0], [1.0, 1.0]])
    x4 = np.diag([math.sqrt(3.0), -math.sqrt(3.0)])
    return x1, x2, x3, x4


def _left_right_unique():
    _, x2, x3, _ = _example_matrix_data()
    rep = estimate(WeightedMatrixData([x2, x3], [1.0, 2.0]), LeftRightGL(2, 2))
    ok = (
        rep.concentration is not None
        and np.allclose(rep.concentration, 2 * np.eye(4), rtol=0, atol=1e-9)
        and rep.stability.lie_dim == 1
        and rep.stability.stability is StabilityClass.POLYSTABLE
        and rep.mle_unique == "unique"
    )
    return ok, f"class {rep.stability.stability.value}, lie_dim {rep.stability.lie_dim}"


def _quadrant():
    x1, x2, x3, x4 = _example_matrix_data()
    model = LeftRightGL(2, 2)
    cases = [
        (([x1], [4.0]), StabilityClass.UNSTABLE, None),
        (([x1, x2], [4.0, 1.0]), StabilityClass.SEMISTABLE_NOT_POLYSTABLE, None),
        (([x2], [1.0]), StabilityClass.POLYSTABLE, 3),
        (([x2, x3, x4], [1.0, 2.0, 3.0]), StabilityClass.STABLE, 0),
    ]
    got = []
    ok = True
    for (xs, ws), want, dim in cases:
        v = classify(WeightedMatrixData(xs, ws), model)
        got.append(v.stability.value)
        ok &= v.stability is want and (dim is None or v.lie_dim == dim)
    return ok, " / ".join(got)


def _closed_form_vs_search():
    rng = np.random.Generator(np.random.PCG64(5))
    worst = 0.0
    for p in (2, 3, 4):
        y = rng.standard_normal((p + 3, p))
        data = WeightedVectorData(y, rng.standard_exponential(p + 3))
        b, c = closed_form_sl_minimizer(weighted_scatter(data))
        best = random_orbit_search(data, FullGL(p), SearchConfig(600, 2.0, p)).value
        if best < c * (1 - 1e-9) or abs(np.linalg.det(b.T @ b) - 1) > 1e-10:
            return False, f"search beat closed form at p={p}"
        worst = max(worst, _rel(best, c))
    return worst <= 1e-6, f"max rel gap {worst:.2e}"


def _objective_identity():
    rng = np.random.Generator(np.random.PCG64(3))
    y = rng.standard_normal((6, 3))
    data = WeightedVectorData(y, rng.standard_exponential(6))
    rep = estimate(data, FullGL(3))
    d, n = 3, data.n
    want = -d * n * (1 - math.log(d * n) + math.log(rep.c))
    a = _rel(complete_loglik(data, rep.concentration), want)
    x = rng.standard_normal((5, 2, 3))
    mdata = WeightedMatrixData(x, rng.standard_exponential(5))
    mrep = estimate(mdata, LeftRightGL(2, 3))
    d = 6
    want = -d * mdata.n * (1 - math.log(d * mdata.n) + math.log(mrep.c))
    b = _rel(complete_loglik_matrix(mdata, *mrep.factors), want)
    return max(a, b) <= 1e-8, f"rel err {max(a, b):.2e}"


def _flip_flop_monotone():
    rng = np.random.Generator(np.random.PCG64(9))
    x = rng.standard_normal((6, 3, 2))
    rep = flip_flop_minimize(WeightedMatrixData(x, rng.standard_exponential(6)))
    h = np.array(rep.history)
    mono = bool(np.all(np.diff(h) <= 1e-12 * h[:-1]))
    return rep.converged and mono, f"{rep.iterations} iterations, residual {rep.residual:.2e}"


CHECKS = [
    ("bessel half-order closed form", _bessel_half_order),
    ("bessel vs quadrature", _bessel_quadrature),
    ("bessel order symmetry", _bessel_symmetry),
    ("density vs marginal quadrature", _density_closure),
    ("matrix density vs vec density", _matrix_vec_density),
    ("finite group: two MLEs", _finite_example),
    ("left-right: unique MLE, lie_dim 1", _left_right_unique),
    ("stability quadrant", _quadrant),
    ("closed form vs orbit search", _closed_form_vs_search),
    ("objective identity", _objective_identity),
    ("flip-flop monotone and convergent", _flip_flop_monotone),
]


def run_all():
    results = []
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results


def format_table(results, timings=False):
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  detail"]
    for r in results:
        row = f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}"
        if timings:
            row += f"  ({r.seconds:.2f}s)"
        lines.append(row)
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines)
