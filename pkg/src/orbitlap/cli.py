"""
Command-line front end.

Commands
--------
estimate DATASET    MLE report as JSON (exit 0; 2 when no MLE exists; 3 inconclusive)
classify DATASET    stability class, stabilizer dimension and diagnostics (exit 0; 3 inconclusive)
sample              draw a complete sample and write it as a dataset CSV
loglik DATASET PARAMS
                    observed and complete log-likelihoods
selftest            oracle battery and worked examples (exit 0; 4 on any failure)

Input errors exit with status 1.  ``ORBITLAP_LOG`` sets the log level.
"""

import argparse
import logging
import os
import sys

import numpy as np

from .data import WeightedMatrixData
from .errors import DomainError, InconclusiveError, PoleError
from .formats import ParseError, dumps, read_dataset, read_elements, read_json, write_dataset
from .laplace_models import (
    MatrixLaplaceParams,
    MultivariateLaplaceParams,
    bessel_order,
    complete_loglik,
    complete_loglik_matrix,
    observed_loglik,
    observed_loglik_offset,
)
from .orbit_optim import DEFAULT_MAX_ITER, DEFAULT_TOL, FiniteSet, FullGL, LeftRightGL, estimate
from .sampling import SampleRequest, sample
from .stability import STABILIZER_SCOPE, classify
from .thresholds import StabilityThresholds

__all__ = ["main", "build_parser", "RunConfig"]

log = logging.getLogger("orbitlap")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_MLE = 2
EXIT_INCONCLUSIVE = 3
EXIT_SELFTEST = 4


class RunConfig:
    """Model choice and numerical settings merged from a config file and flags."""

    def __init__(self, model="full", elements=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                 seed=0, thresholds=None):
        if not tol > 0:
            raise DomainError(f"tol must be > 0, got {tol!r}")
        if int(max_iter) != max_iter or max_iter < 1:
            raise DomainError(f"max_iter must be a positive integer, got {max_iter!r}")
        if model not in ("full", "finite", "leftright"):
            raise DomainError(f"unknown model {model!r}")
        if model == "finite" and not elements:
            raise DomainError("the finite model needs group elements")
        self.model = model
        self.elements = elements
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.seed = int(seed)
        self.thresholds = thresholds or StabilityThresholds()

    def group(self, data):
        if self.model == "full":
            return FullGL(data.p)
        if self.model == "leftright":
            if not isinstance(data, WeightedMatrixData):
                raise DomainError("the left-right model needs a matrix dataset")
            return LeftRightGL(data.p, data.q)
        return FiniteSet(tuple(self.elements))


def _load_thresholds(value):
    if value is None:
        return None
    if isinstance(value, str):
        value = read_json(value)
    if not isinstance(value, dict):
        raise DomainError("thresholds must be a JSON object")
    return StabilityThresholds.from_mapping(value)


def _run_config(args):
    cfg = read_json(args.config) if getattr(args, "config", None) else {}
    if not isinstance(cfg, dict):
        raise DomainError("config must be a JSON object")
    known = {"model", "elements", "tol", "max_iter", "seed", "thresholds"}
    unknown = set(cfg) - known
    if unknown:
        raise DomainError(f"unknown config key(s): {', '.join(sorted(unknown))}")

    model = cfg.get("model", "full")
    elements = cfg.get("elements")
    if args.model is not None:
        model = args.model
    if model.startswith("finite:"):
        model, elements = "finite", model.split(":", 1)[1]
    if isinstance(elements, str):
        elements = read_elements(elements)
    elif elements is not None:
        elements = [np.array(e, dtype=float) for e in elements]

    thresholds = _load_thresholds(args.thresholds if args.thresholds is not None else cfg.get("thresholds"))
    return RunConfig(
        model=model,
        elements=elements,
        tol=args.tol if args.tol is not None else cfg.get("tol", DEFAULT_TOL),
        max_iter=args.max_iter if args.max_iter is not None else cfg.get("max_iter", DEFAULT_MAX_ITER),
        seed=args.seed if args.seed is not None else cfg.get("seed", 0),
        thresholds=thresholds,
    )


def _emit(payload, output):
    text = dumps(payload) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _inconclusive(command, model, exc):
    return {
        "command": command,
        "model": model,
        "stability": "inconclusive",
        "error": str(exc),
        "diagnostics": exc.diagnostics,
    }


def estimate_payload(report, model_name):
    opt = report.optimizer
    factors = None
    if report.factors is not None:
        factors = {"psi1": report.factors[0], "psi2": report.factors[1]}
    unbounded = report.objective == float("inf")
    return {
        "command": "estimate",
        "model": model_name,
        "stability": report.stability.stability.value,
        "lie_dim": report.stability.lie_dim,
        "mle_unique": report.mle_unique,
        "has_mle": report.has_mle,
        "alpha": report.alpha,
        "c": report.c,
        "objective": None if unbounded else report.objective,
        "objective_unbounded": unbounded,
        "concentration": report.concentration,
        "concentrations": report.alternatives,
        "factors": factors,
        "iterations": opt.iterations,
        "residual": opt.residual,
        "converged": opt.converged,
        "status": opt.status,
        "stabilizer_scope": STABILIZER_SCOPE,
    }


def cmd_estimate(args):
    data = read_dataset(args.dataset)
    cfg = _run_config(args)
    model = cfg.group(data)
    try:
        report = estimate(data, model, tol=cfg.tol, max_iter=cfg.max_iter, thresholds=cfg.thresholds)
    except InconclusiveError as exc:
        _emit(_inconclusive("estimate", cfg.model, exc), args.output)
        return EXIT_INCONCLUSIVE
    _emit(estimate_payload(report, cfg.model), args.output)
    return EXIT_OK if report.has_mle else EXIT_NO_MLE


def classify_payload(verdict, model_name):
    basis = []
    if verdict.stabilizer is not None:
        for m in verdict.stabilizer.basis:
            basis.append(list(m) if isinstance(m, tuple) else [m])
    return {
        "command": "classify",
        "model": model_name,
        "stability": verdict.stability.value,
        "lie_dim": verdict.lie_dim,
        "stabilizer_basis": basis,
        "diagnostics": verdict.diagnostics,
        "stabilizer_scope": STABILIZER_SCOPE,
    }


def cmd_classify(args):
    data = read_dataset(args.dataset)
    cfg = _run_config(args)
    model = cfg.group(data)
    try:
        verdict = classify(data, model, thresholds=cfg.thresholds, tol=cfg.tol, max_iter=cfg.max_iter)
    except InconclusiveError as exc:
        _emit(_inconclusive("classify", cfg.model, exc), args.output)
        return EXIT_INCONCLUSIVE
    _emit(classify_payload(verdict, cfg.model), args.output)
    return EXIT_OK


def _read_params(source):
    raw = read_json(source) if isinstance(source, str) else source
    if not isinstance(raw, dict):
        raise DomainError("parameters must be a JSON object")
    if "sigma" in raw:
        return MultivariateLaplaceParams(raw["sigma"])
    if "sigma1" in raw and "sigma2" in raw:
        return MatrixLaplaceParams(raw["sigma1"], raw["sigma2"])
    raise DomainError("parameters need 'sigma' or both 'sigma1' and 'sigma2'")


def cmd_sample(args):
    raw = read_json(args.config)
    if not isinstance(raw, dict):
        raise DomainError("sample config must be a JSON object")
    params = _read_params({k: v for k, v in raw.items() if k.startswith("sigma")})
    n = args.n if args.n is not None else raw.get("n")
    if n is None:
        raise DomainError("sample config needs 'n'")
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    data = sample(SampleRequest(n, seed, params))
    try:
        write_dataset(args.output, data)
    except OSError as exc:
        raise DomainError(f"cannot write {args.output}: {exc.strerror}") from None
    log.info("wrote %d samples to %s", data.n, args.output)
    return EXIT_OK


def cmd_loglik(args):
    data = read_dataset(args.dataset)
    params = _read_params(args.params)
    if isinstance(data, WeightedMatrixData):
        if not isinstance(params, MatrixLaplaceParams):
            raise DomainError("a matrix dataset needs 'sigma1' and 'sigma2'")
        if (params.p, params.q) != (data.p, data.q):
            raise DomainError("parameter dimensions do not match the dataset")
        dim = data.p * data.q
        observed = observed_loglik(data.vectorized(), params.vec_params())
        complete = complete_loglik_matrix(data, params.psi1, params.psi2)
        kind = "matrix"
    else:
        if not isinstance(params, MultivariateLaplaceParams):
            raise DomainError("a vector dataset needs 'sigma'")
        dim = data.p
        observed = observed_loglik(data, params)
        complete = complete_loglik(data, params.psi)
        kind = "vector"
    _emit(
        {
            "command": "loglik",
            "kind": kind,
            "n": data.n,
            "nu": bessel_order(dim),
            "observed": observed,
            "observed_offset": observed_loglik_offset(dim, data.n),
            "complete": complete,
        },
        args.output,
    )
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import format_table, run_all

    results = run_all()
    sys.stdout.write(format_table(results, timings=args.timings) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


def _add_run_flags(sub):
    sub.add_argument("dataset", help="dataset CSV")
    sub.add_argument("--config", help="JSON run configuration")
    sub.add_argument("--model", help="full | leftright | finite:<elements.json>")
    sub.add_argument("--tol", type=float, help=f"relative moment-residual tolerance (default {DEFAULT_TOL:g})")
    sub.add_argument("--max-iter", type=int, help=f"iteration budget (default {DEFAULT_MAX_ITER})")
    sub.add_argument("--seed", type=int, help="random seed")
    sub.add_argument("--thresholds", help="JSON file of stability thresholds")
    sub.add_argument("--output", help="write the JSON report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="orbitlap",
        description="Laplace group model MLEs by orbit-norm minimization, with stability classification.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("estimate", help="compute the MLE of the concentration matrix")
    _add_run_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = subs.add_parser("classify", help="classify the data's stability")
    _add_run_flags(p)
    p.set_defaults(func=cmd_classify)

    p = subs.add_parser("sample", help="draw a complete sample (y_i, w_i)")
    p.add_argument("--config", required=True, help="JSON with sigma (or sigma1, sigma2), n and seed")
    p.add_argument("--output", required=True, help="dataset CSV to write")
    p.add_argument("--seed", type=int, help="override the seed")
    p.add_argument("--n", type=int, help="override the sample size")
    p.set_defaults(func=cmd_sample)

    p = subs.add_parser("loglik", help="observed and complete log-likelihoods")
    p.add_argument("dataset", help="dataset CSV")
    p.add_argument("params", help="JSON with sigma (or sigma1, sigma2)")
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_loglik)

    p = subs.add_parser("selftest", help="run the oracle battery")
    p.add_argument("--timings", action="store_true", help="show the time taken by each check")
    p.set_defaults(func=cmd_selftest)
    return parser


def _configure_logging():
    level = os.environ.get("ORBITLAP_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PoleError as exc:
        print(f"error: pole: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
