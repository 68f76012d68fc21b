"""
orbitlap: maximum likelihood estimation for multivariate and matrix variate
symmetric Laplace group models by orbit-norm minimization, with stability
classification of the data under the group action.
"""

from .data import WeightedMatrixData, WeightedVectorData
from .errors import (
    DomainError,
    InconclusiveError,
    OutOfRangeError,
    PoleError,
    QuadratureError,
    UnstableDataError,
)
from .laplace_models import (
    MatrixLaplaceParams,
    MultivariateLaplaceParams,
    complete_loglik,
    complete_loglik_matrix,
    log_joint_pdf,
    log_joint_pdf_matrix,
    log_pdf_matsl,
    log_pdf_mvsl,
    observed_loglik,
    observed_loglik_offset,
)
from .orbit_optim import (
    FiniteSet,
    FullGL,
    LeftRightGL,
    MleReport,
    OptimizerReport,
    closed_form_sl_minimizer,
    estimate,
    finite_group_minimize,
    flip_flop_minimize,
    moment_residual,
    orbit_norm,
    outer_alpha,
    weighted_scatter,
    whiten_by_weights,
)
from .sampling import SampleRequest, sample, sample_matsl, sample_mvsl
from .special_functions import BesselPoint, bessel_k, log_bessel_k
from .stability import (
    Classification,
    StabilityClass,
    StabilizerInfo,
    classify,
    mle_family,
    stabilizer_lie_dim,
)
from .thresholds import StabilityThresholds

__version__ = "0.1.0"

__all__ = [
    "WeightedMatrixData",
    "WeightedVectorData",
    "DomainError",
    "InconclusiveError",
    "OutOfRangeError",
    "PoleError",
    "QuadratureError",
    "UnstableDataError",
    "MatrixLaplaceParams",
    "MultivariateLaplaceParams",
    "complete_loglik",
    "complete_loglik_matrix",
    "log_joint_pdf",
    "log_joint_pdf_matrix",
    "log_pdf_matsl",
    "log_pdf_mvsl",
    "observed_loglik",
    "observed_loglik_offset",
    "FiniteSet",
    "FullGL",
    "LeftRightGL",
    "MleReport",
    "OptimizerReport",
    "closed_form_sl_minimizer",
    "estimate",
    "finite_group_minimize",
    "flip_flop_minimize",
    "moment_residual",
    "orbit_norm",
    "outer_alpha",
    "weighted_scatter",
    "whiten_by_weights",
    "SampleRequest",
    "sample",
    "sample_matsl",
    "sample_mvsl",
    "BesselPoint",
    "bessel_k",
    "log_bessel_k",
    "Classification",
    "StabilityClass",
    "StabilizerInfo",
    "classify",
    "mle_family",
    "stabilizer_lie_dim",
    "StabilityThresholds",
]
