"""Numerical thresholds for the optimizers and the stability classifier."""

from dataclasses import asdict, dataclass, fields

from .errors import DomainError

__all__ = ["StabilityThresholds"]


@dataclass(frozen=True)
class StabilityThresholds:
    """Every tolerance the classifier uses, in one place.

    rank_tol
        A weighted scatter is singular when its smallest/largest eigenvalue
        ratio is at most this.
    unstable_ratio, unstable_condition
        Iterative path: the data is declared unstable once the orbit norm has
        fallen below ``unstable_ratio`` times its starting value *and* the
        iterate condition number exceeds ``unstable_condition``.
    window
        Spacing of the first checkpoint; later checkpoints sit at
        ``window * 2**j`` iterations.
    residual_floor
        A stagnating run is only called non-polystable while its relative
        moment residual stays above this.
    exponent_min, exponent_max, exponent_rtol
        Between consecutive checkpoints the residual is fitted to a power law
        k**(-e).  Sublinear (non-polystable) convergence shows a steady
        exponent in [exponent_min, exponent_max] that varies by at most
        ``exponent_rtol`` (relative) over the last ``steady_checkpoints``
        estimates; linear convergence makes the exponent roughly double at
        every checkpoint.
    condition_exponent_min
        The iterates must also drift off to infinity: the condition number
        must grow at least like k**condition_exponent_min.
    stabilizer_rtol
        Relative singular-value cutoff for the stabilizer Lie algebra.
    tie_rtol
        Relative tolerance for ties between finite-group minimizers.
    """

    rank_tol: float = 1e-12
    unstable_ratio: float = 1e-10
    unstable_condition: float = 1e8
    window: int = 100
    residual_floor: float = 1e-6
    exponent_min: float = 0.2
    exponent_max: float = 4.0
    exponent_rtol: float = 0.25
    steady_checkpoints: int = 3
    condition_exponent_min: float = 0.05
    stabilizer_rtol: float = 1e-10
    tie_rtol: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise DomainError(f"threshold {f.name} must be > 0, got {value!r}")
        if self.steady_checkpoints < 2:
            raise DomainError("steady_checkpoints must be >= 2")

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise DomainError(f"unknown threshold(s): {', '.join(sorted(unknown))}")
        return cls(**mapping)

    def to_dict(self):
        return asdict(self)
