"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """A density was evaluated at its singular point (the origin)."""


class OutOfRangeError(ArithmeticError):
    """A result is not representable as a finite double.

    Use the log-domain variant of the function instead.
    """


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its target accuracy."""

    def __init__(self, message, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class UnstableDataError(ArithmeticError):
    """The data lies in the null cone: the likelihood is unbounded above."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class InconclusiveError(RuntimeError):
    """The stability classifier ran out of budget without a decisive signature."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
