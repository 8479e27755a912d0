"""Exception hierarchy shared by the solver, the continuation engine and the CLI."""


class ResonanceTracerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ResonanceTracerError, ValueError):
    """An argument lies outside the supported domain (unsupported l, k = 0, ...)."""


class SingularityError(DomainError):
    """Evaluation requested at a singular point, e.g. a Hankel function at z = 0."""


class EvaluationError(ResonanceTracerError):
    """A residual evaluation failed.

    The continuation engine treats these as data: a failed evaluation during a
    corrector step shrinks the step instead of aborting the branch.
    """


class NumericOverflowError(EvaluationError, ArithmeticError):
    """The Numerov ratio recursion produced a non-finite value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UndefinedRegularizedFunction(EvaluationError):
    """S is numerically equal to 1, so k^(2l+1) / (S - 1) is undefined."""


class ConvergenceError(ResonanceTracerError):
    """Newton correction did not converge within the iteration budget."""


class SingularSystemError(ResonanceTracerError):
    """A bordered (n+1) x (n+1) system is numerically singular."""


class LocalizationError(ResonanceTracerError):
    """Bisection for a bifurcation point exceeded its iteration budget."""


class NotSimpleBifurcationError(ResonanceTracerError):
    """The Jacobian at a candidate bifurcation point does not have a 2-d kernel."""


class NoRealBranchError(ResonanceTracerError):
    """The algebraic bifurcation equation has no real roots."""


class SeedNotFoundError(ResonanceTracerError):
    """No bound-state zero of the regularized function inside the bracket."""


class ConfigError(ResonanceTracerError, ValueError):
    """A study configuration file or command line is invalid."""
