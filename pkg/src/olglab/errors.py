"""Exception types shared across the laboratory."""


class OlgLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OlgLabError):
    """An argument left the mathematical domain of the operation."""


class InvalidSequence(OlgLabError):
    """A sequence generator emitted a negative or non-finite value."""


class InvalidSeries(OlgLabError):
    """A series term was NaN or otherwise unusable."""


class NoFiniteRate(OlgLabError):
    """The one-period Euler equation has no finite positive root."""


class BracketFailure(OlgLabError):
    """The root bracket expansion hit its cap without a sign change."""


class AssumptionViolated(OlgLabError):
    """A solver precondition on the utility/endowment family fails."""


class ScenarioError(OlgLabError):
    """Scenario file could not be parsed; message is line-anchored."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptySurvivalSet(OlgLabError):
    """No survival boundary could be bracketed on the seed grid."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonConvergedSet(OlgLabError):
    """Equilibrium-set endpoints failed to stabilize across the horizon ladder."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoPositiveSteadyState(OlgLabError):
    """R* > n: the no-dividend steady state with positive saving does not exist."""


class ModelPreconditionFailed(OlgLabError):
    """A closed-form model's validity inequality fails; message names it."""


class SmoothnessUnbounded(OlgLabError):
    """The curvature bounds needed for the non-optimality direction are not finite."""


class RankViolation(OlgLabError):
    """Welfare ordering across starting values violated beyond tolerance (solver bug)."""


class NotApplicable(OlgLabError):
    """The requested classification needs hypotheses this economy does not meet."""
