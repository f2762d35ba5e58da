"""Exception hierarchy shared by all jumpcir modules."""


class JumpCIRError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(JumpCIRError, ValueError):
    """A model, law or scheme parameter is outside its admissible range."""


class DomainError(JumpCIRError, ValueError):
    """A transform argument lies outside the closed negative orthant."""


class RegimeError(JumpCIRError, ValueError):
    """The operation is only defined in another criticality regime."""


class NotSubcritical(RegimeError):
    pass


class NotCritical(RegimeError):
    pass


class NotSupercritical(RegimeError):
    pass


class OutOfHorizon(JumpCIRError, ValueError):
    pass


class DegeneratePath(JumpCIRError, ValueError):
    """The observed path has a vanishing time integral."""


class UnsupportedLevy(JumpCIRError, ValueError):
    """The Levy measure cannot be handled by the requested routine."""


class HypothesisViolation(JumpCIRError, ValueError):
    """The assumptions of a limit theorem do not hold for the given parameters."""


class EmptyInput(JumpCIRError, ValueError):
    pass
