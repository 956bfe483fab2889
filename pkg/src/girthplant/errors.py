"""Exception types raised across the package."""


class GirthplantError(Exception):
    """Base class for package-specific failures."""


class InfeasibleTarget(GirthplantError):
    """A requested girth target exceeds what any graph of that size can reach."""


class NonIntegral(GirthplantError):
    """A size formula did not produce an integer for the given parameters."""


class HostTooSmall(GirthplantError):
    """The host graph cannot accommodate the requested spaced matching."""


class DegreeViolation(GirthplantError):
    """A construction step broke the intended degree sequence."""


class InvalidParams(GirthplantError):
    """Parameters fail a number-theoretic or structural precondition."""


class RetryExhausted(GirthplantError):
    """A randomized generator hit its retry budget without a valid sample."""


class ConvergenceFailure(GirthplantError):
    """An iterative eigensolver did not converge to tolerance."""


class SizeExceeded(GirthplantError):
    """A dense solve was requested beyond the configured size cap."""


class GirthTooSmall(GirthplantError):
    """Layer structure around the planted set breaks before the requested depth."""


class PreconditionViolated(GirthplantError):
    """A lemma-check input fails one of its named structural conditions."""


class BudgetExceeded(GirthplantError):
    """An exhaustive enumeration would exceed its node budget."""


class DomainError(GirthplantError):
    """A formula was evaluated outside the region where it applies."""
