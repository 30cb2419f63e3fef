"""Exception and warning types shared across the package."""


class ScatVerifyError(Exception):
    """Base class for all package errors."""


class PreconditionError(ScatVerifyError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(ScatVerifyError, ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class SingularJacobianError(ScatVerifyError, ArithmeticError):
    """The delta-reduction Jacobian is unbounded (tangent root, zero discriminant)."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class DegenerateEncounterError(ScatVerifyError, ArithmeticError):
    """No relative motion (q = 0) or a zero-length mapped momentum."""


class SingularPointError(ScatVerifyError, ArithmeticError):
    """A closed form was evaluated at its singular point."""


class AccuracyError(ScatVerifyError, ArithmeticError):
    """A quadrature, extrapolation or Monte-Carlo estimate failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotFoundError(ScatVerifyError, LookupError):
    """A search or construction produced no admissible result."""


class DivergenceWarning(UserWarning):
    """An integrand has a non-integrable singularity on the integration domain."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


class UnitarityWarning(UserWarning):
    """An S-matrix element exceeds unit modulus."""
