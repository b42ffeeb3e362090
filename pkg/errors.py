"""
Exception hierarchy for the ellipsoidal-cavity simulator.

Every error carries an optional context dict so the run manager can log
where a failure happened as a message plus context.
"""


class EllipseQEDError(Exception):
    """Base class for all simulator errors."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.message = str(message)
        self.context = dict(context or {})

    def to_dict(self):
        """Convert the error to a JSON-friendly dictionary."""
        return {
            'type': type(self).__name__,
            'message': self.message,
            'context': self.context,
        }


class ConfigurationError(EllipseQEDError, ValueError):
    """
    Invalid parameter or malformed configuration.

    Args:
        message (str): Human readable description
        field (str): Name of the offending field, if known
    """

    def __init__(self, message, field=None, context=None):
        super().__init__(message, context)
        self.field = field
        if field is not None:
            self.context.setdefault('field', field)

    def __str__(self):
        if self.field:
            return f"{self.field}: {self.message}"
        return self.message


class DomainError(EllipseQEDError, ValueError):
    """Argument outside the mathematical domain of a function."""


class AccuracyError(EllipseQEDError, ArithmeticError):
    """
    A numerical procedure did not reach its requested accuracy.

    Args:
        message (str): Description of the failure
        estimates (dict): Achieved estimates (both doubling results,
            last series term, quadrature error, ...)
    """

    def __init__(self, message, estimates=None, context=None):
        super().__init__(message, context)
        self.estimates = dict(estimates or {})
        if self.estimates:
            self.context.setdefault('estimates', self.estimates)


class ModeIntegrationError(AccuracyError):
    """ODE integration of a spheroidal equation failed at some abscissa."""

    def __init__(self, message, abscissa=None, estimates=None, context=None):
        super().__init__(message, estimates, context)
        self.abscissa = abscissa
        self.context.setdefault('abscissa', abscissa)


class PathExplosionError(EllipseQEDError, RuntimeError):
    """Explicit photon-path enumeration exceeded its configured cap."""

    def __init__(self, message, cap=None, tail_bound=None, context=None):
        super().__init__(message, context)
        self.cap = cap
        self.tail_bound = tail_bound
        self.context.setdefault('cap', cap)
        self.context.setdefault('tail_bound', tail_bound)


class HorizonError(EllipseQEDError, ValueError):
    """Time grid extends past the horizon covered by the weight table."""


class IndexSetError(EllipseQEDError, IndexError):
    """(N1, N2) is not part of the admissible index set."""
