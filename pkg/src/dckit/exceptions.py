"""Exception hierarchy shared across dckit."""


class DcError(Exception):
    """Base class for all dckit errors."""


class DomainError(DcError):
    """A point lies outside the effective domain of f1."""


class InvalidModulus(DcError, ValueError):
    """Strong-convexity moduli do not admit the requested operation."""


class InvalidLambda(DcError, ValueError):
    """Inexactness parameter lambda is outside (0, 1)."""


class InvalidConfig(DcError, ValueError):
    """A solver configuration failed validation.

    The offending :class:`~dckit.core.ValidationReport` is kept on
    ``self.report``.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.violations) or "invalid configuration")


class LyapunovViolation(DcError):
    """A monitored descent inequality failed beyond its slack."""


class CertificateUnavailable(DcError):
    """The subsolver cannot certify its optimality gap."""


class MissingSubgradients(DcError):
    """Energy evaluation needs a trace recorded with ``store_y=True``."""


class SizeMismatch(DcError, ValueError):
    """Array shapes are inconsistent."""


class ParseError(DcError, ValueError):
    """Malformed input file; ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=0):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")
