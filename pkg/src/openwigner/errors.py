"""Exception hierarchy for openwigner."""


class WignerError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCoefficients(WignerError, ValueError):
    pass


class InvalidParameters(WignerError, ValueError):
    """Open-system parameters violate the positivity constraints."""


class GridMismatch(WignerError, ValueError):
    pass


class NonHermitianInput(WignerError, ValueError):
    pass


class BadCovariance(WignerError, ValueError):
    pass


class NotAQuantumState(WignerError, ValueError):
    """The phase-space function cannot be the Wigner transform of a state."""


class TruncationTooDeep(WignerError, ValueError):
    pass


class UnsupportedPotential(WignerError, ValueError):
    pass


class NotNormalizable(WignerError, ValueError):
    pass


class BasisTooSmall(WignerError, RuntimeError):
    pass


class NumericalBlowup(WignerError, FloatingPointError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message, step=None, cfl=None):
        super().__init__(message)
        self.step = step
        self.cfl = cfl


class ParseError(WignerError, ValueError):
    def __init__(self, message, line=None, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
            if line is not None:
                message += f" -> {line.rstrip()!r}"
        super().__init__(message)
        self.line = line
        self.lineno = lineno


class InvalidSpec(WignerError, ValueError):
    pass


class IoError(WignerError, OSError):
    """An output file could not be written or an input file read."""
