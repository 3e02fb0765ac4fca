class CavicoreError(Exception):
    """Base class of the errors raised by cavicore."""


class InvalidInputError(CavicoreError, ValueError):
    """Raised when an argument violates a precondition of an operation."""


class SpectrumFormatError(InvalidInputError):
    """Raised when a spectrum file cannot be parsed."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientBackgroundError(InvalidInputError):
    """Raised when too few samples are left for a background noise estimate."""


class SingularSystemError(CavicoreError, ArithmeticError):
    """Raised when the transfer-to-scattering conversion has no unique solution."""

    def __init__(self, condition: float, wavelength: float | None = None):
        self.condition = condition
        self.wavelength = wavelength
        where = f" at {wavelength:.9g} nm" if wavelength is not None else ""
        super().__init__(f"Singular scattering system{where} (condition estimate {condition:.3g})")


class PeakNotFoundError(CavicoreError):
    """Raised when no resonance stands out of the background of a modelled spectrum."""


class NoSignificantPeakError(CavicoreError):
    """Raised when a measured spectrum holds no peak above its noise floor."""
