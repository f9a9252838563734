"""Exception hierarchy shared by the encoder, decoders and file readers."""


class IFTEMError(Exception):
    """Base class for domain errors raised by this package."""


class KernelSignalMismatch(IFTEMError, ValueError):
    """Kernel fundamental frequency does not match the signal period."""


class BiasTooSmall(IFTEMError, ValueError):
    """The encoder bias does not exceed the amplitude bound of its input."""


class BracketFailure(IFTEMError, RuntimeError):
    """The firing-time equation has no sign change inside its bracket."""


class TooFewFirings(IFTEMError, ValueError):
    """Not enough firing instants to determine the requested coefficients."""


class RankDeficient(IFTEMError, ValueError):
    """The forward matrix has lost numerical column rank."""


class IllPosed(IFTEMError, ValueError):
    """Annihilating-filter null space is not one-dimensional."""


class RootFindingFailure(IFTEMError, RuntimeError):
    """Eigenvalue solve for the annihilating polynomial failed."""


class IllConditionedVandermonde(IFTEMError, ValueError):
    """Estimated delays are too close to separate amplitudes."""


class LengthMismatch(IFTEMError, ValueError):
    """Truth and estimate sequences differ in length."""


class ParseError(IFTEMError, ValueError):
    """Malformed trace or configuration file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
