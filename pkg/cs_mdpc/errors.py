"""Exception hierarchy shared by every module of the package."""


class CsMdpcError(Exception):
    """Base class for all errors raised by :mod:`cs_mdpc`."""


class UsageError(CsMdpcError, ValueError):
    """A caller violated an operation's precondition."""


class NotInvertible(CsMdpcError, ArithmeticError):
    """The ring element shares a factor with x^r - 1."""


class InvariantViolation(CsMdpcError, AssertionError):
    """A checked-mode invariant did not hold."""


class CryptoFailure(CsMdpcError):
    """Base class for failures of the cryptographic operations themselves."""


class KeygenFailure(CryptoFailure):
    """No invertible block was found within the retry limit."""


class DecodingFailure(CryptoFailure):
    """The decoder exhausted every threshold margin without a zero syndrome.

    Args:
        message: Human-readable description.
        outcome: The decoder's failure outcome, when available.
    """

    def __init__(self, message: str, outcome: object | None = None) -> None:
        """Store the decoder outcome next to the message."""
        super().__init__(message)
        self.outcome = outcome


class WeightMismatch(CryptoFailure):
    """The decoded error vector does not have the expected weight."""


class VerificationFailure(CryptoFailure):
    """Re-encrypting the decoded error vector did not reproduce the cryptogram."""


class FormatError(CsMdpcError, ValueError):
    """Base class for malformed key, cryptogram or parameter files."""


class BadMagic(FormatError):
    """The file does not start with the expected magic bytes."""


class UnsupportedVersion(FormatError):
    """The magic matches but the format version is unknown."""


class WrongKind(FormatError):
    """The file holds a different object kind than requested."""


class Truncated(FormatError):
    """The file ends before the announced content."""


class TrailingData(FormatError):
    """The file carries bytes after the announced content."""


class NonzeroPadding(FormatError):
    """Padding bits of a packed bit vector are not zero."""


class CoordinateOutOfRange(FormatError):
    """A stored coordinate lies outside the block."""


class MalformedPayload(FormatError):
    """The payload decodes but violates a structural invariant."""


class ParameterFileError(FormatError):
    """A custom parameter file cannot be parsed."""


__all__ = [
    "CsMdpcError",
    "UsageError",
    "NotInvertible",
    "InvariantViolation",
    "CryptoFailure",
    "KeygenFailure",
    "DecodingFailure",
    "WeightMismatch",
    "VerificationFailure",
    "FormatError",
    "BadMagic",
    "UnsupportedVersion",
    "WrongKind",
    "Truncated",
    "TrailingData",
    "NonzeroPadding",
    "CoordinateOutOfRange",
    "MalformedPayload",
    "ParameterFileError",
]
