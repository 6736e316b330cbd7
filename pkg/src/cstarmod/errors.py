"""Exception hierarchy shared by every layer of the package."""


class CStarModError(Exception):
    """Base class for all package errors."""


class InvalidInput(CStarModError, ValueError):
    pass


class NotHermitian(CStarModError, ValueError):
    pass


class NotSupported(CStarModError):
    pass


class AlgebraMismatch(CStarModError, ValueError):
    pass


class SpaceMismatch(CStarModError, ValueError):
    pass


class ZeroOperator(CStarModError, ValueError):
    """Raised where a quantity is only defined for nonzero operators."""


class ZeroProduct(CStarModError, ValueError):
    """Raised when a projection product PQ vanishes."""


class NotAProjection(CStarModError, ValueError):
    pass


class NotInnerInverse(CStarModError, ValueError):
    pass


class InvalidRank(CStarModError, ValueError):
    pass


class ConfigError(CStarModError, ValueError):
    pass


class ParseError(CStarModError, ValueError):
    """Malformed input file; the message carries the file and field."""
