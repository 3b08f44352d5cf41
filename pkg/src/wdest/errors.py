"""Exception hierarchy shared by the library and the command-line driver."""


class WdestError(Exception):
    """Base class for all library errors."""


class LengthMismatch(WdestError, ValueError):
    pass


class Singular(WdestError, ArithmeticError):
    """Square matrix has no inverse over GF(2)."""


class RankDeficient(WdestError, ValueError):
    """Generator matrix does not have full row rank."""


class ParseError(WdestError, ValueError):
    pass


class Ragged(ParseError):
    """Matrix text rows of unequal length."""


class Malformed(WdestError, ValueError):
    """Array is not a valid PMF / characteristic function."""


class CapExceeded(WdestError):
    """Exhaustive computation over 2^k words requested above the configured cap."""


class IterationsExhausted(WdestError):
    """Randomized solver hit its iteration budget without success."""
