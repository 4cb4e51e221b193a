"""Exception types raised by dkpsim."""


class DKPError(Exception):
    """Base class for all dkpsim errors."""


class DimensionMismatch(DKPError, ValueError):
    pass


class RepMismatch(DKPError, ValueError):
    pass


class NotTimelike(DKPError, ValueError):
    pass


class NotUnit(DKPError, ValueError):
    pass


class CommutatorMismatch(DKPError, ArithmeticError):
    pass


class UnsupportedLabel(DKPError, ValueError):
    pass


class BadAngles(DKPError, ValueError):
    pass


class BadIndices(DKPError, ValueError):
    pass


class NullState(DKPError, ValueError):
    pass


class IncommensurateModes(DKPError, ValueError):
    pass


class GridMismatch(DKPError, ValueError):
    pass


class ConeExceedsBox(DKPError, ValueError):
    pass


class SymmetryViolation(DKPError, ArithmeticError):
    pass


class ConfigError(DKPError, ValueError):
    pass


class ToleranceFailure(DKPError, RuntimeError):
    pass
