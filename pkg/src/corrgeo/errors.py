"""Exception hierarchy shared by all corrgeo modules."""


class CorrGeoError(ValueError):
    """Base class for invalid input or inconsistent intermediate results."""


class NonHermitian(CorrGeoError):
    pass


class NotAState(CorrGeoError):
    pass


class DimensionMismatch(CorrGeoError):
    pass


class InvalidDistribution(CorrGeoError):
    pass


class NotPure(CorrGeoError):
    pass


class WrongArity(CorrGeoError):
    pass


class ConsistencyError(CorrGeoError):
    """An identity that must hold algebraically was violated numerically."""
