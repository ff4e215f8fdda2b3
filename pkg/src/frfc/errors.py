"""Exception hierarchy shared by all solver layers."""


class FrfcError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FrfcError, ValueError):
    pass


class InvalidParameter(FrfcError, ValueError):
    pass


class NumericalFailure(FrfcError, RuntimeError):
    pass


class NonFiniteObjective(FrfcError, ValueError):
    pass


class Infeasible(FrfcError):
    pass


class Unbounded(FrfcError):
    pass


class SecondStageInfeasible(Infeasible):
    """Recourse LP infeasible: the instance lacks relatively complete recourse."""


class SecondStageUnbounded(Unbounded):
    pass


class SizeLimit(FrfcError):
    pass


class RankDeficient(FrfcError, ValueError):
    pass


class InnerSolveFailed(FrfcError):
    pass


class LeafTooSmall(FrfcError):
    pass
