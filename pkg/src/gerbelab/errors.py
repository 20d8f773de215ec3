"""Exception hierarchy shared by all gerbelab modules."""


class GerbelabError(Exception):
    """Base class. ``details`` carries machine-readable residual data."""

    def __init__(self, message="", details=None):
        super().__init__(message)
        self.details = details if details is not None else []


class InputError(GerbelabError):
    """Malformed or incompatible input (CLI exit code 2)."""


class CheckFailure(GerbelabError):
    """A mathematical verification failed (CLI exit code 1)."""


class DimensionMismatch(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class InvalidNerve(InputError):
    pass


class CoverMismatch(InputError):
    pass


class GerbeMismatch(InputError):
    pass


class ParseError(InputError):
    pass


class UnknownField(InputError):
    pass


class BadReference(InputError):
    pass


class PatchGap(InputError):
    pass


class NotACocycle(CheckFailure):
    pass


class InconsistentPatches(CheckFailure):
    pass


class ConnectionMismatch(CheckFailure):
    pass


class CurvingMismatch(CheckFailure):
    pass


class TwistedCocycleFail(CheckFailure):
    pass


class UnitarityFail(CheckFailure):
    pass


class ConnectionFail(CheckFailure):
    pass


class IntertwineFail(CheckFailure):
    pass


class ParallelFail(CheckFailure):
    pass


class NonConstantRank(CheckFailure):
    pass


class NotNormal(CheckFailure):
    pass


class XDependence(CheckFailure):
    pass


class NotClosed(CheckFailure):
    pass


class Degenerate(CheckFailure):
    pass


class NotHamiltonian(CheckFailure):
    pass


class NotInvariant(CheckFailure):
    pass


class Mismatch(CheckFailure):
    pass
