"""Exception hierarchy shared by all modules."""


class FactorCodeError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 2


class ParseError(FactorCodeError):
    pass


class EmptyShift(FactorCodeError):
    pass


class NotIrreducible(FactorCodeError):
    pass


class ResourceLimit(FactorCodeError):
    exit_code = 3


class WordTooShort(FactorCodeError):
    pass


class NotInLanguage(FactorCodeError):
    pass


class AlphabetMismatch(FactorCodeError):
    pass


class NotFiniteToOne(FactorCodeError):
    pass


class BadPosition(FactorCodeError):
    pass


class NotAPreimage(FactorCodeError):
    pass


class NotMinimal(FactorCodeError):
    """A block claimed minimal routes some preimage through 0 or >= 2 symbols."""

    exit_code = 1


class StabilizationInconclusive(FactorCodeError):
    exit_code = 1


class WindowMismatch(FactorCodeError):
    pass


class Infeasible(FactorCodeError):
    pass


class SolverStalled(FactorCodeError):
    exit_code = 1
