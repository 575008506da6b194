"""Exception types shared across the package."""


class PermcertError(Exception):
    """Base class for every error raised by permcert."""


class InputError(PermcertError, ValueError):
    """Malformed or out-of-contract input."""


class EmptySpecError(InputError):
    pass


class ModulusTooSmallError(InputError):
    pass


class SpecMismatchError(InputError):
    pass


class BudgetExceededError(PermcertError):
    pass


class ZeroInputError(InputError):
    pass


class WrongLengthError(InputError):
    pass


class TooLargeError(PermcertError):
    pass


class TooManyAPsError(TooLargeError):
    pass


class NotMaximumError(PermcertError):
    pass


class NotABijectionError(InputError):
    pass


class HypothesisViolatedError(InputError):
    pass


class MalformedLogError(PermcertError):
    pass


class TheoremContradiction(PermcertError):
    """A proven theorem failed on a concrete instance.

    This is never expected. ``dump`` carries everything needed to replay it.
    """

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}
