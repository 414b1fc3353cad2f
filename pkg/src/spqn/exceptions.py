"""Exception hierarchy shared by the library and the command line."""


class SpqnError(Exception):
    """Base class for all errors raised by :mod:`spqn`."""


class InvalidDimensionError(SpqnError, ValueError):
    pass


class NumericInputError(SpqnError, ValueError):
    pass


class InvalidIntervalError(SpqnError, ValueError):
    pass


class InvalidParameterError(SpqnError, ValueError):
    pass


class ConvergenceError(SpqnError, ArithmeticError):
    """The Fock cutoff could not be raised far enough to converge."""


class NoViolationError(SpqnError, ArithmeticError):
    """A threshold was requested for a setup that never exceeds S = 2."""
