"""Exception types shared across the package."""


class SubsegError(Exception):
    """Base class for all errors raised by subseg."""


class InvalidInputError(SubsegError, ValueError):
    """Input violates a precondition (non-finite values, bad shapes, bad parameters)."""


class DegenerateInputError(SubsegError, ValueError):
    """Input is well-formed but the requested quantity is undefined for it,
    e.g. the shape interaction matrix of a rank-0 matrix."""


class DecompositionError(SubsegError, ArithmeticError):
    """A dense factorization failed to converge."""
