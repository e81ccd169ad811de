"""Exception hierarchy shared by every lowt module."""


class LowTError(Exception):
    """Base class for all errors raised by lowt."""


class ArityError(LowTError, ValueError):
    """An input index or mask does not fit the function's arity."""


class ResourceError(LowTError, ValueError):
    """A requested size exceeds what an exact/dense routine supports."""


class ParameterError(LowTError, ValueError):
    """Invalid construction parameters (e.g. 2k > n for the gap family)."""


class DegenerateFunctionError(LowTError, ValueError):
    """The target function has zero Fourier 1-norm (it is constant 0)."""


class CircuitSyntaxError(LowTError, ValueError):
    """Malformed textual or JSON circuit input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotReversibleError(LowTError):
    """Raised by the basis simulator when a gate is not a classical permutation.

    Callers fall back to the statevector path.
    """
