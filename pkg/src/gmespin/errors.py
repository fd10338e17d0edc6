"""Exception hierarchy shared by all gmespin modules."""


class GmeError(Exception):
    """Base class for every error raised by gmespin."""


class SizeError(GmeError, ValueError):
    """Hilbert space larger than the configured dense limit."""


class ContractError(GmeError, ValueError):
    """An input violates an operation's precondition."""


class InvalidStateError(ContractError):
    """State or Bloch vector is not physical (norm, trace, positivity)."""


class SubspaceError(ContractError):
    """Density matrix has weight outside the requested two-level subspace."""


class ConvergenceError(GmeError, RuntimeError):
    """A numerical oracle failed to converge.

    ``best`` holds the best value found before giving up (may be None) and
    ``diagnostics`` any residuals worth reporting.
    """

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}


class QuadratureError(ConvergenceError):
    """Field-average quadrature did not pass its node-refinement check."""
