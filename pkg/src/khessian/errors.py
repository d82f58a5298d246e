"""Exception hierarchy shared across the package."""


class KHessianError(Exception):
    """Base class for all package-specific errors."""


class DomainError(KHessianError, ValueError):
    """An argument is outside the operation's domain (bad index, shape, value)."""


class InadmissibleSpectrumError(KHessianError, ValueError):
    """A spectrum lies outside the cone required by the operation."""


class CertificationError(KHessianError, ValueError):
    """A right-hand side fails certification (e.g. not positively bounded below)."""


class PreconditionError(KHessianError, ValueError):
    """A caller-asserted precondition fails a numerical spot check."""


class SingularityError(KHessianError, ValueError):
    """Evaluation requested on the singular set of a degenerate (eps = 0) barrier."""


class StencilError(KHessianError, ValueError):
    """A grid node is missing stencil neighbors."""


class ResolutionError(KHessianError, ValueError):
    """Grid resolution is unusable (empty interior, spacing too coarse/fine)."""


class InfeasibleRhsError(KHessianError, ValueError):
    """No admissible ball radius exists for the given right-hand side."""


class InsufficientDataError(KHessianError, ValueError):
    """Not enough samples to run the requested analysis."""


class FitError(KHessianError, ValueError):
    """A regression cannot be performed on the given data."""


class ConvergenceError(KHessianError, RuntimeError):
    """An iterative procedure failed to converge; carries diagnostics.

    Attributes
    ----------
    diagnostics : dict
        Solver- or eigensolver-specific state at the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
