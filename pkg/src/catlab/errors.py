class CatlabError(Exception):
    pass


class DomainError(CatlabError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class ConvergenceError(CatlabError, RuntimeError):
    """An iterative routine stopped before reaching its tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3g})")
        self.residual = residual


class TruncationError(CatlabError, RuntimeError):
    """Fock-space cutoff too small for the requested accuracy."""
