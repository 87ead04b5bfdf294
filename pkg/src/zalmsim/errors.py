"""Exception types shared across the package."""


class NumericalDomainError(ArithmeticError):
    """A matrix left the numerically valid domain (singular A, non-PD Gamma, ...)."""


class UndefinedFidelityError(ZeroDivisionError):
    """Fidelity requested for a state with zero heralding probability."""


class ConvergenceError(RuntimeError):
    """The truncated-Fock reference failed to converge within its cutoff cap."""
