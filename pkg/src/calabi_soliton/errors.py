class InvalidParameterError(ValueError):
    """Inputs outside the domain where a construction is defined."""


class DegenerateSolitonError(InvalidParameterError):
    """mu = 0: the potential Q is constant and no soliton field exists."""


class ConvergenceError(RuntimeError):
    """A solver, integrator or extrapolation failed to converge."""


class VerificationError(AssertionError):
    """A verified invariant exceeded its tolerance."""
