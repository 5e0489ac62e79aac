"""Exception types raised by the simulator."""


class ContractError(ValueError):
    """An input violates a documented invariant (bad density matrix, unnormalized table)."""


class ResolutionError(ValueError):
    """A tabulated spectrum grid is too coarse for the requested delay."""


class UnsupportedSpectrumError(TypeError):
    """A closed form was requested for a spectrum variant that has none."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivision budget."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound:.3e})")
        self.estimate = estimate
        self.error_bound = error_bound
