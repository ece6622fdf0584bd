"""Error types shared across the laboratory."""


class DomainError(ValueError):
    """A parameter is outside its admissible range."""


class BlowUpError(RuntimeError):
    """A simulated field became non-finite."""

    def __init__(self, message, step_index=None, t=None):
        super().__init__(message)
        self.step_index = step_index
        self.t = t


class FrameCollapseError(RuntimeError):
    """The rescaling process alpha left (0, inf), so the frame is lost."""


class SingularProjectionError(RuntimeError):
    """det K(v) is too close to zero for the 2x2 modulation solve."""


class NoConvergenceError(RuntimeError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
