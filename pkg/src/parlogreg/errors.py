"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operands do not have conforming dimensions."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss or weight vector."""

    def __init__(self, iteration, message):
        super().__init__(f"diverged at iteration {iteration}: {message}")
        self.iteration = iteration


class DataFormatError(ValueError):
    """Input file is unreadable, malformed or has invalid labels."""
