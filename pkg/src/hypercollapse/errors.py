"""Exception types shared across the package."""


class DegenerateModelError(ValueError):
    """The model has no size-1 edge density, so a collapse never starts."""


class BracketError(RuntimeError):
    """A bisection bracket does not straddle the target."""


class ChainAbsorbedError(RuntimeError):
    """A step was requested from a state with no patches left."""


class ChainExhaustedError(RuntimeError):
    """A step was requested after every vertex has been removed."""
