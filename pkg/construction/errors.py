"""Exception types raised by the construction modules."""


class CapExceededError(ValueError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, what: str, predicted: int, cap: int):
        self.what = what
        self.predicted = predicted
        self.cap = cap
        super().__init__(f"{what}: predicted size {predicted} exceeds cap {cap}")


class ExtensionPropertyError(ValueError):
    """A coefficient row tries to redefine a coordinate of the previous stage."""


class LambdaBoundError(ValueError):
    """lambda_bar is smaller than the norm of some composed extension operator."""


class StageError(ValueError):
    """A stage index is out of range or its data has not been realized."""


class NotRealizedError(KeyError):
    """A point is not part of the realized set (or block) it was looked up in."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "point not realized"


class GridExhaustedError(ValueError):
    """A cluster needs more perturbation points than the grid provides."""

    def __init__(self, cluster: int, needed: int, available: int):
        self.cluster = cluster
        self.needed = needed
        self.available = available
        super().__init__(f"cluster {cluster} has {needed} preimages but the perturbation grid has {available} points")


class ConsistencyError(RuntimeError):
    """An internal bijection or closed-form cross-check failed."""
