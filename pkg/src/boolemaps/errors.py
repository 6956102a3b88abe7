"""Exception types shared across the package."""


class BooleMapsError(Exception):
    pass


class DomainError(BooleMapsError):
    """Argument outside the map's or density's domain."""


class PoleProximity(BooleMapsError):
    """Evaluation point within the exclusion radius of a pole."""


class RootSolveFailure(BooleMapsError):
    """A preimage or fixed-point root did not reach the residual target."""


class DegenerateEquation(BooleMapsError):
    """Fixed-point polynomial is identically zero."""


class UnsupportedMap(BooleMapsError):
    """Operation not implemented for this map kind."""


class BranchExplosion(BooleMapsError):
    """Iterated preimage interval count exceeded the enumeration cap."""


class NonConvergence(BooleMapsError):
    """Iterative solver exhausted its budget above the failure threshold."""


class OutsideImage(BooleMapsError):
    """Target point has no real preimage (negative radicand)."""


class PoleHit(BooleMapsError):
    """Orbit landed within the pole exclusion radius."""

    def __init__(self, step: int, x: float):
        super().__init__(f"orbit hit a pole at step {step} (x={x!r})")
        self.step = step
        self.x = x


class Divergence(BooleMapsError):
    """Orbit magnitude exceeded the overflow guard."""

    def __init__(self, step: int, x: float):
        super().__init__(f"orbit diverged at step {step} (x={x!r})")
        self.step = step
        self.x = x
